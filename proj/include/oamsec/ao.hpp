#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "oamsec/channel.hpp"
#include "oamsec/circle_manifold.hpp"
#include "oamsec/convex.hpp"
#include "oamsec/oam.hpp"

namespace oamsec {

// Everything the optimizer needs besides the design variables.
struct SystemModel {
    ChannelSet channels;
    Basis basis;
    OamCodebook codebook;
    int pair_index = 0;
    NoiseLevels noise;
    double p_t = 1.0;
    double rho = 0.9;
    // Infinite for passive RIS: no amplifier budget to respect.
    double p_r2 = std::numeric_limits<double>::infinity();
    double a_max = 1.0;
    double p_th = 0.0;

    const SnPair& pair() const { return codebook.pairs.at(pair_index); }
    int n_s() const { return static_cast<int>(pair().signal.size()); }
    double budget() const { return rho * p_t; }
    TransmitState transmit_state(const rvec& p) const {
        return TransmitState::make(p, rho, p_t, static_cast<int>(pair().an.size()));
    }
};

struct DesignPoint {
    rvec p;
    RisState ris;
};

RateReport evaluate(const SystemModel& model, const DesignPoint& d);
double ris2_power(const SystemModel& model, const DesignPoint& d);

struct AuxiliaryVars {
    rvec t_b;
    rvec t_e;
    rvec omega;
    cvec tau;
};

// Closed-form maximizers of the two log minorants at the given powers.
std::pair<rvec, rvec> update_t(const PowerProblem& prob, const rvec& p);

// Power subproblem at the current design, with t already set tight at d.p.
PowerProblem build_power_problem(const SystemModel& model, const DesignPoint& d);

// tau_l = sqrt(p_l) h_ll / (total received power + noise), omega_l = 1 + gamma_B,l.
std::pair<cvec, rvec> update_tau_omega(const BobEffective& eff, const rvec& p, const rvec& a, double sigma_r2,
                                       double sigma_b2);

// MSE e_l(a, tau_l) evaluated from its definition.
rvec mse(const BobEffective& eff, const rvec& p, const rvec& a, const cvec& tau, double sigma_r2, double sigma_b2);

AmplifierProblem build_amplifier_problem(const SystemModel& model, const DesignPoint& d, const cvec& tau,
                                         const rvec& omega);

// Phi1 = -(R_B - R_E) as a function of theta1 (unconstrained complex vector), with
// everything else frozen at construction.
class Theta1Objective {
public:
    Theta1Objective(const SystemModel& model, const DesignPoint& d);
    double value(const cvec& theta1) const;
    cvec egrad(const cvec& theta1) const;

private:
    int ns_ = 0;
    rvec p_;
    rvec weights_eve_;                     // p over signal modes then sigma_zz^2 over AN modes
    std::vector<std::vector<cvec>> mu_;    // [l][k], k over signal modes
    std::vector<std::vector<cvec>> eta_;   // [l][k], k over signal then AN modes
    std::vector<std::vector<cplx>> zeta_;  // [l][k]
    rvec c1_;
    double sigma_b2_ = 1.0;
    double sigma_e2_ = 1.0;
};

// Phi2 = -R_B as a function of theta2.
class Theta2Objective {
public:
    Theta2Objective(const SystemModel& model, const DesignPoint& d);
    double value(const cvec& theta2) const;
    cvec egrad(const cvec& theta2) const;

private:
    int ns_ = 0;
    rvec p_;
    std::vector<std::vector<cvec>> mu_;  // [l][k]
    std::vector<rvec> iota2_;            // |[r_l^H H_R2B]_q a_q|^2
    double sigma_r2_ = 0.0;
    double sigma_b2_ = 1.0;
};

cvec egrad_theta1(const SystemModel& model, const DesignPoint& d);
cvec egrad_theta2(const SystemModel& model, const DesignPoint& d);

struct AoConfig {
    double outer_tolerance = 1e-4;
    int max_outer_iters = 200;
    RcgConfig rcg;
    double convex_tolerance = 1e-8;
    int power_rounds = 5;
    std::uint64_t seed = 0;
};

// Which blocks of the design the optimizer may move.
struct AoFlags {
    bool power = true;
    bool amplifier = true;
    bool theta1 = true;
    bool theta2 = true;
};

struct AoRecord {
    int iter = 0;
    double r_b = 0.0;
    double r_e = 0.0;
    double c_b = 0.0;
    double r_oam = 0.0;
    double ris2_power = 0.0;
    int l1 = 0;
    int l2 = 0;
    bool repaired = false;
};

struct AoTrace {
    RateReport initial;
    std::vector<AoRecord> records;
};

struct AoResult {
    DesignPoint design;  // best iterate
    RateReport report;
    AoTrace trace;
    bool converged = false;
};

// Random phases from the seed, uniform powers, largest feasible uniform gain.
DesignPoint initial_design(const SystemModel& model, std::uint64_t seed);

AoResult alternating_optimize(const SystemModel& model, const DesignPoint& start, const AoConfig& config,
                              const AoFlags& flags = {});
AoResult alternating_optimize(const SystemModel& model, const AoConfig& config, const AoFlags& flags = {});

}  // namespace oamsec
