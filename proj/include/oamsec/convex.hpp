#pragma once

#include <limits>

#include "oamsec/types.hpp"

namespace oamsec {

// Power-allocation subproblem with the auxiliary t vectors held fixed.
struct PowerProblem {
    rmat gains_bob;  // |h^B_{l,k}|^2
    rmat gains_eve;  // |h^E_{l,k}|^2
    rvec c1;         // sigma_R2^2 ||h_{B,l} A||^2
    rvec c2;         // sigma_zz^2 sum_z |h^E_{l,z}|^2
    rvec t_b;
    rvec t_e;
    double sigma_b2 = 1.0;
    double sigma_e2 = 1.0;
    double budget = 1.0;  // rho * P_T
    double p_th = 0.0;
    // RIS2 radiated power, linear in p: ris2_coeff . p + ris2_offset <= ris2_limit
    rvec ris2_coeff;
    double ris2_offset = 0.0;
    double ris2_limit = std::numeric_limits<double>::infinity();

    int size() const { return static_cast<int>(gains_bob.rows()); }
};

// Sum of the Bob minorants minus the Eve majorants, in nats.
double power_objective(const PowerProblem& prob, const rvec& p);
rvec power_gradient(const PowerProblem& prob, const rvec& p);

// Spectral projected-gradient ascent. Throws InfeasibleError naming the violated
// constraint when the floor p_th cannot be met.
rvec solve_power(const PowerProblem& prob, double tolerance = 1e-8);
rvec solve_power(const PowerProblem& prob, const rvec& start, double tolerance);

// Euclidean projection onto {p >= p_th, sum p <= budget, ris2 constraint}.
rvec project_power(const PowerProblem& prob, const rvec& y);

// Amplifier-gain subproblem: maximize -a^T Omega a + 2 Re{a^T g}
// subject to 0 <= a <= a_max and a^T P a <= limit, a real.
struct AmplifierProblem {
    cmat omega;
    cvec g;
    rmat power_quadratic;
    double limit = std::numeric_limits<double>::infinity();
    double a_max = 1.0;

    int size() const { return static_cast<int>(g.size()); }
};

double amplifier_objective(const AmplifierProblem& prob, const rvec& a);
rvec solve_amplifier(const AmplifierProblem& prob, double tolerance = 1e-8);

}  // namespace oamsec
