#pragma once

#include <cstdint>
#include <vector>

#include "oamsec/channel.hpp"
#include "oamsec/types.hpp"

namespace oamsec {

// Column l is (1/sqrt(N)) [exp(j l phi_n)]_n with phi_n = 2 pi n / N + azimuth.
cmat idft_matrix(int n, double initial_azimuth = 0.0);

// w_n = exp(j pi U n^2 / N), n = 0..N-1. Only the even-N form is supported.
cvec zc_weights(int n, int u);

struct SnPair {
    std::vector<int> signal;  // ascending, always starts with mode 0
    std::vector<int> an;      // ascending
};

struct OamCodebook {
    int n = 0;
    int n_a = 0;
    int n_s = 0;
    int n_zz = 0;
    std::vector<SnPair> pairs;

    int g() const { return static_cast<int>(pairs.size()); }
    double index_bits() const;
};

OamCodebook enumerate_sn_pairs(int n, int n_a, int n_s, int n_zz);

// Transmit column k launches stream k; receive row l is Bob's combiner for stream l.
struct Basis {
    cmat transmit;
    cmat receive;
};

Basis oam_basis(int n, double initial_azimuth = 0.0);
Basis zc_basis(int n, double initial_azimuth, int u);
Basis antenna_basis(int n);

struct TransmitState {
    rvec p;  // one entry per signal mode of the active pair, in pair order
    double rho = 0.9;
    double p_t = 0.0;
    double sigma_zz_sq = 0.0;

    // sigma_zz_sq = (1 - rho) P_T / N_zz, or 0 without AN modes.
    static TransmitState make(rvec p, double rho, double p_t, int n_zz);
};

struct RisState {
    cvec theta1;
    cvec theta2;
    rvec a;
};

struct NoiseLevels {
    double sigma_b2 = 0.0;
    double sigma_e2 = 0.0;
    double sigma_r2 = 0.0;
};

struct RateReport {
    rvec gamma_b;
    rvec gamma_e;
    double r_b = 0.0;
    double r_e = 0.0;
    double c_b = 0.0;
    double r_oam = 0.0;
    double ris2_power = 0.0;
};

// H_R1R2 * Theta1 * H_AR1 with Theta1 = diag(conj(theta1)).
cmat ris2_incident(const ChannelSet& ch, const cvec& theta1);

// x = T (s + z); s carries sqrt(p) * symbol on the pair's signal modes, z the AN samples.
cvec assemble_transmit(const OamCodebook& cb, int pair_index, const cvec& symbols, const cvec& an_samples,
                       const TransmitState& state, const cmat& transmit);

double ris2_radiated_power(const ChannelSet& ch, const RisState& ris, const TransmitState& state,
                           const SnPair& pair, const cmat& transmit, double sigma_r2);

struct BobEffective {
    cmat h;           // h(lb, kb) = r_l^H H_R2B Theta2 A H_R2 t_k over signal modes
    cmat noise_rows;  // row lb = r_l^H H_R2B Theta2 (amplifier not applied)
};

BobEffective effective_channel_bob(const ChannelSet& ch, const RisState& ris, const SnPair& pair, const Basis& basis);

rvec sinr_bob(const BobEffective& eff, const rvec& p, const rvec& a, double sigma_r2, double sigma_b2);

struct EveEffective {
    cmat h_signal;  // h^E(lb, kb) over signal modes, Eve row = mode index l
    cmat h_an;      // h^E(lb, z) over AN modes
};

EveEffective effective_channel_eve(const ChannelSet& ch, const RisState& ris, const SnPair& pair,
                                   const cmat& transmit);

rvec sinr_eve(const EveEffective& eff, const rvec& p, double sigma_zz_sq, double sigma_e2);

RateReport rate_report(const ChannelSet& ch, const RisState& ris, const TransmitState& state,
                       const OamCodebook& cb, int pair_index, const Basis& basis, const NoiseLevels& noise);

// Per-stream MMSE SINR at Bob on the raw N-antenna receive vector (AN cancelled).
rvec sinr_bob_mmse(const ChannelSet& ch, const RisState& ris, const SnPair& pair, const cmat& transmit,
                   const rvec& p, const NoiseLevels& noise);

struct NoiseDraws {
    cvec n_r2;  // Q2
    cvec n_b;   // N
    cvec n_e;   // N_E
};

struct Reception {
    cvec y_b;
    cvec y_e;
    cvec y_b_tilde;
};

Reception simulate_reception(const ChannelSet& ch, const RisState& ris, const cvec& x, const NoiseDraws& noise,
                             const cmat& receive);

struct McEstimate {
    double value = 0.0;
    double stderr_ = 0.0;
};

// Monte Carlo (1/G) sum_g KL(f_g || f) in bits for the Gaussian mixture of decomposed
// receive vectors. `samples` draws per component; OpenMP over draws.
McEstimate index_mutual_info_mc(const ChannelSet& ch, const RisState& ris, const TransmitState& state,
                                const OamCodebook& cb, const Basis& basis, const NoiseLevels& noise, int samples,
                                std::uint64_t seed);
McEstimate index_mutual_info_mc_serial(const ChannelSet& ch, const RisState& ris, const TransmitState& state,
                                       const OamCodebook& cb, const Basis& basis, const NoiseLevels& noise,
                                       int samples, std::uint64_t seed);

}  // namespace oamsec
