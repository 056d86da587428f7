#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "oamsec/ao.hpp"

namespace oamsec {

struct Interval {
    double low = 0.0;
    double high = 1.0;
};

// Wilson score interval for k errors out of n trials.
Interval wilson_interval(long long k, long long n, double z = 1.96);

// Gray-mapped unit-energy QPSK.
cplx qpsk_modulate(int bits);
int qpsk_demodulate(cplx y);

// Bit error rate of QPSK on AWGN at Es/N0 = snr_db: Q(sqrt(Es/N0)).
double qpsk_ber_awgn(double snr_db);

struct BerPoint {
    double snr_db = 0.0;
    long long bob_errors = 0;
    long long bob_bits = 0;
    long long eve_errors = 0;
    long long eve_bits = 0;

    double ber_bob() const { return bob_bits ? double(bob_errors) / bob_bits : 0.0; }
    double ber_eve() const { return eve_bits ? double(eve_errors) / eve_bits : 0.0; }
    Interval bob_ci() const { return wilson_interval(bob_errors, bob_bits); }
    Interval eve_ci() const { return wilson_interval(eve_errors, eve_bits); }
};

struct BerOptions {
    // Bob runs MMSE over the raw antennas instead of per-mode scalar equalization.
    bool bob_mmse = false;
    // SNR is referenced to the mean per-entry power gain of each receiver's
    // composite channel; false uses P_T / sigma^2 literally.
    bool path_normalized_snr = true;
};

// Mean per-entry power gain of Eve's composite channel (H_AE + H_R1E Theta1 H_AR1);
// the reference for Eve's path-normalized SNR.
double eve_path_gain(const ChannelSet& ch, const cvec& theta1);

// One frame = a uniformly drawn SN pair, QPSK on its signal modes and Gaussian AN.
// Bob cancels the known AN and equalizes per mode; Eve runs MMSE on
// (H_AE + H_R1E Theta1 H_AR1) and slices antenna l as mode l. OpenMP over frames.
std::vector<BerPoint> ber_monte_carlo(const SystemModel& model, const DesignPoint& design,
                                      const std::vector<double>& snr_db, int frames, std::uint64_t seed,
                                      const BerOptions& opt = {});
std::vector<BerPoint> ber_monte_carlo_serial(const SystemModel& model, const DesignPoint& design,
                                             const std::vector<double>& snr_db, int frames, std::uint64_t seed,
                                             const BerOptions& opt = {});

// Single-stream QPSK over AWGN at Es/N0 = snr_db; errors land in the bob_* fields.
BerPoint qpsk_awgn_monte_carlo(double snr_db, long long frames, std::uint64_t seed);

}  // namespace oamsec
