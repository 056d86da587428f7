#pragma once

#include "oamsec/geometry.hpp"
#include "oamsec/types.hpp"

namespace oamsec {

struct LinkParams {
    double wavelength = kSpeedOfLight / 28e9;
    double beta_ar1 = 1.0;
    double beta_r1r2 = 1.0;
    double beta_r2b = 1.0;
    double beta_ae = 1.0;
    double beta_r1e = 1.0;
};

// Physical layout of every node. Eve's UCA center is already resolved.
struct Deployment {
    UcaSpec alice;
    UcaSpec bob;
    UcaSpec eve;
    RisSpec ris1;
    RisSpec ris2;
    LinkParams links;
};

// There is no RIS2 -> Eve member: that link is blocked.
struct ChannelSet {
    cmat ar1;   // Q1 x N
    cmat r1r2;  // Q2 x Q1
    cmat r2b;   // N x Q2
    cmat ae;    // N_E x N
    cmat r1e;   // N_E x Q1

    int n() const { return static_cast<int>(ar1.cols()); }
    int q1() const { return static_cast<int>(ar1.rows()); }
    int q2() const { return static_cast<int>(r1r2.rows()); }
    int n_e() const { return static_cast<int>(ae.rows()); }
};

// Entry (r, t) = lambda*beta/(4*pi*d) * exp(-j*2*pi*d/lambda). OpenMP over rx rows.
cmat los_channel(const Positions& tx, const Positions& rx, double beta, double wavelength);
// Single-threaded reference for los_channel.
cmat los_channel_serial(const Positions& tx, const Positions& rx, double beta, double wavelength);

ChannelSet build_channel_set(const Deployment& d);

// One RIS with q elements at the RIS2 site replaces the cascade. RIS1 collapses to
// an identity stage (Q1 = N, theta1 fixed to ones) and Eve only has the direct link.
ChannelSet build_single_ris_channel_set(const Deployment& d, int q);

}  // namespace oamsec
