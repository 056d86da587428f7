#include "oamsec/ber.hpp"

#include <cmath>

#include "oamsec/error.hpp"
#include "oamsec/rng.hpp"

namespace oamsec {

Interval wilson_interval(long long k, long long n, double z) {
    if (n <= 0) return {0.0, 1.0};
    const double p = double(k) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

cplx qpsk_modulate(int bits) {
    const double s = 1.0 / std::sqrt(2.0);
    return {(bits & 1) ? -s : s, (bits & 2) ? -s : s};
}

int qpsk_demodulate(cplx y) { return (y.real() < 0.0 ? 1 : 0) | (y.imag() < 0.0 ? 2 : 0); }

double qpsk_ber_awgn(double snr_db) {
    const double snr = std::pow(10.0, snr_db / 10.0);
    return 0.5 * std::erfc(std::sqrt(snr / 2.0));
}

namespace {

int bit_errors(int a, int b) { return ((a ^ b) & 1) + (((a ^ b) >> 1) & 1); }

struct PairDetector {
    std::vector<cplx> bob_gain;  // h_ll per signal mode, scalar equalizer
    cmat bob_mmse;               // N x N_s combiners when Bob runs MMSE
};

cmat eve_composite(const ChannelSet& ch, const cvec& theta1) {
    return ch.ae + ch.r1e * theta1.conjugate().asDiagonal() * ch.ar1;
}

// Everything a frame needs at one SNR; read-only once built.
struct FrameContext {
    const SystemModel* model = nullptr;
    const DesignPoint* design = nullptr;
    TransmitState state;
    cmat chain;    // H_R2B Theta2 A H_R2, N x N
    cmat eve_mmse; // N x N_E
    std::vector<PairDetector> pairs;
    double sigma_b2 = 0.0;
    double sigma_e2 = 0.0;
    bool bob_mmse = false;
};

FrameContext build_context(const SystemModel& m, const DesignPoint& d, double snr_db, const BerOptions& opt) {
    FrameContext c;
    c.model = &m;
    c.design = &d;
    c.state = m.transmit_state(d.p);
    c.bob_mmse = opt.bob_mmse;
    const ChannelSet& ch = m.channels;
    const int n = ch.n();
    const cmat tail = ch.r2b * d.ris.theta2.conjugate().asDiagonal() * d.ris.a.cast<cplx>().asDiagonal();
    c.chain = tail * ris2_incident(ch, d.ris.theta1);
    const cmat comp = eve_composite(ch, d.ris.theta1);

    const double snr = std::pow(10.0, snr_db / 10.0);
    const double gain_b = opt.path_normalized_snr ? c.chain.squaredNorm() / (double(n) * n) : 1.0;
    const double gain_e = opt.path_normalized_snr ? eve_path_gain(ch, d.ris.theta1) : 1.0;
    c.sigma_b2 = m.p_t * gain_b / snr;
    c.sigma_e2 = m.p_t * gain_e / snr;

    // Eve assumes i.i.d. per-antenna streams of power P_T / N.
    const double px = m.p_t / n;
    cmat cov_e = px * comp * comp.adjoint();
    cov_e.diagonal().array() += c.sigma_e2;
    c.eve_mmse = px * comp.adjoint() * cov_e.ldlt().solve(cmat::Identity(ch.n_e(), ch.n_e()));

    for (const SnPair& pair : m.codebook.pairs) {
        PairDetector det;
        const int ns = static_cast<int>(pair.signal.size());
        if (opt.bob_mmse) {
            cmat hs(n, ns);
            for (int k = 0; k < ns; ++k) hs.col(k) = c.chain * m.basis.transmit.col(pair.signal[k]);
            cmat cov = m.noise.sigma_r2 * tail * tail.adjoint();
            cov.diagonal().array() += c.sigma_b2;
            for (int k = 0; k < ns; ++k) cov += c.state.p(k) * hs.col(k) * hs.col(k).adjoint();
            det.bob_mmse = cov.ldlt().solve(hs);
        } else {
            for (int l = 0; l < ns; ++l) {
                const int mode = pair.signal[l];
                det.bob_gain.push_back(m.basis.receive.row(mode) * c.chain * m.basis.transmit.col(mode));
            }
        }
        c.pairs.push_back(std::move(det));
    }
    return c;
}

struct FrameErrors {
    long long bob = 0;
    long long eve = 0;
    long long bits = 0;
};

FrameErrors run_frame(const FrameContext& c, std::uint64_t seed, std::uint64_t snr_index, std::uint64_t frame) {
    const SystemModel& m = *c.model;
    const DesignPoint& d = *c.design;
    const ChannelSet& ch = m.channels;
    Rng rng(derive_seed(seed, snr_index, frame));
    std::uniform_int_distribution<int> pick(0, m.codebook.g() - 1);
    std::uniform_int_distribution<int> two_bits(0, 3);
    const int g = pick(rng);
    const SnPair& pair = m.codebook.pairs[g];
    const int ns = static_cast<int>(pair.signal.size());

    std::vector<int> bits(ns);
    cvec symbols(ns);
    for (int l = 0; l < ns; ++l) {
        bits[l] = two_bits(rng);
        symbols(l) = qpsk_modulate(bits[l]);
    }
    const cvec an = complex_normal_vector(rng, static_cast<Eigen::Index>(pair.an.size()), c.state.sigma_zz_sq);
    const cvec x = assemble_transmit(m.codebook, g, symbols, an, c.state, m.basis.transmit);
    NoiseDraws nd;
    nd.n_r2 = complex_normal_vector(rng, ch.q2(), m.noise.sigma_r2);
    nd.n_b = complex_normal_vector(rng, ch.n(), c.sigma_b2);
    nd.n_e = complex_normal_vector(rng, ch.n_e(), c.sigma_e2);
    const Reception rx = simulate_reception(ch, d.ris, x, nd, m.basis.receive);

    // Bob knows the AN realization and removes it before detection.
    cvec z_full = cvec::Zero(ch.n());
    for (std::size_t i = 0; i < pair.an.size(); ++i) z_full(pair.an[i]) = an(i);
    const cvec an_at_bob = c.chain * (m.basis.transmit * z_full);

    FrameErrors fe;
    fe.bits = 2LL * ns;
    const PairDetector& det = c.pairs[g];
    if (c.bob_mmse) {
        const cvec y = rx.y_b - an_at_bob;
        for (int l = 0; l < ns; ++l) fe.bob += bit_errors(bits[l], qpsk_demodulate(det.bob_mmse.col(l).dot(y)));
    } else {
        const cvec y = rx.y_b_tilde - m.basis.receive * an_at_bob;
        for (int l = 0; l < ns; ++l) {
            const cplx eq = y(pair.signal[l]) * std::conj(det.bob_gain[l]);
            fe.bob += bit_errors(bits[l], qpsk_demodulate(eq));
        }
    }
    const cvec x_hat = c.eve_mmse * rx.y_e;
    for (int l = 0; l < ns; ++l) fe.eve += bit_errors(bits[l], qpsk_demodulate(x_hat(pair.signal[l])));
    return fe;
}

void check_frames(int frames) {
    if (frames < 1) throw ConfigError("BER needs at least one frame");
}

}  // namespace

double eve_path_gain(const ChannelSet& ch, const cvec& theta1) {
    return eve_composite(ch, theta1).squaredNorm() / (double(ch.n_e()) * ch.n());
}

std::vector<BerPoint> ber_monte_carlo_serial(const SystemModel& model, const DesignPoint& design,
                                             const std::vector<double>& snr_db, int frames, std::uint64_t seed,
                                             const BerOptions& opt) {
    check_frames(frames);
    std::vector<BerPoint> out;
    for (std::size_t s = 0; s < snr_db.size(); ++s) {
        const FrameContext c = build_context(model, design, snr_db[s], opt);
        BerPoint pt;
        pt.snr_db = snr_db[s];
        for (int f = 0; f < frames; ++f) {
            const FrameErrors fe = run_frame(c, seed, s, f);
            pt.bob_errors += fe.bob;
            pt.eve_errors += fe.eve;
            pt.bob_bits += fe.bits;
            pt.eve_bits += fe.bits;
        }
        out.push_back(pt);
    }
    return out;
}

std::vector<BerPoint> ber_monte_carlo(const SystemModel& model, const DesignPoint& design,
                                      const std::vector<double>& snr_db, int frames, std::uint64_t seed,
                                      const BerOptions& opt) {
    check_frames(frames);
    std::vector<BerPoint> out;
    for (std::size_t s = 0; s < snr_db.size(); ++s) {
        const FrameContext c = build_context(model, design, snr_db[s], opt);
        long long bob = 0, eve = 0, bits = 0;
#pragma omp parallel for schedule(static) reduction(+ : bob, eve, bits)
        for (int f = 0; f < frames; ++f) {
            const FrameErrors fe = run_frame(c, seed, s, f);
            bob += fe.bob;
            eve += fe.eve;
            bits += fe.bits;
        }
        BerPoint pt;
        pt.snr_db = snr_db[s];
        pt.bob_errors = bob;
        pt.eve_errors = eve;
        pt.bob_bits = bits;
        pt.eve_bits = bits;
        out.push_back(pt);
    }
    return out;
}

BerPoint qpsk_awgn_monte_carlo(double snr_db, long long frames, std::uint64_t seed) {
    const double n0 = std::pow(10.0, -snr_db / 10.0);
    long long errors = 0;
#pragma omp parallel for schedule(static) reduction(+ : errors)
    for (long long f = 0; f < frames; ++f) {
        Rng rng(derive_seed(seed, 0xA3, static_cast<std::uint64_t>(f)));
        const int bits = std::uniform_int_distribution<int>(0, 3)(rng);
        const cplx y = qpsk_modulate(bits) + complex_normal(rng, n0);
        errors += bit_errors(bits, qpsk_demodulate(y));
    }
    BerPoint pt;
    pt.snr_db = snr_db;
    pt.bob_errors = errors;
    pt.bob_bits = 2 * frames;
    return pt;
}

}  // namespace oamsec
