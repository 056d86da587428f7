#include "oamsec/oam.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "oamsec/error.hpp"
#include "oamsec/rng.hpp"

namespace oamsec {

cmat idft_matrix(int n, double initial_azimuth) {
    if (n < 1) throw ConfigError("IDFT size must be at least 1");
    cmat f(n, n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (int row = 0; row < n; ++row) {
        const double phi = 2.0 * kPi * row / n + initial_azimuth;
        for (int l = 0; l < n; ++l) f(row, l) = scale * std::polar(1.0, l * phi);
    }
    return f;
}

cvec zc_weights(int n, int u) {
    if (n < 2 || n % 2 != 0) throw ConfigError("ZC weights need an even N, got " + std::to_string(n));
    if (u < 1 || u >= n) throw ConfigError("ZC root U must satisfy 1 <= U < N");
    cvec w(n);
    for (int i = 0; i < n; ++i) {
        // Reduce U*i^2 mod 2N first so the phase argument stays small.
        const long long k = (static_cast<long long>(u) * i * i) % (2LL * n);
        w(i) = std::polar(1.0, kPi * static_cast<double>(k) / n);
    }
    return w;
}

double OamCodebook::index_bits() const { return std::log2(static_cast<double>(g())); }

namespace {

std::vector<std::vector<int>> combinations(const std::vector<int>& pool, int k) {
    std::vector<std::vector<int>> out;
    const int m = static_cast<int>(pool.size());
    if (k < 0 || k > m) return out;
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    while (true) {
        std::vector<int> c(k);
        for (int i = 0; i < k; ++i) c[i] = pool[idx[i]];
        out.push_back(std::move(c));
        int i = k - 1;
        while (i >= 0 && idx[i] == m - k + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
    return out;
}

}  // namespace

OamCodebook enumerate_sn_pairs(int n, int n_a, int n_s, int n_zz) {
    if (!(1 <= n_s && n_s <= n_a && n_a <= n))
        throw ConfigError("codebook needs 1 <= N_s <= N_A <= N");
    if (n_zz < 0 || n_zz > n - n_a) throw ConfigError("codebook needs 0 <= N_zz <= N - N_A");

    std::vector<int> low_rest, high;
    for (int l = 1; l < n_a; ++l) low_rest.push_back(l);
    for (int l = n_a; l < n; ++l) high.push_back(l);
    const auto sig = combinations(low_rest, n_s - 1);
    const auto an = combinations(high, n_zz);
    const double total = static_cast<double>(sig.size()) * static_cast<double>(an.size());
    if (total < 1.0) throw ConfigError("codebook is empty");
    const std::size_t g = std::size_t{1} << static_cast<int>(std::floor(std::log2(total) + 1e-12));

    OamCodebook cb{n, n_a, n_s, n_zz, {}};
    for (const auto& s : sig) {
        for (const auto& z : an) {
            if (cb.pairs.size() == g) break;
            SnPair p;
            p.signal.push_back(0);
            p.signal.insert(p.signal.end(), s.begin(), s.end());
            p.an = z;
            cb.pairs.push_back(std::move(p));
        }
        if (cb.pairs.size() == g) break;
    }
    return cb;
}

Basis oam_basis(int n, double initial_azimuth) {
    cmat f = idft_matrix(n, initial_azimuth);
    return {f, f.adjoint()};
}

Basis zc_basis(int n, double initial_azimuth, int u) {
    cmat f = idft_matrix(n, initial_azimuth);
    return {zc_weights(n, u).asDiagonal() * f, f.adjoint()};
}

Basis antenna_basis(int n) { return {cmat::Identity(n, n), cmat::Identity(n, n)}; }

TransmitState TransmitState::make(rvec p, double rho, double p_t, int n_zz) {
    TransmitState s;
    s.p = std::move(p);
    s.rho = rho;
    s.p_t = p_t;
    s.sigma_zz_sq = n_zz > 0 ? (1.0 - rho) * p_t / n_zz : 0.0;
    return s;
}

cmat ris2_incident(const ChannelSet& ch, const cvec& theta1) {
    return ch.r1r2 * theta1.conjugate().asDiagonal() * ch.ar1;
}

cvec assemble_transmit(const OamCodebook& cb, int pair_index, const cvec& symbols, const cvec& an_samples,
                       const TransmitState& state, const cmat& transmit) {
    if (pair_index < 0 || pair_index >= cb.g())
        throw ConfigError("SN pair index " + std::to_string(pair_index) + " out of range");
    const SnPair& pair = cb.pairs[pair_index];
    if (symbols.size() != static_cast<Eigen::Index>(pair.signal.size()) ||
        an_samples.size() != static_cast<Eigen::Index>(pair.an.size()) ||
        state.p.size() != static_cast<Eigen::Index>(pair.signal.size()))
        throw ConfigError("symbol, AN or power vector length does not match the SN pair");
    cvec s = cvec::Zero(transmit.cols());
    for (std::size_t i = 0; i < pair.signal.size(); ++i)
        s(pair.signal[i]) = std::sqrt(state.p(i)) * symbols(i);
    for (std::size_t i = 0; i < pair.an.size(); ++i) s(pair.an[i]) = an_samples(i);
    return transmit * s;
}

double ris2_radiated_power(const ChannelSet& ch, const RisState& ris, const TransmitState& state,
                           const SnPair& pair, const cmat& transmit, double sigma_r2) {
    const cmat amp = ris.a.cast<cplx>().asDiagonal() * ris2_incident(ch, ris.theta1);
    double total = sigma_r2 * ris.a.squaredNorm();
    for (std::size_t i = 0; i < pair.signal.size(); ++i)
        total += state.p(i) * (amp * transmit.col(pair.signal[i])).squaredNorm();
    for (int z : pair.an) total += state.sigma_zz_sq * (amp * transmit.col(z)).squaredNorm();
    return total;
}

BobEffective effective_channel_bob(const ChannelSet& ch, const RisState& ris, const SnPair& pair,
                                   const Basis& basis) {
    const int ns = static_cast<int>(pair.signal.size());
    const cmat tail = ch.r2b * ris.theta2.conjugate().asDiagonal();
    const cmat chain = tail * ris.a.cast<cplx>().asDiagonal() * ris2_incident(ch, ris.theta1);
    BobEffective eff;
    eff.h.resize(ns, ns);
    eff.noise_rows.resize(ns, ch.q2());
    for (int l = 0; l < ns; ++l) {
        const auto r = basis.receive.row(pair.signal[l]);
        eff.noise_rows.row(l) = r * tail;
        const Eigen::RowVectorXcd rc = r * chain;
        for (int k = 0; k < ns; ++k) eff.h(l, k) = rc * basis.transmit.col(pair.signal[k]);
    }
    return eff;
}

rvec sinr_bob(const BobEffective& eff, const rvec& p, const rvec& a, double sigma_r2, double sigma_b2) {
    const Eigen::Index ns = eff.h.rows();
    rvec gamma(ns);
    const rvec a2 = a.array().square();
    for (Eigen::Index l = 0; l < ns; ++l) {
        double interf = 0.0;
        for (Eigen::Index k = 0; k < ns; ++k)
            if (k != l) interf += p(k) * std::norm(eff.h(l, k));
        const double amp_noise = sigma_r2 * eff.noise_rows.row(l).cwiseAbs2().dot(a2.transpose());
        gamma(l) = p(l) * std::norm(eff.h(l, l)) / (interf + amp_noise + sigma_b2);
    }
    return gamma;
}

EveEffective effective_channel_eve(const ChannelSet& ch, const RisState& ris, const SnPair& pair,
                                   const cmat& transmit) {
    const int ns = static_cast<int>(pair.signal.size());
    const int nz = static_cast<int>(pair.an.size());
    if (pair.signal.back() >= ch.n_e())
        throw ConfigError("Eve needs at least " + std::to_string(pair.signal.back() + 1) + " antennas");
    const cmat comp = ch.ae + ch.r1e * ris.theta1.conjugate().asDiagonal() * ch.ar1;
    EveEffective eff;
    eff.h_signal.resize(ns, ns);
    eff.h_an.resize(ns, nz);
    for (int l = 0; l < ns; ++l) {
        const Eigen::RowVectorXcd row = comp.row(pair.signal[l]) * transmit;
        for (int k = 0; k < ns; ++k) eff.h_signal(l, k) = row(pair.signal[k]);
        for (int z = 0; z < nz; ++z) eff.h_an(l, z) = row(pair.an[z]);
    }
    return eff;
}

rvec sinr_eve(const EveEffective& eff, const rvec& p, double sigma_zz_sq, double sigma_e2) {
    const Eigen::Index ns = eff.h_signal.rows();
    rvec gamma(ns);
    for (Eigen::Index l = 0; l < ns; ++l) {
        double interf = 0.0;
        for (Eigen::Index k = 0; k < ns; ++k)
            if (k != l) interf += p(k) * std::norm(eff.h_signal(l, k));
        const double an = eff.h_an.cols() > 0 ? sigma_zz_sq * eff.h_an.row(l).squaredNorm() : 0.0;
        gamma(l) = p(l) * std::norm(eff.h_signal(l, l)) / (interf + an + sigma_e2);
    }
    return gamma;
}

RateReport rate_report(const ChannelSet& ch, const RisState& ris, const TransmitState& state,
                       const OamCodebook& cb, int pair_index, const Basis& basis, const NoiseLevels& noise) {
    const SnPair& pair = cb.pairs.at(pair_index);
    RateReport r;
    r.gamma_b = sinr_bob(effective_channel_bob(ch, ris, pair, basis), state.p, ris.a, noise.sigma_r2, noise.sigma_b2);
    r.gamma_e = sinr_eve(effective_channel_eve(ch, ris, pair, basis.transmit), state.p, state.sigma_zz_sq,
                         noise.sigma_e2);
    r.r_b = r.gamma_b.array().log1p().sum() / std::log(2.0);
    r.r_e = r.gamma_e.array().log1p().sum() / std::log(2.0);
    r.c_b = r.r_b + cb.index_bits();
    r.r_oam = r.c_b - r.r_e;
    r.ris2_power = ris2_radiated_power(ch, ris, state, pair, basis.transmit, noise.sigma_r2);
    return r;
}

rvec sinr_bob_mmse(const ChannelSet& ch, const RisState& ris, const SnPair& pair, const cmat& transmit,
                   const rvec& p, const NoiseLevels& noise) {
    const cmat tail = ch.r2b * ris.theta2.conjugate().asDiagonal() * ris.a.cast<cplx>().asDiagonal();
    const cmat chain = tail * ris2_incident(ch, ris.theta1);
    const int ns = static_cast<int>(pair.signal.size());
    cmat hs(chain.rows(), ns);
    for (int k = 0; k < ns; ++k) hs.col(k) = chain * transmit.col(pair.signal[k]);
    cmat cov = noise.sigma_r2 * tail * tail.adjoint();
    cov.diagonal().array() += noise.sigma_b2;
    for (int k = 0; k < ns; ++k) cov += p(k) * hs.col(k) * hs.col(k).adjoint();
    rvec gamma(ns);
    for (int k = 0; k < ns; ++k) {
        cmat c = cov - p(k) * hs.col(k) * hs.col(k).adjoint();
        const cvec sol = c.ldlt().solve(hs.col(k));
        gamma(k) = p(k) * std::max(0.0, hs.col(k).dot(sol).real());
    }
    return gamma;
}

Reception simulate_reception(const ChannelSet& ch, const RisState& ris, const cvec& x, const NoiseDraws& noise,
                             const cmat& receive) {
    const cvec x_r2 = ris2_incident(ch, ris.theta1) * x;
    const cvec reflected = ris.theta2.conjugate().asDiagonal() * (ris.a.cast<cplx>().asDiagonal() * (x_r2 + noise.n_r2));
    Reception out;
    out.y_b = ch.r2b * reflected + noise.n_b;
    out.y_e = (ch.ae + ch.r1e * ris.theta1.conjugate().asDiagonal() * ch.ar1) * x + noise.n_e;
    out.y_b_tilde = receive * out.y_b;
    return out;
}

namespace {

struct MixtureModel {
    std::vector<cmat> lower;
    rvec logdet;
    int dim = 0;
};

MixtureModel build_mixture(const ChannelSet& ch, const RisState& ris, const TransmitState& state,
                           const OamCodebook& cb, const Basis& basis, const NoiseLevels& noise) {
    const cmat tail = basis.receive * ch.r2b * ris.theta2.conjugate().asDiagonal() *
                      ris.a.cast<cplx>().asDiagonal();
    const cmat chain = tail * ris2_incident(ch, ris.theta1);
    cmat base = noise.sigma_r2 * tail * tail.adjoint() + noise.sigma_b2 * basis.receive * basis.receive.adjoint();
    MixtureModel m;
    m.dim = static_cast<int>(chain.rows());
    m.logdet.resize(cb.g());
    for (int g = 0; g < cb.g(); ++g) {
        const SnPair& pair = cb.pairs[g];
        cmat cov = base;
        for (std::size_t i = 0; i < pair.signal.size(); ++i) {
            const cvec h = chain * basis.transmit.col(pair.signal[i]);
            cov += state.p(i) * h * h.adjoint();
        }
        for (int z : pair.an) {
            const cvec h = chain * basis.transmit.col(z);
            cov += state.sigma_zz_sq * h * h.adjoint();
        }
        Eigen::LLT<cmat> llt(cov);
        if (llt.info() != Eigen::Success)
            throw NumericalError("receive covariance of SN pair " + std::to_string(g) +
                                 " is singular; add receiver noise to regularize");
        m.lower.push_back(llt.matrixL());
        m.logdet(g) = 2.0 * m.lower.back().diagonal().real().array().log().sum();
    }
    return m;
}

// log f_g(y) - log f(y) in nats for one draw from component g.
double kl_term(const MixtureModel& m, int g, std::uint64_t seed, int sample) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(g), static_cast<std::uint64_t>(sample)));
    const cvec w = complex_normal_vector(rng, m.dim, 1.0);
    const cvec y = m.lower[g] * w;
    const int G = static_cast<int>(m.lower.size());
    rvec logf(G);
    for (int i = 0; i < G; ++i) {
        const cvec u = m.lower[i].triangularView<Eigen::Lower>().solve(y);
        logf(i) = -m.logdet(i) - u.squaredNorm();
    }
    const double mx = logf.maxCoeff();
    const double lse = mx + std::log((logf.array() - mx).exp().sum());
    return logf(g) - (lse - std::log(static_cast<double>(G)));
}

McEstimate summarize(const std::vector<double>& terms, int G, int samples) {
    McEstimate est;
    double var_sum = 0.0, mean_sum = 0.0;
    for (int g = 0; g < G; ++g) {
        double mean = 0.0;
        for (int s = 0; s < samples; ++s) mean += terms[g * samples + s];
        mean /= samples;
        double var = 0.0;
        for (int s = 0; s < samples; ++s) var += (terms[g * samples + s] - mean) * (terms[g * samples + s] - mean);
        var /= std::max(1, samples - 1);
        mean_sum += mean;
        var_sum += var / samples;
    }
    est.value = mean_sum / G / std::log(2.0);
    est.stderr_ = std::sqrt(var_sum) / G / std::log(2.0);
    return est;
}

void check_mi_args(int samples) {
    if (samples < 2) throw ConfigError("index mutual information needs at least 2 samples");
}

}  // namespace

McEstimate index_mutual_info_mc_serial(const ChannelSet& ch, const RisState& ris, const TransmitState& state,
                                       const OamCodebook& cb, const Basis& basis, const NoiseLevels& noise,
                                       int samples, std::uint64_t seed) {
    check_mi_args(samples);
    if (cb.g() == 1) return {};
    const MixtureModel m = build_mixture(ch, ris, state, cb, basis, noise);
    std::vector<double> terms(static_cast<std::size_t>(cb.g()) * samples);
    for (int g = 0; g < cb.g(); ++g)
        for (int s = 0; s < samples; ++s) terms[g * samples + s] = kl_term(m, g, seed, s);
    return summarize(terms, cb.g(), samples);
}

McEstimate index_mutual_info_mc(const ChannelSet& ch, const RisState& ris, const TransmitState& state,
                                const OamCodebook& cb, const Basis& basis, const NoiseLevels& noise, int samples,
                                std::uint64_t seed) {
    check_mi_args(samples);
    if (cb.g() == 1) return {};
    const MixtureModel m = build_mixture(ch, ris, state, cb, basis, noise);
    const long long total = static_cast<long long>(cb.g()) * samples;
    std::vector<double> terms(total);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < total; ++i)
        terms[i] = kl_term(m, static_cast<int>(i / samples), seed, static_cast<int>(i % samples));
    return summarize(terms, cb.g(), samples);
}

}  // namespace oamsec
