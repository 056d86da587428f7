#include "oamsec/validate.hpp"

#include <cmath>
#include <functional>
#include <string>

#include "oamsec/rng.hpp"

namespace oamsec {

SystemModel random_model(const RandomModelOptions& opt, std::uint64_t seed) {
    Rng rng(derive_seed(seed, 0x5EED));
    SystemModel m;
    auto draw = [&](int rows, int cols, double var) {
        cmat h(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) h(i, j) = complex_normal(rng, var);
        return h;
    };
    // Cascade gain per stream ~ N * q1 * q2 * var^3 * a^2; keep it near one.
    const double v = 1.0 / std::cbrt(double(opt.n) * opt.q1 * opt.q2);
    m.channels.ar1 = draw(opt.q1, opt.n, v);
    m.channels.r1r2 = draw(opt.q2, opt.q1, v);
    m.channels.r2b = draw(opt.n, opt.q2, v);
    m.channels.ae = draw(opt.n_e, opt.n, 0.3 / opt.n);
    m.channels.r1e = draw(opt.n_e, opt.q1, 0.3 / (opt.n * opt.q1));
    m.basis = oam_basis(opt.n);
    m.codebook = enumerate_sn_pairs(opt.n, opt.n_a, opt.n_s, opt.n_zz);
    m.noise = NoiseLevels{0.05, 0.05, 0.01};
    m.p_t = opt.p_t;
    m.rho = opt.rho;
    m.a_max = opt.a_max;
    m.p_r2 = 0.5 * opt.p_t;
    m.p_th = 1e-3 * m.budget() / m.n_s();
    return m;
}

DesignPoint random_design(const SystemModel& model, std::uint64_t seed) {
    Rng rng(derive_seed(seed, 0xD351));
    std::uniform_real_distribution<double> u(0.2, 1.0);
    DesignPoint d;
    d.ris.theta1 = random_phases(rng, model.channels.q1());
    d.ris.theta2 = random_phases(rng, model.channels.q2());
    d.p.resize(model.n_s());
    for (int i = 0; i < model.n_s(); ++i) d.p(i) = u(rng);
    d.p *= model.budget() / d.p.sum() * 0.9;
    d.ris.a.resize(model.channels.q2());
    for (int i = 0; i < model.channels.q2(); ++i) d.ris.a(i) = model.a_max * u(rng);
    if (std::isfinite(model.p_r2)) {
        const double pw = ris2_power(model, d);
        if (pw > model.p_r2) d.ris.a *= std::sqrt(0.9 * model.p_r2 / pw);
    }
    return d;
}

namespace {

// Central differences over real and imaginary parts; returns the relative error.
double fd_relative_error(const std::function<double(const cvec&)>& f, const cvec& x, const cvec& grad) {
    const double h = 1e-6;
    cvec fd(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        cvec xp = x, xm = x;
        xp(i) += h;
        xm(i) -= h;
        const double dre = (f(xp) - f(xm)) / (2 * h);
        xp = x;
        xm = x;
        xp(i) += cplx(0, h);
        xm(i) -= cplx(0, h);
        const double dim = (f(xp) - f(xm)) / (2 * h);
        fd(i) = cplx(dre, dim);
    }
    return (fd - grad).norm() / std::max(grad.norm(), 1e-300);
}

}  // namespace

bool run_validation(std::ostream& out) {
    bool all = true;
    auto check = [&](const std::string& name, bool ok) {
        out << (ok ? "PASS " : "FAIL ") << name << '\n';
        all = all && ok;
    };

    bool unitary = true;
    for (int n : {2, 4, 8, 16}) {
        const cmat f = idft_matrix(n);
        unitary = unitary && (f.adjoint() * f - cmat::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12;
    }
    check("idft unitary", unitary);

    const OamCodebook cb = enumerate_sn_pairs(8, 4, 3, 3);
    bool mode0 = cb.g() == 8;
    for (const SnPair& p : cb.pairs) mode0 = mode0 && p.signal.front() == 0;
    check("codebook G=8 with mode 0 in every signal set", mode0);

    UcaSpec tx{Vec3::Zero(), 0.5, 8, 0.0, {}};
    UcaSpec rx{Vec3(0, 0, 5), 0.5, 8, 0.0, {}};
    const cmat h = los_channel(uca_element_positions(tx), uca_element_positions(rx), 1.0, kSpeedOfLight / 28e9);
    const cmat f = idft_matrix(8);
    const cmat dg = f.adjoint() * h * f;
    const double off = (dg - cmat(dg.diagonal().asDiagonal())).cwiseAbs().maxCoeff();
    check("coaxial UCAs diagonalized by the DFT", off / dg.diagonal().cwiseAbs().minCoeff() < 1e-8);

    double worst = 0.0;
    for (std::uint64_t s = 0; s < 3; ++s) {
        const SystemModel m = random_model({}, s);
        const DesignPoint d = random_design(m, s);
        const Theta1Objective o1(m, d);
        const Theta2Objective o2(m, d);
        worst = std::max(worst, fd_relative_error([&](const cvec& x) { return o1.value(x); }, d.ris.theta1,
                                                  o1.egrad(d.ris.theta1)));
        worst = std::max(worst, fd_relative_error([&](const cvec& x) { return o2.value(x); }, d.ris.theta2,
                                                  o2.egrad(d.ris.theta2)));
    }
    check("phase gradients match finite differences", worst < 1e-5);

    const SystemModel m = random_model({}, 7);
    AoConfig cfg;
    cfg.max_outer_iters = 50;
    const AoResult r = alternating_optimize(m, random_design(m, 7), cfg);
    bool mono = true;
    double prev = r.trace.initial.r_oam;
    for (const AoRecord& rec : r.trace.records) {
        if (!rec.repaired && rec.r_oam < prev - 1e-6) mono = false;
        prev = rec.r_oam;
    }
    check("alternating optimization monotone on repair-free iterations", mono);
    check("alternating optimization keeps RIS2 power within budget", ris2_power(m, r.design) <= m.p_r2 * (1 + 1e-9));
    return all;
}

}  // namespace oamsec
