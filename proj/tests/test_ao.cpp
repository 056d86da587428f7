#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "oamsec/ao.hpp"
#include "oamsec/rng.hpp"
#include "oamsec/validate.hpp"
#include "oracles.hpp"

using namespace oamsec;

TEST_CASE("theta objectives agree with the oracle rates") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const SystemModel m = random_model({}, seed);
        const DesignPoint d = random_design(m, seed + 50);
        const oracle::Rates o = oracle::rates(m, d.ris.theta1, d.ris.theta2, d.ris.a, d.p);
        CHECK(Theta1Objective(m, d).value(d.ris.theta1) == doctest::Approx(-(o.r_b - o.r_e)).epsilon(1e-10));
        CHECK(Theta2Objective(m, d).value(d.ris.theta2) == doctest::Approx(-o.r_b).epsilon(1e-10));

        Rng rng(seed);
        const cvec t1 = random_phases(rng, m.channels.q1());
        const cvec t2 = random_phases(rng, m.channels.q2());
        const oracle::Rates o1 = oracle::rates(m, t1, d.ris.theta2, d.ris.a, d.p);
        const oracle::Rates o2 = oracle::rates(m, d.ris.theta1, t2, d.ris.a, d.p);
        CHECK(Theta1Objective(m, d).value(t1) == doctest::Approx(-(o1.r_b - o1.r_e)).epsilon(1e-10));
        CHECK(Theta2Objective(m, d).value(t2) == doctest::Approx(-o2.r_b).epsilon(1e-10));
    }
}

TEST_CASE("theta gradients match finite differences of the oracle") {
    RandomModelOptions opt;
    opt.n_s = 1;
    opt.n_zz = 1;
    for (const RandomModelOptions& o : {RandomModelOptions{}, opt}) {
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const SystemModel m = random_model(o, seed);
            const DesignPoint d = random_design(m, seed + 7);
            const cvec g1 = egrad_theta1(m, d);
            const cvec fd1 = oracle::fd_gradient(
                [&](const cvec& t) {
                    const auto r = oracle::rates(m, t, d.ris.theta2, d.ris.a, d.p);
                    return -(r.r_b - r.r_e);
                },
                d.ris.theta1);
            CHECK(oracle::relative_error(g1, fd1) < 1e-6);
            const cvec g2 = egrad_theta2(m, d);
            const cvec fd2 = oracle::fd_gradient(
                [&](const cvec& t) { return -oracle::rates(m, d.ris.theta1, t, d.ris.a, d.p).r_b; }, d.ris.theta2);
            CHECK(oracle::relative_error(g2, fd2) < 1e-6);
        }
    }
}

TEST_CASE("update_t gives the tight maximizers of the log bounds") {
    const SystemModel m = random_model({}, 3);
    const DesignPoint d = random_design(m, 4);
    PowerProblem prob = build_power_problem(m, d);
    const oracle::Rates o = oracle::rates(m, d.ris.theta1, d.ris.theta2, d.ris.a, d.p);
    CHECK(power_objective(prob, d.p) == doctest::Approx((o.r_b - o.r_e) * std::log(2.0)).epsilon(1e-10));

    const auto [tb, te] = update_t(prob, d.p);
    CHECK((tb - prob.t_b).norm() < 1e-15);
    CHECK((te - prob.t_e).norm() < 1e-15);
    const double best = power_objective(prob, d.p);
    for (double f : {0.5, 0.9, 1.1, 2.0}) {
        PowerProblem moved = prob;
        moved.t_b *= f;
        CHECK(power_objective(moved, d.p) < best);
        moved = prob;
        moved.t_e *= f;
        CHECK(power_objective(moved, d.p) < best);
    }
}

TEST_CASE("MMSE at the optimal receiver equals 1 / (1 + SINR)") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const SystemModel m = random_model({}, seed);
        const DesignPoint d = random_design(m, seed + 3);
        const BobEffective eff = effective_channel_bob(m.channels, d.ris, m.pair(), m.basis);
        const auto [tau, omega] = update_tau_omega(eff, d.p, d.ris.a, m.noise.sigma_r2, m.noise.sigma_b2);
        const rvec gamma = sinr_bob(eff, d.p, d.ris.a, m.noise.sigma_r2, m.noise.sigma_b2);
        const rvec e = mse(eff, d.p, d.ris.a, tau, m.noise.sigma_r2, m.noise.sigma_b2);
        for (int l = 0; l < m.n_s(); ++l) {
            CHECK(e(l) == doctest::Approx(1.0 / (1.0 + gamma(l))).epsilon(1e-12));
            CHECK(omega(l) == doctest::Approx(1.0 + gamma(l)).epsilon(1e-12));
            // tau minimizes the MSE along any perturbation.
            for (cplx dt : {cplx(1e-3, 0), cplx(0, 1e-3), cplx(-1e-3, 2e-3)}) {
                cvec moved = tau;
                moved(l) += dt;
                CHECK(mse(eff, d.p, d.ris.a, moved, m.noise.sigma_r2, m.noise.sigma_b2)(l) > e(l));
            }
        }
    }
}

TEST_CASE("amplifier objective equals the negative weighted MSE up to its gain-free part") {
    const SystemModel m = random_model({}, 9);
    const DesignPoint d = random_design(m, 10);
    const BobEffective eff = effective_channel_bob(m.channels, d.ris, m.pair(), m.basis);
    const auto [tau, omega] = update_tau_omega(eff, d.p, d.ris.a, m.noise.sigma_r2, m.noise.sigma_b2);
    const AmplifierProblem prob = build_amplifier_problem(m, d, tau, omega);

    Rng rng(11);
    std::uniform_real_distribution<double> u(0.0, m.a_max);
    for (int trial = 0; trial < 10; ++trial) {
        DesignPoint moved = d;
        for (int q = 0; q < moved.ris.a.size(); ++q) moved.ris.a(q) = u(rng);
        const BobEffective em = effective_channel_bob(m.channels, moved.ris, m.pair(), m.basis);
        const rvec e = mse(em, d.p, moved.ris.a, tau, m.noise.sigma_r2, m.noise.sigma_b2);
        // sum_l omega_l e_l = -f(a) + sum_l omega_l (1 + |tau_l|^2 sigma_B^2)
        const double constant = omega.dot((1.0 + tau.cwiseAbs2().array() * m.noise.sigma_b2).matrix());
        CHECK(amplifier_objective(prob, moved.ris.a) - constant == doctest::Approx(-omega.dot(e)).epsilon(1e-10));
        CHECK(moved.ris.a.dot(prob.power_quadratic * moved.ris.a) ==
              doctest::Approx(ris2_power(m, moved)).epsilon(1e-10));
    }
}

TEST_CASE("initial design") {
    SystemModel m = random_model({}, 2);
    m.p_r2 = 0.5;
    const DesignPoint d = initial_design(m, 7);
    CHECK((d.ris.theta1.cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-14);
    CHECK((d.ris.theta2.cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-14);
    CHECK(d.p.sum() == doctest::Approx(m.budget()));
    CHECK(ris2_power(m, d) <= m.p_r2 * (1.0 + 1e-12));
    CHECK(d.ris.a.maxCoeff() <= m.a_max);
    CHECK((initial_design(m, 7).ris.theta1 - d.ris.theta1).norm() == 0.0);
    CHECK((initial_design(m, 8).ris.theta1 - d.ris.theta1).norm() > 0.0);
}

TEST_CASE("alternating optimization never lowers the secrecy rate") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        SystemModel m = random_model({}, seed);
        if (seed % 2 == 0) m.p_r2 = 2.0;
        AoConfig cfg;
        cfg.seed = seed;
        cfg.max_outer_iters = 40;
        const AoResult r = alternating_optimize(m, cfg);
        double prev = r.trace.initial.r_oam;
        for (const AoRecord& rec : r.trace.records) {
            CHECK(rec.r_oam >= prev - 1e-6);
            prev = rec.r_oam;
        }
        CHECK(r.report.r_oam >= r.trace.initial.r_oam);
        CHECK(r.report.r_oam == doctest::Approx(evaluate(m, r.design).r_oam).epsilon(1e-12));
        CHECK(r.design.p.sum() <= m.budget() * (1.0 + 1e-9));
        CHECK(r.design.p.minCoeff() >= m.p_th * (1.0 - 1e-9));
        CHECK(r.design.ris.a.maxCoeff() <= m.a_max + 1e-12);
        CHECK(r.design.ris.a.minCoeff() >= -1e-12);
        if (std::isfinite(m.p_r2)) CHECK(ris2_power(m, r.design) <= m.p_r2 * (1.0 + 1e-6));
        CHECK((r.design.ris.theta1.cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("disabled blocks stay at their starting values") {
    SystemModel m = random_model({}, 5);
    m.p_r2 = std::numeric_limits<double>::infinity();
    const DesignPoint start = initial_design(m, 1);
    AoConfig cfg;
    cfg.max_outer_iters = 10;

    AoFlags only_theta;
    only_theta.power = false;
    only_theta.amplifier = false;
    const AoResult a = alternating_optimize(m, start, cfg, only_theta);
    CHECK((a.design.p - start.p).norm() == 0.0);
    CHECK((a.design.ris.a - start.ris.a).norm() == 0.0);

    AoFlags no_phases;
    no_phases.theta1 = false;
    no_phases.theta2 = false;
    const AoResult b = alternating_optimize(m, start, cfg, no_phases);
    CHECK((b.design.ris.theta1 - start.ris.theta1).norm() == 0.0);
    CHECK((b.design.ris.theta2 - start.ris.theta2).norm() == 0.0);

    const AoResult c = alternating_optimize(m, start, cfg, AoFlags{false, false, false, false});
    CHECK(c.report.r_oam == doctest::Approx(evaluate(m, start).r_oam));
    CHECK(c.converged);
}

TEST_CASE("RIS2 repair only rescales the gains uniformly") {
    SystemModel m = random_model({}, 5);
    m.p_r2 = 0.05;
    const DesignPoint start = initial_design(m, 1);
    AoConfig cfg;
    cfg.max_outer_iters = 10;
    AoFlags only_theta;
    only_theta.power = false;
    only_theta.amplifier = false;
    const AoResult r = alternating_optimize(m, start, cfg, only_theta);
    const double scale = r.design.ris.a(0) / start.ris.a(0);
    CHECK(scale <= 1.0 + 1e-15);
    CHECK((r.design.ris.a - scale * start.ris.a).norm() < 1e-12);
    CHECK(ris2_power(m, r.design) <= m.p_r2 * (1.0 + 1e-9));
}
