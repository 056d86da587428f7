#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oamsec/convex.hpp"
#include "oamsec/error.hpp"
#include "oamsec/rng.hpp"
#include "oracles.hpp"

using namespace oamsec;

namespace {

struct Interference {
    double all_b, int_b, all_e, int_e;
};

Interference terms(const PowerProblem& pr, const rvec& p, int l) {
    const double all_b = pr.gains_bob.row(l).dot(p) + pr.c1(l);
    const double all_e = pr.gains_eve.row(l).dot(p) + pr.c2(l);
    return {all_b, all_b - p(l) * pr.gains_bob(l, l), all_e, all_e - p(l) * pr.gains_eve(l, l)};
}

// Bob rate minus Eve rate in nats, straight from the SINR definitions.
double secrecy_nats(const PowerProblem& pr, const rvec& p) {
    double total = 0.0;
    for (int l = 0; l < pr.size(); ++l) {
        const Interference t = terms(pr, p, l);
        total += std::log1p(p(l) * pr.gains_bob(l, l) / (pr.sigma_b2 + t.int_b));
        total -= std::log1p(p(l) * pr.gains_eve(l, l) / (pr.sigma_e2 + t.int_e));
    }
    return total;
}

void set_tight(PowerProblem& pr, const rvec& p) {
    for (int l = 0; l < pr.size(); ++l) {
        const Interference t = terms(pr, p, l);
        pr.t_b(l) = 1.0 / (1.0 + t.int_b / pr.sigma_b2);
        pr.t_e(l) = 1.0 / (1.0 + t.all_e / pr.sigma_e2);
    }
}

PowerProblem random_power_problem(Rng& rng, int n) {
    std::uniform_real_distribution<double> u(0.05, 1.0);
    PowerProblem pr;
    pr.gains_bob = rmat(n, n);
    pr.gains_eve = rmat(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            pr.gains_bob(i, j) = i == j ? 2.0 + 4.0 * u(rng) : 0.3 * u(rng);
            pr.gains_eve(i, j) = u(rng);
        }
    pr.c1 = rvec(n);
    pr.c2 = rvec(n);
    for (int i = 0; i < n; ++i) {
        pr.c1(i) = 0.1 * u(rng);
        pr.c2(i) = 0.2 * u(rng);
    }
    pr.sigma_b2 = 0.2;
    pr.sigma_e2 = 0.5;
    pr.budget = 1.0 + u(rng);
    pr.p_th = 0.01;
    pr.ris2_coeff = rvec(n);
    for (int i = 0; i < n; ++i) pr.ris2_coeff(i) = u(rng);
    pr.t_b = rvec::Ones(n);
    pr.t_e = rvec::Ones(n);
    set_tight(pr, rvec::Constant(n, pr.budget / n));
    return pr;
}

bool feasible(const PowerProblem& pr, const rvec& p, double tol) {
    if ((p.array() < pr.p_th - tol).any()) return false;
    if (p.sum() > pr.budget + tol) return false;
    if (std::isfinite(pr.ris2_limit) && pr.ris2_coeff.dot(p) + pr.ris2_offset > pr.ris2_limit + tol) return false;
    return true;
}

AmplifierProblem random_amplifier_problem(Rng& rng, int q) {
    cmat b(q + 1, q);
    for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = complex_normal(rng, 1.0);
    AmplifierProblem pr;
    pr.omega = b.adjoint() * b;
    pr.g = complex_normal_vector(rng, q, 4.0);
    rmat c(q, q);
    for (Eigen::Index i = 0; i < c.size(); ++i) c.data()[i] = std::abs(complex_normal(rng, 1.0));
    pr.power_quadratic = c.transpose() * c;
    pr.a_max = 3.0;
    return pr;
}

}  // namespace

TEST_CASE("power objective is a minorant that is tight at the anchor") {
    Rng rng(1);
    for (int trial = 0; trial < 20; ++trial) {
        PowerProblem pr = random_power_problem(rng, 1 + trial % 3);
        const int n = pr.size();
        const rvec anchor = rvec::Constant(n, pr.budget / n);
        CHECK(power_objective(pr, anchor) == doctest::Approx(secrecy_nats(pr, anchor)).epsilon(1e-12));
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int k = 0; k < 10; ++k) {
            rvec p(n);
            for (int i = 0; i < n; ++i) p(i) = pr.budget * u(rng) / n;
            CHECK(power_objective(pr, p) <= secrecy_nats(pr, p) + 1e-12);
        }
    }
}

TEST_CASE("power gradient matches finite differences") {
    Rng rng(2);
    for (int trial = 0; trial < 10; ++trial) {
        const PowerProblem pr = random_power_problem(rng, 3);
        const rvec p = rvec::Constant(3, 0.4) + 0.2 * rvec::Random(3);
        const rvec g = power_gradient(pr, p);
        for (int i = 0; i < 3; ++i) {
            rvec pp = p, pm = p;
            pp(i) += 1e-6;
            pm(i) -= 1e-6;
            CHECK(g(i) == doctest::Approx((power_objective(pr, pp) - power_objective(pr, pm)) / 2e-6).epsilon(1e-6));
        }
    }
}

TEST_CASE("power projection is feasible, idempotent and satisfies the obtuse-angle property") {
    Rng rng(3);
    std::normal_distribution<double> nd(0.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        PowerProblem pr = random_power_problem(rng, 2 + trial % 3);
        const int n = pr.size();
        if (trial % 2 == 0) pr.ris2_limit = 0.6 * pr.ris2_coeff.maxCoeff() * pr.budget;
        rvec y(n);
        for (int i = 0; i < n; ++i) y(i) = nd(rng);
        const rvec p = project_power(pr, y);
        CHECK(feasible(pr, p, 1e-12));
        CHECK((project_power(pr, p) - p).norm() < 1e-12);
        // (y - P y) . (z - P y) <= 0 for every feasible z.
        for (int k = 0; k < 50; ++k) {
            rvec z(n);
            for (int i = 0; i < n; ++i) z(i) = pr.p_th + std::abs(nd(rng)) * pr.budget / n;
            if (!feasible(pr, z, 0.0)) continue;
            CHECK((y - p).dot(z - p) <= 1e-10);
        }
    }
}

TEST_CASE("power solver matches a grid search") {
    Rng rng(4);
    for (int trial = 0; trial < 10; ++trial) {
        PowerProblem pr = random_power_problem(rng, 2);
        if (trial % 2 == 1) pr.ris2_limit = 0.5 * (pr.ris2_coeff.minCoeff() + pr.ris2_coeff.maxCoeff()) * pr.budget / 2;
        const rvec p = solve_power(pr, 1e-10);
        CHECK(feasible(pr, p, 1e-9));
        const auto grid = oracle::grid_maximize(
            [&](const std::vector<double>& x) { return power_objective(pr, rvec::Map(x.data(), 2)); },
            [&](const std::vector<double>& x) { return feasible(pr, rvec::Map(x.data(), 2), 0.0); },
            {pr.p_th, pr.p_th}, {pr.budget, pr.budget}, 81, 8);
        REQUIRE(!grid.x.empty());
        CHECK(power_objective(pr, p) >= grid.value - 1e-6);
    }
}

TEST_CASE("single-mode power solver spends what the objective rewards") {
    PowerProblem pr;
    pr.gains_bob = rmat::Constant(1, 1, 4.0);
    pr.gains_eve = rmat::Constant(1, 1, 0.5);
    pr.c1 = rvec::Zero(1);
    pr.c2 = rvec::Zero(1);
    pr.t_b = rvec::Ones(1);
    pr.t_e = rvec::Ones(1);
    pr.sigma_b2 = 1.0;
    pr.sigma_e2 = 1.0;
    pr.budget = 5.0;
    pr.ris2_coeff = rvec::Ones(1);
    set_tight(pr, rvec::Ones(1));
    // f(p) = log(1 + 4p) - t_e (1 + p/2) + const peaks at 2/t_e - 1/4, clipped to the budget.
    const double want = std::min(5.0, 2.0 / pr.t_e(0) - 0.25);
    CHECK(solve_power(pr)(0) == doctest::Approx(want).epsilon(1e-6));
}

TEST_CASE("power solver reports the violated constraint") {
    Rng rng(5);
    PowerProblem pr = random_power_problem(rng, 3);
    pr.p_th = pr.budget;
    try {
        solve_power(pr);
        FAIL("expected an infeasible budget");
    } catch (const InfeasibleError& e) {
        CHECK(e.constraint() == "budget");
    }
    pr = random_power_problem(rng, 3);
    pr.ris2_offset = 1.0;
    pr.ris2_limit = 0.5;
    try {
        solve_power(pr);
        FAIL("expected an infeasible RIS2 budget");
    } catch (const InfeasibleError& e) {
        CHECK(e.constraint() == "ris2_power");
    }
}

TEST_CASE("amplifier objective formula") {
    Rng rng(6);
    const AmplifierProblem pr = random_amplifier_problem(rng, 4);
    const rvec a = rvec::Random(4);
    const cvec ac = a.cast<cplx>();
    const double want = -(ac.dot(pr.omega * ac)).real() + 2.0 * (ac.transpose() * pr.g)(0).real();
    CHECK(amplifier_objective(pr, a) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("amplifier solver matches a grid search") {
    Rng rng(7);
    for (int trial = 0; trial < 12; ++trial) {
        AmplifierProblem pr = random_amplifier_problem(rng, 2);
        if (trial % 3 != 0) pr.limit = 0.3 * trial;
        const rvec a = solve_amplifier(pr);
        auto ok = [&](const rvec& v) {
            return (v.array() >= 0.0).all() && (v.array() <= pr.a_max).all() &&
                   (!std::isfinite(pr.limit) || v.dot(pr.power_quadratic * v) <= pr.limit);
        };
        CHECK(ok(a));
        const auto grid = oracle::grid_maximize(
            [&](const std::vector<double>& x) { return amplifier_objective(pr, rvec::Map(x.data(), 2)); },
            [&](const std::vector<double>& x) { return ok(rvec::Map(x.data(), 2)); }, {0.0, 0.0},
            {pr.a_max, pr.a_max}, 81, 8);
        REQUIRE(!grid.x.empty());
        CHECK(amplifier_objective(pr, a) >= grid.value - 1e-6);
    }
}

TEST_CASE("amplifier solver edge cases") {
    Rng rng(8);
    AmplifierProblem pr = random_amplifier_problem(rng, 5);
    pr.a_max = 0.0;
    CHECK(solve_amplifier(pr).norm() == 0.0);

    // Rank-deficient curvature with a gain pointing along the null space pins the bound.
    pr = random_amplifier_problem(rng, 3);
    pr.omega = cmat::Zero(3, 3);
    pr.g = cvec::Constant(3, cplx(1.0, 5.0));
    const rvec a = solve_amplifier(pr);
    CHECK((a - rvec::Constant(3, pr.a_max)).norm() == 0.0);
    pr.limit = 1.0;
    const rvec b = solve_amplifier(pr);
    CHECK(b.dot(pr.power_quadratic * b) <= 1.0 + 1e-12);
    CHECK(b.dot(pr.power_quadratic * b) >= 1.0 - 1e-6);
}
