#include "oamsec/convex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "oamsec/error.hpp"

namespace oamsec {

double power_objective(const PowerProblem& prob, const rvec& p) {
    const int n = prob.size();
    double total = 0.0;
    for (int l = 0; l < n; ++l) {
        const double all_b = prob.gains_bob.row(l).dot(p) + prob.c1(l);
        const double int_b = all_b - p(l) * prob.gains_bob(l, l);
        total += std::log1p(all_b / prob.sigma_b2) - prob.t_b(l) * (1.0 + int_b / prob.sigma_b2) +
                 std::log(prob.t_b(l)) + 1.0;
        const double all_e = prob.gains_eve.row(l).dot(p) + prob.c2(l);
        const double int_e = all_e - p(l) * prob.gains_eve(l, l);
        total -= prob.t_e(l) * (1.0 + all_e / prob.sigma_e2) - std::log1p(int_e / prob.sigma_e2) -
                 std::log(prob.t_e(l)) - 1.0;
    }
    return total;
}

rvec power_gradient(const PowerProblem& prob, const rvec& p) {
    const int n = prob.size();
    rvec grad = rvec::Zero(n);
    for (int l = 0; l < n; ++l) {
        const double all_b = prob.gains_bob.row(l).dot(p) + prob.c1(l);
        const double int_e = prob.gains_eve.row(l).dot(p) + prob.c2(l) - p(l) * prob.gains_eve(l, l);
        const double wb = 1.0 / (prob.sigma_b2 + all_b);
        const double we = 1.0 / (prob.sigma_e2 + int_e);
        for (int m = 0; m < n; ++m) {
            double d = prob.gains_bob(l, m) * wb - prob.t_e(l) * prob.gains_eve(l, m) / prob.sigma_e2;
            if (m != l) d += -prob.t_b(l) * prob.gains_bob(l, m) / prob.sigma_b2 + prob.gains_eve(l, m) * we;
            grad(m) += d;
        }
    }
    return grad;
}

namespace {

// argmin ||p - z|| over {p >= lo, sum p <= total}.
rvec project_floor_budget(const rvec& z, double lo, double total) {
    const Eigen::Index n = z.size();
    rvec p = z.cwiseMax(lo);
    if (p.sum() <= total) return p;
    // Water-fill u = z - lo onto the simplex scaled to r = total - n*lo.
    const double r = total - n * lo;
    std::vector<double> u(z.data(), z.data() + n);
    for (double& v : u) v -= lo;
    std::sort(u.begin(), u.end(), std::greater<>());
    double cum = 0.0, lambda = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        cum += u[k];
        const double cand = (cum - r) / static_cast<double>(k + 1);
        if (k + 1 == n || u[k + 1] <= cand) {
            lambda = cand;
            break;
        }
    }
    for (Eigen::Index i = 0; i < n; ++i) p(i) = lo + std::max(0.0, z(i) - lo - lambda);
    return p;
}

void check_power_feasible(const PowerProblem& prob) {
    const int n = prob.size();
    if (n == 0) throw ConfigError("power problem has no signal modes");
    if (prob.budget < n * prob.p_th * (1.0 - 1e-12))
        throw InfeasibleError("budget", "power budget rho*P_T is below N_s * p_th");
    if (std::isfinite(prob.ris2_limit)) {
        const double floor_power = prob.ris2_offset + prob.p_th * prob.ris2_coeff.sum();
        if (floor_power > prob.ris2_limit * (1.0 + 1e-12))
            throw InfeasibleError("ris2_power", "RIS2 power budget is violated even at p = p_th");
    }
}

}  // namespace

rvec project_power(const PowerProblem& prob, const rvec& y) {
    rvec p = project_floor_budget(y, prob.p_th, prob.budget);
    if (!std::isfinite(prob.ris2_limit)) return p;
    const rvec& c = prob.ris2_coeff;
    const double cap = prob.ris2_limit - prob.ris2_offset;
    if (c.dot(p) <= cap) return p;

    // Bisection on the RIS2 multiplier; c.p(lambda) is nonincreasing.
    double lo = 0.0, hi = 1.0 / std::max(c.maxCoeff(), 1e-300) * std::max(1.0, y.cwiseAbs().maxCoeff());
    rvec p_hi = project_floor_budget(y - hi * c, prob.p_th, prob.budget);
    for (int i = 0; i < 2000 && c.dot(p_hi) > cap; ++i) {
        lo = hi;
        hi *= 2.0;
        p_hi = project_floor_budget(y - hi * c, prob.p_th, prob.budget);
    }
    for (int i = 0; i < 200 && hi - lo > 1e-16 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        const rvec pm = project_floor_budget(y - mid * c, prob.p_th, prob.budget);
        if (c.dot(pm) > cap) {
            lo = mid;
        } else {
            hi = mid;
            p_hi = pm;
        }
    }
    return p_hi;
}

rvec solve_power(const PowerProblem& prob, double tolerance) {
    check_power_feasible(prob);
    const int n = prob.size();
    return solve_power(prob, rvec::Constant(n, prob.budget / n), tolerance);
}

rvec solve_power(const PowerProblem& prob, const rvec& start, double tolerance) {
    check_power_feasible(prob);
    // Work in units of the budget so the tolerance is relative.
    const double scale = prob.budget;
    auto f = [&](const rvec& x) { return power_objective(prob, scale * x); };
    auto grad = [&](const rvec& x) { return rvec(scale * power_gradient(prob, scale * x)); };
    auto proj = [&](const rvec& x) { return rvec(project_power(prob, scale * x) / scale); };

    rvec x = proj(start / scale);
    double fx = f(x);
    rvec g = grad(x);
    double alpha = 1.0 / std::max(g.cwiseAbs().maxCoeff(), 1e-12);
    for (int it = 0; it < 20000; ++it) {
        const double stat = (proj(x + g) - x).cwiseAbs().maxCoeff();
        if (stat <= tolerance) break;
        const rvec d = proj(x + alpha * g) - x;
        const double gd = g.dot(d);
        if (!(gd > 0.0)) break;
        double lam = 1.0;
        rvec xn = x + d;
        double fn = f(xn);
        while (fn < fx + 1e-4 * lam * gd && lam > 1e-30) {
            lam *= 0.5;
            xn = x + lam * d;
            fn = f(xn);
        }
        if (fn < fx) break;
        const rvec s = xn - x;
        const rvec gn = grad(xn);
        const double sy = s.dot(gn - g);
        alpha = sy < 0.0 ? std::clamp(s.squaredNorm() / -sy, 1e-12, 1e12) : 1e12;
        x = xn;
        fx = fn;
        g = gn;
        if (s.cwiseAbs().maxCoeff() <= 1e-16) break;
    }
    return project_power(prob, scale * x);
}

double amplifier_objective(const AmplifierProblem& prob, const rvec& a) {
    return -a.dot(prob.omega.real() * a) + 2.0 * a.dot(prob.g.real());
}

namespace {

// Coordinate ascent for max -a^T M a + 2 b^T a over the box [0, a_max]^Q.
// M is often rank deficient, so iterates can creep along its null space long
// after the objective has settled; stop on the exact per-sweep objective gain.
void box_qp(const rmat& m, const rvec& b, double a_max, rvec& a) {
    const Eigen::Index q = b.size();
    rvec ma = m * a;
    for (int sweep = 0; sweep < 20000; ++sweep) {
        double gain = 0.0;
        for (Eigen::Index i = 0; i < q; ++i) {
            const double r = b(i) - ma(i) + m(i, i) * a(i);
            double v;
            if (m(i, i) > 1e-300)
                v = std::clamp(r / m(i, i), 0.0, a_max);
            else
                v = r > 0.0 ? a_max : 0.0;
            const double step = v - a(i);
            if (step == 0.0) continue;
            // f(a + step e_i) - f(a) = 2 step (b_i - (Ma)_i) - m_ii step^2
            gain += 2.0 * step * (b(i) - ma(i)) - m(i, i) * step * step;
            ma += step * m.col(i);
            a(i) = v;
        }
        const double scale = std::abs(a.dot(ma)) + std::abs(2.0 * a.dot(b));
        if (gain <= 1e-15 * std::max(scale, 1e-300)) return;
    }
}

}  // namespace

rvec solve_amplifier(const AmplifierProblem& prob, double tolerance) {
    const int q = prob.size();
    if (prob.a_max <= 0.0) return rvec::Zero(q);
    const rmat m0 = 0.5 * (prob.omega.real() + prob.omega.real().transpose());
    const rvec b = prob.g.real();
    rvec a = rvec::Zero(q);
    box_qp(m0, b, prob.a_max, a);
    if (!std::isfinite(prob.limit) || a.dot(prob.power_quadratic * a) <= prob.limit) return a;

    const rmat pn = prob.power_quadratic / prob.limit;
    auto power = [&](const rvec& v) { return v.dot(pn * v); };
    double lo = 0.0, hi = std::max(1.0, m0.cwiseAbs().maxCoeff() / std::max(pn.cwiseAbs().maxCoeff(), 1e-300));
    rvec a_hi = a;
    box_qp(m0 + hi * pn, b, prob.a_max, a_hi);
    for (int i = 0; i < 2000 && power(a_hi) > 1.0; ++i) {
        lo = hi;
        hi *= 2.0;
        box_qp(m0 + hi * pn, b, prob.a_max, a_hi);
    }
    rvec a_mid = a_hi;
    for (int i = 0; i < 200 && hi - lo > std::max(tolerance * 1e-6, 1e-16) * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        box_qp(m0 + mid * pn, b, prob.a_max, a_mid);
        if (power(a_mid) > 1.0) {
            lo = mid;
        } else {
            hi = mid;
            a_hi = a_mid;
        }
    }
    // Land exactly on the feasible side.
    const double pw = power(a_hi);
    if (pw > 1.0) a_hi /= std::sqrt(pw);
    return a_hi;
}

}  // namespace oamsec
