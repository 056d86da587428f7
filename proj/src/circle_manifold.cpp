#include "oamsec/circle_manifold.hpp"

#include <cmath>

#include "oamsec/error.hpp"

namespace oamsec {

CirclePoint::CirclePoint(cvec values) : values_(std::move(values)) {
    for (Eigen::Index i = 0; i < values_.size(); ++i)
        if (std::abs(std::abs(values_(i)) - 1.0) > 1e-10) throw ConfigError("circle point entry off the unit circle");
}

CirclePoint CirclePoint::normalized(const cvec& values) {
    CirclePoint p;
    p.values_.resize(values.size());
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        const double m = std::abs(values(i));
        if (m == 0.0) throw RetractionError("cannot normalize a zero entry onto the unit circle");
        p.values_(i) = values(i) / m;
    }
    return p;
}

double inner(const cvec& x, const cvec& y) { return x.dot(y).real(); }

namespace {

cvec project(const cvec& theta, const cvec& v) {
    // v - Re{v o conj(theta)} o theta
    return v - (v.array() * theta.array().conjugate()).real().cast<cplx>().matrix().cwiseProduct(theta);
}

}  // namespace

TangentVector riemannian_grad(const CirclePoint& point, const cvec& egrad) {
    return {project(point.values(), egrad), point};
}

TangentVector transport(const CirclePoint& to, const TangentVector& v) {
    return {project(to.values(), v.values), to};
}

CirclePoint retract(const CirclePoint& point, double step, const TangentVector& dir) {
    if (step < 0.0) throw ConfigError("retraction step must be nonnegative");
    return CirclePoint::normalized(point.values() + step * dir.values);
}

double polak_ribiere(const TangentVector& grad_new, const TangentVector& grad_old_transported, double old_sq_norm) {
    if (!(old_sq_norm > 0.0)) return 0.0;
    const double num = inner(grad_new.values, grad_new.values - grad_old_transported.values);
    return std::max(0.0, num / old_sq_norm);
}

RcgResult rcg_minimize(const Objective& f, const EuclideanGradient& egrad, const CirclePoint& start,
                       const RcgConfig& config) {
    RcgResult res;
    CirclePoint x = start;
    double fx = f(x.values());
    res.trace.push_back(fx);
    TangentVector g = riemannian_grad(x, egrad(x.values()));
    double g2 = inner(g.values, g.values);
    TangentVector d{-g.values, x};

    for (int it = 0; it < config.max_iters; ++it) {
        if (std::sqrt(g2) <= config.grad_tolerance) break;
        double slope = inner(g.values, d.values);
        if (slope >= 0.0) {
            if (!config.restart_on_nondescent) {
                res.stalled = true;
                break;
            }
            d.values = -g.values;
            slope = -g2;
        }

        double step = config.armijo_initial_step;
        bool accepted = false;
        CirclePoint trial;
        double ftrial = fx;
        for (int bt = 0; bt <= config.armijo_max_backtracks; ++bt) {
            trial = retract(x, step, d);
            ftrial = f(trial.values());
            if (ftrial <= fx + config.armijo_slope * step * slope) {
                accepted = true;
                break;
            }
            step *= config.armijo_contraction;
        }
        if (!accepted) {
            res.stalled = true;
            break;
        }

        TangentVector g_new = riemannian_grad(trial, egrad(trial.values()));
        const TangentVector g_old_tr = transport(trial, g);
        const TangentVector d_tr = transport(trial, d);
        const double beta = polak_ribiere(g_new, g_old_tr, g2);
        x = trial;
        fx = ftrial;
        res.trace.push_back(fx);
        g = std::move(g_new);
        g2 = inner(g.values, g.values);
        d = {-g.values + beta * d_tr.values, x};
        res.iterations = it + 1;
    }
    res.point = x;
    res.grad_norm = std::sqrt(g2);
    return res;
}

}  // namespace oamsec
