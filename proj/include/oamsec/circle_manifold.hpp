#pragma once

#include <functional>
#include <vector>

#include "oamsec/types.hpp"

namespace oamsec {

// Point on the product of unit circles.
class CirclePoint {
public:
    CirclePoint() = default;
    // Throws ConfigError unless every entry has unit modulus within 1e-10.
    explicit CirclePoint(cvec values);
    // Normalizes each entry; zero entries are rejected.
    static CirclePoint normalized(const cvec& values);

    const cvec& values() const { return values_; }
    Eigen::Index size() const { return values_.size(); }

private:
    cvec values_;
};

struct TangentVector {
    cvec values;
    CirclePoint base;
};

struct RcgConfig {
    double grad_tolerance = 1e-6;
    int max_iters = 500;
    double armijo_initial_step = 1.0;
    double armijo_contraction = 0.5;
    double armijo_slope = 1e-4;
    int armijo_max_backtracks = 50;
    bool restart_on_nondescent = true;
};

struct RcgResult {
    CirclePoint point;
    std::vector<double> trace;  // objective at the start and after every accepted step
    int iterations = 0;
    double grad_norm = 0.0;
    bool stalled = false;
};

using Objective = std::function<double(const cvec&)>;
using EuclideanGradient = std::function<cvec(const cvec&)>;

// Re{x^H y}
double inner(const cvec& x, const cvec& y);

TangentVector riemannian_grad(const CirclePoint& point, const cvec& egrad);
TangentVector transport(const CirclePoint& to, const TangentVector& v);
CirclePoint retract(const CirclePoint& point, double step, const TangentVector& dir);

// max(0, <g_new, g_new - g_old_transported> / old_sq_norm); old_sq_norm is <g_old, g_old>
// at the old base point. Zero old norm gives 0.
double polak_ribiere(const TangentVector& grad_new, const TangentVector& grad_old_transported, double old_sq_norm);

RcgResult rcg_minimize(const Objective& f, const EuclideanGradient& egrad, const CirclePoint& start,
                       const RcgConfig& config = {});

}  // namespace oamsec
