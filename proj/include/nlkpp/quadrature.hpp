#pragma once

#include <functional>
#include <span>

namespace nlkpp {

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;  // estimated absolute error
};

struct QuadratureOptions {
    double rel_tol = 1e-12;
    unsigned max_depth = 20;
};

/// Adaptive Gauss-Kronrod (15-point) on a finite interval.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& opts = {});

/// Same, split at the given interior break points (sorted or not; points
/// outside (a, b) are ignored).
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           std::span<const double> breaks, const QuadratureOptions& opts = {});

}  // namespace nlkpp
