#include "nlkpp/quadrature.hpp"

#include <algorithm>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "nlkpp/error.hpp"

namespace nlkpp {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::invalid_kernel: return "invalid-kernel";
        case ErrorKind::domain: return "domain";
        case ErrorKind::assumption_violation: return "assumption-violation";
        case ErrorKind::insufficient_horizon: return "insufficient-horizon";
        case ErrorKind::unsupported: return "unsupported";
        case ErrorKind::no_minorant: return "no-minorant";
        case ErrorKind::resolution: return "resolution";
        case ErrorKind::stability: return "stability";
        case ErrorKind::domain_exhausted: return "domain-exhausted";
        case ErrorKind::invalid_parameters: return "invalid-parameters";
        case ErrorKind::insufficient_data: return "insufficient-data";
        case ErrorKind::invalid_input: return "invalid-input";
        case ErrorKind::numerical: return "numerical";
        case ErrorKind::io: return "io";
    }
    return "unknown";
}

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& opts) {
    if (!(b > a)) return {};
    using gk = boost::math::quadrature::gauss_kronrod<double, 15>;
    // Boost 1.74 compares an unscaled error estimate against a scaled tolerance, which on short
    // intervals recurses to max_depth on roundoff alone. Integrating over [-1, 1] keeps the scale at 1.
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const auto unit = [&](double u) { return half * f(mid + half * u); };
    double err = 0.0;
    const double v = gk::integrate(unit, -1.0, 1.0, opts.max_depth, opts.rel_tol, &err);
    return {v, err};
}

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           std::span<const double> breaks, const QuadratureOptions& opts) {
    if (!(b > a)) return {};
    std::vector<double> pts{a};
    for (double p : breaks)
        if (p > a && p < b) pts.push_back(p);
    pts.push_back(b);
    std::sort(pts.begin(), pts.end());
    QuadratureResult total;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const auto r = integrate(f, pts[i], pts[i + 1], opts);
        total.value += r.value;
        total.error += r.error;
    }
    return total;
}

}  // namespace nlkpp
