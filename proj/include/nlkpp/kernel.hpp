#pragma once

#include <functional>
#include <limits>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace nlkpp {

/// Normalized N(0, variance) density.
struct Gaussian {
    double variance = 1.0;
};

/// Two-sided exponential, K(y) ∝ e^{-rate_right y} for y > 0 and e^{rate_left y}
/// for y < 0, normalized to unit mass.
struct Laplace {
    double rate_left = 1.0;
    double rate_right = 1.0;
};

/// Triangle (1 - |y|/h)/h on [-h, h]; unit mass.
struct Tent {
    double halfwidth = 1.0;
};

/// Samples on the uniform grid y0 + i*dy, linearly interpolated, zero outside.
struct Tabulated {
    double y0 = 0.0;
    double dy = 1.0;
    std::vector<double> values;
};

using KernelFamily = std::variant<Gaussian, Laplace, Tent, Tabulated>;

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double width() const { return hi - lo; }
};

/// Dispersal kernel K = scale * (family density). Immutable after construction.
class KernelSpec {
public:
    KernelSpec(KernelFamily family, double scale = 1.0);

    static KernelSpec gaussian(double variance, double scale = 1.0);
    static KernelSpec laplace(double rate_left, double rate_right, double scale = 1.0);
    static KernelSpec tent(double halfwidth, double scale = 1.0);
    static KernelSpec tabulated(double y0, double dy, std::vector<double> values, double scale = 1.0);

    const KernelFamily& family() const { return family_; }
    double scale() const { return scale_; }
    std::string family_name() const;

    double evaluate(double y) const;
    double operator()(double y) const { return evaluate(y); }

    /// K̄ = ∫K.
    double mass() const;
    /// sup{γ > 0 : ∫K e^{γy} < ∞}; +inf for compactly supported and Gaussian kernels.
    double abscissa() const;
    /// M(λ) = ∫K(y) e^{λy} dy for 0 ≤ λ < σ(K).
    double mgf(double lambda) const;
    /// L(λ) = M(λ) - K̄.
    double big_l(double lambda) const;
    /// M'(λ) = ∫K(y) e^{λy} y dy.
    double mgf_derivative(double lambda) const;

    double peak() const;
    bool symmetric() const;
    bool compact() const;

    /// Interval outside of which K < rel * peak (exact support for compact kernels).
    Interval effective_support(double rel = 1e-16) const;

    /// ∫K(y) g(y) dy by adaptive quadrature over the effective support, split at
    /// `breaks`, with tails extended while they still contribute.
    double integrate_against(const std::function<double(double)>& g,
                             std::span<const double> breaks = {}, double* error = nullptr) const;

    /// y -> -y; used to study leftward spreading.
    KernelSpec reflected() const;
    KernelSpec scaled(double factor) const;

private:
    void validate() const;
    void check_lambda(double lambda) const;

    KernelFamily family_;
    double scale_;
};

/// Symmetric cosine minorant k(y) = apex * cos(πy / 2δ) on [-δ, δ].
struct MinorantKernel {
    double delta = 0.0;
    double apex = 0.0;

    double evaluate(double y) const;
    double mass() const;
    double mgf(double lambda) const;
};

/// Largest cosine profile under K on [-δ, δ], with apex min_{|y|≤δ} K(y) over a
/// dense grid. Throws no_minorant if K vanishes somewhere on the interval.
MinorantKernel minorant(const KernelSpec& kernel, double delta);

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

}  // namespace nlkpp
