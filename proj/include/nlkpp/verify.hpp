#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nlkpp/dynamics.hpp"
#include "nlkpp/env.hpp"
#include "nlkpp/fronts.hpp"
#include "nlkpp/speed.hpp"

namespace nlkpp {

/// A closed-form comparison function w(t, x) = profile(t, x - frame(t)).
struct Candidate {
    enum class Side { super, sub };

    std::string kind;
    Side side = Side::sub;
    std::function<double(double)> frame;
    std::function<double(double, double)> profile;
    /// ∂t w at fixed x, expressed in the comoving coordinate z = x - frame(t).
    std::function<double(double, double)> time_derivative;
    /// Comoving positions where the profile is not smooth.
    std::vector<double> kinks;
    /// Natural size of the candidate (A, or sup w); tolerances scale with it.
    double scale = 1.0;
    std::map<std::string, double> parameters;

    double value(double t, double x) const { return profile(t, x - frame(t)); }
};

/// A ū = A e^{-λ̂(x - ∫c(λ̂))}, λ̂ = min(λ_init, λ*), with A the smallest
/// constant putting ū(0, ·) above the sampled initial field.
Candidate exp_supersolution(const SpeedCurve& curve, const Coefficient& mu, std::optional<double> lambda_init,
                            const Field& initial);

/// η e^{a(t)} e^{-γz} cos(πz/2R) / Φ on |z| < R, zero elsewhere, moving at
/// c_{R,B}(γ). Φ normalises the spatial factor to a unit maximum.
Candidate cosine_subsolution(const KernelSpec& kernel, double gamma, double r, double b, double eta,
                             const Adjuster& a);

/// max(0, e^{-λ(ξ+a)} - e^{-λa + B1} e^{-(λ+h)ξ}) with ξ = x - ∫c_{λ,a}.
Candidate two_exp_subsolution(const KernelSpec& kernel, const Coefficient& mu, double lambda, double h, double b1,
                              const Adjuster& a);

struct ResidualOptions {
    double t_lo = 0.0;
    double t_hi = 10.0;
    double z_lo = -10.0;
    double z_hi = 10.0;
    int nt = 100;
    int nz = 100;
    /// Relative tolerance (times candidate scale); 0 selects 1e-8 for
    /// super-solutions and 1e-6 for sub-solutions.
    double rel_tol = 0.0;
};

struct ResidualReport {
    std::string kind;
    std::string side;
    double t_lo = 0.0, t_hi = 0.0, z_lo = 0.0, z_hi = 0.0;
    long samples = 0;
    /// min N for super-solutions, max N for sub-solutions.
    double extremum = 0.0;
    double at_t = 0.0;
    double at_x = 0.0;
    double tolerance = 0.0;
    double scale = 0.0;
    double max_quadrature_error = 0.0;
    bool inconclusive = false;
    bool passed = false;
};

/// N[w] = ∂t w - (K∗w - K̄w) - w f(t, clamp(w)) sampled on a comoving (t, z) grid.
ResidualReport residual(const KernelSpec& kernel, const Nonlinearity& nl, const Candidate& cand,
                        const ResidualOptions& opts);

enum class CertificateStatus { certified, not_certified, violated };
std::string to_string(CertificateStatus s);

struct CertificateResult {
    CertificateStatus status = CertificateStatus::not_certified;
    std::string message;
    std::optional<Candidate> candidate;
    ResidualReport report;
    int attempts = 0;
};

/// Evaluates one fixed candidate: certified when the residual has the right
/// sign, violated otherwise (the report holds the witness point).
CertificateResult check_candidate(const KernelSpec& kernel, const Nonlinearity& nl, const Candidate& cand,
                                  const ResidualOptions& opts);

/// Comoving window that covers the region where the candidate matters.
ResidualOptions default_window(const Candidate& cand, int nt, int nz, double t_hi);

struct CosineSearchOptions {
    double gamma_factor = 0.95;
    double b_start = 1.0;
    /// Smallest R the search may use; requests above r_cap are not certified.
    double r_min = 0.0;
    double r_cap = 1e3;
    /// Witnesses must move at least this fraction of M'(γ), the R, B -> ∞ limit of c_{R,B}(γ).
    double min_speed_fraction = 0.98;
    int nt = 100;
    int nz = 100;
    double t_hi = 10.0;
};

/// Adjuster used by the cosine witness: a' = μ - ⟨μ⟩ when a mean exists, else 0.
Adjuster cosine_adjuster(const Coefficient& mu);
/// Adjuster making c_{λ,a} ≡ ⌊c(λ)⌋: a' = (⟨μ⟩ - μ)/λ when a mean exists, else 0.
Adjuster two_exp_adjuster(const Coefficient& mu, double lambda);

CertificateResult search_cosine_subsolution(const KernelSpec& kernel, const Nonlinearity& nl,
                                            const SpeedCurve& curve, const CosineSearchOptions& opts = {});

struct TwoExpSearchOptions {
    double b1_start = 1e-3;
    double b1_factor = 4.0;
    int b1_steps = 12;
    int nt = 100;
    int nz = 100;
    double t_hi = 10.0;
};

/// h = 0.5 min(λ, σ - λ, λ* - λ).
double default_two_exp_h(const SpeedCurve& curve, double lambda);

CertificateResult search_two_exp_subsolution(const KernelSpec& kernel, const Nonlinearity& nl, const SpeedCurve& curve,
                                             double lambda, const TwoExpSearchOptions& opts = {});

struct ComparisonReport {
    int pairs = 0;
    double max_violation = 0.0;
    double worst_t = 0.0;
    int worst_pair = -1;
    std::vector<double> per_pair;
    bool passed = false;
};

/// Co-evolves two ordered initial fields and tracks max_x (u_low - u_high).
ComparisonReport comparison_test(Solver& solver, const Field& low, const Field& high, double t_end, double dt);

/// `count` seeded random ordered pairs on the solver grid.
ComparisonReport random_comparison_test(Solver& solver, int count, std::uint64_t seed, double t_end, double dt);

struct PositivityReport {
    bool skipped = false;
    double t_probe = 0.0;
    double support_lo = 0.0, support_hi = 0.0;
    double reach_lo = 0.0, reach_hi = 0.0;
    long cells_checked = 0;
    long nonpositive = 0;
    double min_value = 0.0;
    bool passed = false;
};

/// Checks u(t_probe) > 0 on supp(u0) widened by ⌈t_probe (K̄ + ‖μ‖∞)⌉ stencil reaches.
PositivityReport positivity_test(Solver& solver, const Field& initial, double t_probe, double dt);

struct PersistenceReport {
    double window_lo = 0.0;
    double h1 = 0.0;
    double h3 = 0.0;
    /// k -> min_t min_{x ∈ [0, k X(t)]} u(t, x).
    std::map<double, double> conclusion;
};

/// liminf proxies over the second half of the recorded run.
PersistenceReport persistence_diagnostics(const std::vector<Field>& snapshots, const FrontTrace& trace,
                                          const std::vector<double>& ks = {0.5, 0.9});

}  // namespace nlkpp
