#include <doctest.h>

#include <chrono>
#include <cmath>
#include <numbers>
#include <string>

#include "nlkpp/error.hpp"
#include "nlkpp/speed.hpp"

using namespace nlkpp;

namespace {

// Minimal speeds from the stationarity condition λ M'(λ) = M(λ) - 1 + μ,
// solved in 30-digit arithmetic.
struct Reference {
    double mu;
    double lambda_star;
    double c_star;
};
constexpr Reference kGaussian[] = {
    {1.5, 1.12496978690733, 2.11813225789774},
    {2.0, 1.21559453036908, 2.54484135892786},
    {3.0, 1.34511995639492, 3.32396066913680},
};
constexpr Reference kTent[] = {
    {1.5, 2.92454302386559, 0.83778351836107},
    {2.0, 3.18183974453509, 1.00134635604132},
    {3.0, 3.55611804934337, 1.29745842588952},
};

// (2R/π)∫_{-B}^{B} G(z) e^{λ* z} sin(πz/2R) dz for the unit Gaussian at μ = 2, R = 2B.
constexpr std::pair<double, double> kLadder[] = {
    {1.0, 0.26077407619815}, {2.0, 1.31114388497568}, {4.0, 2.45128838302703},
    {16.0, 2.54026913037957}, {64.0, 2.54455536420041},
};

}  // namespace

TEST_SUITE("speed") {
    TEST_CASE("minimal speed matches the reference table and the derivative identity") {
        for (const auto& [kernel, table] : {std::pair{KernelSpec::gaussian(1.0), kGaussian},
                                            std::pair{KernelSpec::tent(1.0), kTent}}) {
            for (int i = 0; i < 3; ++i) {
                const auto& ref = table[i];
                const auto curve = minimize_speed(kernel, ref.mu);
                CHECK(curve.star_interior);
                CHECK(curve.lambda_star == doctest::Approx(ref.lambda_star).epsilon(1e-6));
                CHECK(curve.c_star == doctest::Approx(ref.c_star).epsilon(1e-10));
                CHECK(curve.identity_gap <= 1e-6);
                CHECK(std::abs(curve.c_star - kernel.mgf_derivative(curve.lambda_star)) / curve.c_star <= 1e-6);
            }
        }
    }

    TEST_CASE("speed curve sampling honours the requested row count") {
        const auto curve = minimize_speed(KernelSpec::gaussian(1.0), 2.0, {.sample_count = 512});
        CHECK(curve.samples.size() == 512);
        CHECK(curve.samples.front().first < curve.lambda_star);
        CHECK(curve.samples.back().first > curve.lambda_star);
        for (auto [l, c] : curve.samples) {
            CHECK(l > 0.0);
            CHECK(std::isfinite(c));
            CHECK(c >= curve.c_star - 1e-9);
            CHECK(c == doctest::Approx(least_mean_speed(curve.kernel, 2.0, l)));
        }
    }

    TEST_CASE("least-mean speed formula") {
        const auto k = KernelSpec::gaussian(1.0);
        const double l = 0.607797265184538;
        CHECK(least_mean_speed(k, 2.0, l) == doctest::Approx(3.62434678358987).epsilon(1e-10));
        CHECK(least_mean_speed(k, 2.0, l) == doctest::Approx((std::exp(0.5 * l * l) - 1.0 + 2.0) / l));
    }

    TEST_CASE("KPP condition ⌊μ⌋ > K̄ is enforced") {
        const auto k = KernelSpec::gaussian(1.0, 2.0);
        try {
            (void)least_mean_speed(k, 1.5, 1.0);
            FAIL("expected assumption_violation");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::assumption_violation);
            CHECK(std::string(e.what()).find("⌊μ⌋ > K̄") != std::string::npos);
        }
        const auto report = check_assumptions(k, Coefficient::constant(1.5), {.value = 1.5});
        CHECK_FALSE(report.all_passed());
        const auto* c = report.find("least_mean_exceeds_mass");
        REQUIRE(c != nullptr);
        CHECK_FALSE(c->passed);
        CHECK(c->statement == "⌊μ⌋ > K̄");
    }

    TEST_CASE("reference assumptions pass") {
        const auto report = check_assumptions(KernelSpec::gaussian(1.0), Coefficient::constant(2.0), {.value = 2.0});
        CHECK(report.all_passed());
        CHECK(report.find("minimizer_interior")->passed);
    }

    TEST_CASE("c_plus follows c(λ) below λ* and freezes above") {
        const auto mu = Coefficient::periodic(2.0, {{1.0, 2.0 * std::numbers::pi, 0.0}});
        const auto curve = minimize_speed(KernelSpec::gaussian(1.0), 2.0);
        for (double t : {0.0, 0.3, 0.75}) {
            CHECK(c_plus(curve, mu, 0.5, t) == doctest::Approx(c_lambda_t(curve.kernel, mu, 0.5, t)));
            CHECK(c_plus(curve, mu, 3.0, t) == doctest::Approx(c_lambda_t(curve.kernel, mu, curve.lambda_star, t)));
        }
    }

    TEST_CASE("truncated speeds climb towards c*") {
        const auto k = KernelSpec::gaussian(1.0);
        const auto curve = minimize_speed(k, 2.0);
        double prev = 0.0;
        for (auto [b, ref] : kLadder) {
            const double c = c_truncated(k, kGaussian[1].lambda_star, 2.0 * b, b);
            CHECK(c == doctest::Approx(ref).epsilon(1e-8));
            CHECK(c > prev);
            CHECK(c < curve.c_star);
            prev = c;
        }
    }

    TEST_CASE("property: the autonomous minorant speed is below c* for symmetric kernels") {
        for (double var : {0.5, 1.0, 4.0}) {
            const auto k = KernelSpec::gaussian(var);
            const auto curve = minimize_speed(k, 2.0);
            for (double delta : {0.25, 0.5, 1.0}) {
                const double c0 = c_autonomous(minorant(k, delta), 2.0);
                CHECK(c0 > 0.0);
                CHECK(c0 <= curve.c_star + 1e-9);
            }
        }
    }

    TEST_CASE("golden-section minimizer finds a smooth minimum") {
        const auto m = scan_golden_minimize([](double x) { return (x - 1.7) * (x - 1.7) + 3.0; }, 1e-3, 10.0, 32, 1e-10);
        CHECK(m.argmin == doctest::Approx(1.7).epsilon(1e-7));
        CHECK(m.value == doctest::Approx(3.0));
    }

    TEST_CASE("speed minimization runs well under a second") {
        const auto t0 = std::chrono::steady_clock::now();
        (void)minimize_speed(KernelSpec::tent(1.0), 3.0);
        CHECK(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() < 1.0);
    }
}
