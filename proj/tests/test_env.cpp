#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nlkpp/env.hpp"
#include "nlkpp/error.hpp"

using namespace nlkpp;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Coefficient two_plus_sine() { return Coefficient::periodic(2.0, {{1.0, kTwoPi, 0.0}}); }

// Cesàro average of the dyadic coefficient over [0, 4^6]: the low value 1 occupies
// [4^k, 2·4^k) for k = 0..5, total length (4^6 - 1)/3 = 1365, and 2 holds elsewhere.
constexpr double kDyadicCesaro = (2.0 * 4096.0 - 1365.0) / 4096.0;

}  // namespace

TEST_SUITE("env") {
    TEST_CASE("periodic coefficient: values, integrals, mean and period") {
        const auto c = two_plus_sine();
        CHECK(c(0.25) == doctest::Approx(3.0));
        CHECK(c.integral(0.0, 1.0) == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(c.integral(0.1, 0.35) == doctest::Approx(0.5 + (std::cos(kTwoPi * 0.1) - std::cos(kTwoPi * 0.35)) / kTwoPi));
        CHECK(*mean_value(c) == doctest::Approx(2.0));
        CHECK(*c.period() == doctest::Approx(1.0));
        CHECK(c.inf_bound() == doctest::Approx(1.0));
        CHECK(c.sup_bound() == doctest::Approx(3.0));
    }

    TEST_CASE("least mean of 2 + sin(2πt) is 2") {
        const auto est = least_mean(two_plus_sine(), 256.0, 4.0);
        CHECK(est.value == doctest::Approx(2.0).epsilon(1e-3));
        CHECK(est.converged);
        CHECK(est.window_sequence.size() == 8);
        CHECK(est.window_sequence.back().first == doctest::Approx(256.0));
    }

    TEST_CASE("quasi-periodic mean and least mean") {
        const auto c = Coefficient::quasiperiodic(1.0, {{0.5, 1.0, 0.0}, {0.5, std::sqrt(2.0), 0.3}});
        CHECK(*mean_value(c) == doctest::Approx(1.0));
        CHECK(least_mean(c, 2048.0, 64.0).value == doctest::Approx(1.0).epsilon(2e-3));
    }

    TEST_CASE("piecewise and tabulated forms") {
        const auto p = Coefficient::piecewise({0.0, 1.0, 3.0}, {1.0, 3.0, 2.0});
        CHECK(p(0.5) == 1.0);
        CHECK(p(2.0) == 3.0);
        CHECK(p(10.0) == 2.0);
        CHECK(p.integral(0.0, 4.0) == doctest::Approx(1.0 + 6.0 + 2.0));
        CHECK_FALSE(p.uniformly_continuous());
        CHECK(Coefficient::piecewise({0.0, 1.0}, {1.0, 2.0}, 0.1).uniformly_continuous());

        const auto tab = Coefficient::tabulated(0.0, 0.5, {1.0, 2.0, 3.0});
        CHECK(tab.horizon() == doctest::Approx(1.0));
        CHECK(tab(0.25) == doctest::Approx(1.5));
        CHECK(tab.integral(0.0, 1.0) == doctest::Approx(2.0));
        try {
            (void)least_mean(tab, 1.0, 0.5);
            FAIL("expected insufficient_horizon");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::insufficient_horizon);
        }
    }

    TEST_CASE("dyadic on/off: least mean sits at the low value while the Cesàro mean does not") {
        const auto c = dyadic_on_off(6);
        CHECK(c.integral(0.0, 4096.0) / 4096.0 == doctest::Approx(kDyadicCesaro).epsilon(1e-12));
        const auto est = least_mean(c, 4096.0, 4096.0, {.levels = 6});
        CHECK(est.value <= 1.1);
        CHECK(est.value == doctest::Approx(1.0).epsilon(1e-9));
    }

    TEST_CASE("shifted and plus_constant derive consistent coefficients") {
        const auto c = two_plus_sine();
        const auto s = c.shifted(0.3).plus_constant(0.5);
        CHECK(s(1.1) == doctest::Approx(c(1.4) + 0.5));
        CHECK(s.integral(0.0, 2.0) == doctest::Approx(c.integral(0.3, 2.3) + 1.0));
        CHECK(*mean_value(s) == doctest::Approx(2.5));
    }

    TEST_CASE("mean adjuster flattens a' + μ and stays within its bound") {
        const auto c = Coefficient::periodic(2.0, {{1.0, kTwoPi, 0.0}, {0.4, 2.0 * kTwoPi, 1.0}});
        const auto a = Adjuster::from_mean(c, 1.0);
        double worst = 0.0;
        for (int i = 0; i <= 400; ++i) {
            const double t = 0.01 * i;
            CHECK(a.derivative(t) + c(t) == doctest::Approx(2.0));
            worst = std::max(worst, std::abs(a.value(t)));
        }
        CHECK(worst <= a.sup_abs + 1e-12);
        CHECK(dual_least_mean_check(c, 10.0) == doctest::Approx(2.0).epsilon(1e-6));
        CHECK_THROWS_AS((void)Adjuster::from_mean(dyadic_on_off(3)), Error);
    }

    TEST_CASE("property: inf μ <= least mean <= first-window Cesàro average <= sup μ") {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> val(0.5, 3.0);
        for (int trial = 0; trial < 10; ++trial) {
            std::vector<double> bps{0.0}, vals{val(rng)};
            for (int k = 1; k < 12; ++k) {
                bps.push_back(bps.back() + 1.0 + 4.0 * val(rng));
                vals.push_back(val(rng));
            }
            const auto c = Coefficient::piecewise(bps, vals);
            const auto est = least_mean(c, 64.0, 16.0, {.levels = 3});
            CHECK(est.value >= c.inf_bound() - 1e-12);
            CHECK(est.value <= c.integral(0.0, 64.0) / 64.0 + 1e-12);
            CHECK(est.value <= c.sup_bound() + 1e-12);
        }
    }
}
