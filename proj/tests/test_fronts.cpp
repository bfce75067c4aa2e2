#include <doctest.h>

#include <cmath>

#include "nlkpp/error.hpp"
#include "nlkpp/fronts.hpp"

using namespace nlkpp;

namespace {

Field ramp(double t, double center) {
    const auto g = Grid::make(0.0, 100.0, 1001);
    Field f{g, t, std::vector<double>(g.size())};
    for (int i = 0; i < g.n; ++i) f.values[static_cast<std::size_t>(i)] = std::clamp(0.5 - 0.1 * (g.x(i) - center), 0.0, 1.0);
    return f;
}

FrontTrace linear_trace(double slope, double t_end) {
    FrontTrace tr{0.5, {}};
    for (int k = 0; k <= 100; ++k) {
        const double t = t_end * k / 100.0;
        tr.points.emplace_back(t, slope * t + 0.01 * std::sin(7.0 * t));
    }
    return tr;
}

}  // namespace

TEST_SUITE("fronts") {
    TEST_CASE("level-set tracking interpolates between cells") {
        const auto f = ramp(0.0, 42.37);
        CHECK(*track_front(f, 0.5) == doctest::Approx(42.37).epsilon(1e-12));
        CHECK(*track_front(f, 0.3) == doctest::Approx(44.37).epsilon(1e-12));
        Field zero{f.grid, 0.0, std::vector<double>(f.grid.size(), 0.0)};
        CHECK_FALSE(track_front(zero, 0.5).has_value());
    }

    TEST_CASE("tracker records every threshold and respects the guard") {
        FrontTracker tracker({0.2, 0.5}, 47.0);
        auto obs = tracker.observer();
        for (int k = 0; k < 10; ++k) obs(ramp(k, 10.0 + 5.0 * k));
        CHECK(tracker.trace(0.5).points.size() == 8);
        CHECK(tracker.trace(0.2).points.size() == 7);
        CHECK_THROWS_AS((void)tracker.trace(0.7), Error);
        CHECK_THROWS_AS(FrontTracker({1.5}), Error);
    }

    TEST_CASE("least-squares speed fit") {
        const auto fit = fit_speed(linear_trace(2.5, 100.0), 20.0, 100.0);
        CHECK(fit.slope == doctest::Approx(2.5).epsilon(1e-3));
        CHECK(fit.points == 81);
        CHECK(fit.residual_rms < 0.02);
        CHECK_THROWS_AS((void)fit_speed(linear_trace(2.5, 100.0), 0.0, 5.0), Error);
    }

    TEST_CASE("burn-in rule") {
        CHECK(burn_in_time(1.0, 120.0) == doctest::Approx(24.0));
        CHECK(burn_in_time(0.1, 120.0) == doctest::Approx(100.0));
    }

    TEST_CASE("envelopes for compact and slowly decaying data") {
        const auto curve = minimize_speed(KernelSpec::gaussian(1.0), 2.0);
        const auto mu = Coefficient::constant(2.0);
        const std::vector<double> ts{0.0, 10.0, 50.0};
        const auto fast = theoretical_envelope(curve, mu, std::nullopt, ts);
        CHECK_FALSE(fast.slow_decay);
        CHECK(fast.upper[2] == doctest::Approx(50.0 * 2.54484135892786).epsilon(1e-9));
        CHECK(fast.lower_slope == doctest::Approx(curve.c_star));
        const auto fast2 = theoretical_envelope(curve, mu, 2.0 * curve.lambda_star, ts);
        CHECK(fast2.lambda_upper == doctest::Approx(curve.lambda_star));
        const auto slow = theoretical_envelope(curve, mu, 0.5 * curve.lambda_star, ts);
        CHECK(slow.slow_decay);
        CHECK(slow.lower_slope == doctest::Approx(3.62434678358987).epsilon(1e-8));
        CHECK(slow.upper[1] == doctest::Approx(10.0 * 3.62434678358987).epsilon(1e-8));
    }

    TEST_CASE("verdict accepts the right slope and rejects a fast front") {
        const auto curve = minimize_speed(KernelSpec::gaussian(1.0), 2.0);
        const auto mu = Coefficient::constant(2.0);
        const auto good = linear_trace(curve.c_star, 100.0);
        std::vector<double> ts;
        for (auto [t, _] : good.points) ts.push_back(t);
        const auto env = theoretical_envelope(curve, mu, std::nullopt, ts);
        const VerdictOptions vo{.eta = 0.1 * curve.c_star, .speed_tolerance = 0.05 * curve.c_star, .burn_in = 20.0,
                                .check_inner = false};
        const Field final_field = ramp(100.0, 50.0);
        CHECK(verdict(good, env, final_field, vo).pass);
        const auto bad = verdict(linear_trace(1.5 * curve.c_star, 100.0), env, final_field, vo);
        CHECK_FALSE(bad.pass);
        CHECK_FALSE(bad.checks[0].passed);
    }

    TEST_CASE("interval extrema") {
        const auto f = ramp(0.0, 50.0);
        CHECK(min_over(f, 0.0, 46.0) == doctest::Approx(0.9));
        CHECK(max_beyond(f, 55.0) == doctest::Approx(0.0));
        CHECK(max_beyond(f, 52.0) == doctest::Approx(0.3));
    }
}
