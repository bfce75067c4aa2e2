#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nlkpp/dynamics.hpp"
#include "nlkpp/error.hpp"

using namespace nlkpp;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Spatially constant data in periodic mode reduce to u' = μ(t) u (1 - u), whose
// solution is u0 e^{I} / (1 + u0 (e^{I} - 1)) with I = ∫μ.
double logistic_exact(double u0, double integral) {
    const double e = std::exp(integral);
    return u0 * e / (1.0 + u0 * (e - 1.0));
}

Field constant_field(const Grid& g, double v) { return Field{g, 0.0, std::vector<double>(g.size(), v)}; }

}  // namespace

TEST_SUITE("dynamics") {
    TEST_CASE("grid construction") {
        const auto g = Grid::make(-1.0, 1.0, 21);
        CHECK(g.dx == doctest::Approx(0.1));
        CHECK(g.x(20) == doctest::Approx(1.0));
        const auto h = Grid::with_spacing(0.0, 10.0, 0.3);
        CHECK(h.dx == doctest::Approx(0.3));
        CHECK(h.x_max >= 10.0);
        CHECK_THROWS_AS((void)Grid::make(0.0, 1.0, 4), Error);
    }

    TEST_CASE("periodic constants follow the logistic ODE") {
        const auto g = Grid::make(0.0, 40.0, 400);
        for (const auto& mu : {Coefficient::constant(2.0), Coefficient::periodic(2.0, {{1.0, kTwoPi, 0.0}})}) {
            Solver solver(KernelSpec::gaussian(1.0), Nonlinearity::logistic(mu), g, {.boundary = Boundary::periodic});
            const auto r = run(solver, constant_field(g, 0.05), {.t_end = 2.0, .dt = 0.01});
            const double exact = logistic_exact(0.05, mu.integral(0.0, 2.0));
            CHECK(r.final_field.min() == doctest::Approx(exact).epsilon(1e-9));
            CHECK(r.final_field.max() == doctest::Approx(exact).epsilon(1e-9));
        }
    }

    TEST_CASE("logistic_H settles at 1/H") {
        const auto g = Grid::make(0.0, 20.0, 200);
        Solver solver(KernelSpec::tent(1.0), Nonlinearity::logistic_h(Coefficient::constant(2.0), 2.0), g,
                      {.boundary = Boundary::periodic});
        const auto r = run(solver, constant_field(g, 0.1), {.t_end = 20.0, .dt = 0.05});
        CHECK(r.final_field.max() == doctest::Approx(0.5).epsilon(1e-9));
    }

    TEST_CASE("nonlinearity metadata and KPP sampling") {
        const auto mu = Coefficient::periodic(2.0, {{1.0, kTwoPi, 0.0}});
        const auto l = Nonlinearity::logistic(mu);
        CHECK(l.lipschitz() == doctest::Approx(3.0));
        CHECK(l.h0() == doctest::Approx(1.0));
        CHECK(l.big_h() == doctest::Approx(3.0));
        CHECK(l.sampled_violation(2.0) <= 1e-12);
        const auto s = Nonlinearity::saturating(mu, 0.5);
        CHECK(s.sampled_violation(2.0) <= 1e-12);
        CHECK(s.carrying_capacity() == doctest::Approx(1.0));
        const auto bad = Nonlinearity::general(
            "increasing", mu, [mu](double t, double u) { return mu(t) * (1.0 + u); }, 1.0);
        CHECK(bad.sampled_violation(2.0) > 0.1);
    }

    TEST_CASE("initial data profiles") {
        const auto bump = InitialData::compact_bump(10.0, 0.5);
        CHECK(bump.profile(5.0) == doctest::Approx(0.5));
        CHECK(bump.profile(-0.1) == 0.0);
        CHECK(bump.profile(10.1) == 0.0);
        CHECK_FALSE(bump.tail_rate().has_value());
        const auto tail = InitialData::plateau_tail(1.0, 5.0, 0.5, 0.6);
        CHECK(tail.profile(5.0 - 1e-12) == doctest::Approx(tail.profile(5.0)));
        CHECK(tail.profile(8.0) == doctest::Approx(0.5 * std::exp(-4.8)));
        CHECK(*tail.tail_rate() == doctest::Approx(0.6));
        const auto shifted = InitialData::compact_bump(10.0, 0.5, 3.0);
        CHECK(shifted(8.0) == doctest::Approx(0.5));
    }

    TEST_CASE("observer cadence and t_end = 0") {
        const auto g = Grid::make(-20.0, 60.0, 800);
        Solver solver(KernelSpec::gaussian(1.0), Nonlinearity::logistic(Coefficient::constant(2.0)), g);
        std::vector<double> times;
        const Observer obs = [&](const Field& f) { times.push_back(f.t); };
        (void)run(solver, make_initial(InitialData::compact_bump(5.0, 0.5), g), {.t_end = 1.0, .dt = 0.1, .stride = 3},
                  std::span(&obs, 1));
        REQUIRE(times.size() == 5);
        CHECK(times[1] == doctest::Approx(0.3));
        CHECK(times.back() == doctest::Approx(1.0));
        times.clear();
        const auto r = run(solver, make_initial(InitialData::compact_bump(5.0, 0.5), g), {.t_end = 0.0}, std::span(&obs, 1));
        CHECK(times.size() == 1);
        CHECK(r.steps == 0);
    }

    TEST_CASE("stability and domain guards") {
        const auto g = Grid::make(-10.0, 30.0, 400);
        Solver solver(KernelSpec::gaussian(1.0), Nonlinearity::logistic(Coefficient::constant(2.0)), g);
        CHECK(solver.max_stable_dt() == doctest::Approx(0.5 / 3.0));
        try {
            (void)run(solver, make_initial(InitialData::compact_bump(5.0, 0.5), g), {.t_end = 1.0, .dt = 0.5});
            FAIL("expected stability error");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::stability);
        }
        try {
            (void)run(solver, make_initial(InitialData::compact_bump(5.0, 0.5), g), {.t_end = 30.0, .dt = 0.05});
            FAIL("expected domain_exhausted");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::domain_exhausted);
        }
    }

    TEST_CASE("property: solutions stay in [0, 1] without projection doing real work") {
        const auto g = Grid::make(-20.0, 80.0, 1000);
        for (const auto& mu : {Coefficient::constant(3.0), Coefficient::periodic(2.0, {{1.5, kTwoPi, 0.0}})}) {
            Solver solver(KernelSpec::laplace(2.0, 2.0), Nonlinearity::logistic(mu), g);
            const auto r = run(solver, make_initial(InitialData::compact_bump(10.0, 0.9), g), {.t_end = 5.0, .dt = 0.02});
            CHECK(r.max_projection_excursion <= 1e-12);
            CHECK(r.final_field.min() >= 0.0);
            CHECK(r.final_field.max() <= 1.0);
        }
    }

    TEST_CASE("property: translation equivariance away from the boundary") {
        const auto g = Grid::make(-50.0, 50.0, 1001);
        Solver solver(KernelSpec::gaussian(1.0), Nonlinearity::logistic(Coefficient::constant(2.0)), g);
        const auto a = run(solver, make_initial(InitialData::compact_bump(6.0, 0.7, -10.0), g), {.t_end = 3.0, .dt = 0.05});
        const auto b = run(solver, make_initial(InitialData::compact_bump(6.0, 0.7, -5.0), g), {.t_end = 3.0, .dt = 0.05});
        for (int i = 200; i < 700; ++i)
            CHECK(b.final_field.values[static_cast<std::size_t>(i + 50)] ==
                  doctest::Approx(a.final_field.values[static_cast<std::size_t>(i)]).epsilon(1e-12));
    }

    TEST_CASE("spectral and direct solvers agree on short runs") {
        const auto g = Grid::make(-30.0, 90.0, 1200);
        const auto nl = Nonlinearity::logistic(Coefficient::constant(2.0));
        Solver direct(KernelSpec::gaussian(1.0), nl, g);
        Solver spectral(KernelSpec::gaussian(1.0), nl, g, {.method = ConvolutionMethod::spectral});
        const auto init = make_initial(InitialData::compact_bump(10.0, 0.5), g);
        const auto a = run(direct, init, {.t_end = 2.0, .dt = 0.05});
        const auto b = run(spectral, init, {.t_end = 2.0, .dt = 0.05});
        double diff = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i)
            diff = std::max(diff, std::abs(a.final_field.values[i] - b.final_field.values[i]));
        CHECK(diff <= 1e-10);
    }
}
