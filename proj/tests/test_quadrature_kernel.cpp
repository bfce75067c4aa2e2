#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nlkpp/error.hpp"
#include "nlkpp/kernel.hpp"
#include "nlkpp/quadrature.hpp"

using namespace nlkpp;

namespace {

double tent_mgf(double lambda, double h) {
    const double x = lambda * h;
    return 2.0 * (std::cosh(x) - 1.0) / (x * x);
}

double laplace_mgf(double lambda, double a, double b) {
    return a * b / (a + b) * (1.0 / (b - lambda) + 1.0 / (a + lambda));
}

ErrorKind kind_of(const auto& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::numerical;
}

}  // namespace

TEST_SUITE("kernel") {
    TEST_CASE("adaptive quadrature reproduces closed-form integrals") {
        const auto r = integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi);
        CHECK(r.value == doctest::Approx(2.0).epsilon(1e-13));
        const double kink[] = {0.3};
        const auto k = integrate([](double x) { return std::abs(x - 0.3); }, 0.0, 1.0, kink);
        CHECK(k.value == doctest::Approx(0.5 * (0.09 + 0.49)).epsilon(1e-13));
    }

    TEST_CASE("gaussian moments match e^{λ²v/2}") {
        for (double var : {0.5, 1.0, 2.0}) {
            const auto k = KernelSpec::gaussian(var);
            CHECK(k.mass() == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(std::isinf(k.abscissa()));
            for (double l : {0.1, 0.7, 1.5, 3.0}) {
                CHECK(k.mgf(l) == doctest::Approx(std::exp(0.5 * l * l * var)).epsilon(1e-10));
                CHECK(k.mgf_derivative(l) == doctest::Approx(l * var * std::exp(0.5 * l * l * var)).epsilon(1e-10));
                CHECK(k.big_l(l) == doctest::Approx(k.mgf(l) - 1.0).epsilon(1e-12));
            }
        }
    }

    TEST_CASE("tent moments and compact support") {
        const auto k = KernelSpec::tent(1.5, 2.0);
        CHECK(k.compact());
        CHECK(k.mass() == doctest::Approx(2.0).epsilon(1e-12));
        const auto sup = k.effective_support();
        CHECK(sup.lo == doctest::Approx(-1.5));
        CHECK(sup.hi == doctest::Approx(1.5));
        for (double l : {0.2, 1.0, 4.0}) CHECK(k.mgf(l) == doctest::Approx(2.0 * tent_mgf(l, 1.5)).epsilon(1e-10));
    }

    TEST_CASE("asymmetric laplace: abscissa, moments and reflection") {
        const double a = 3.0, b = 1.5;
        const auto k = KernelSpec::laplace(a, b);
        CHECK_FALSE(k.symmetric());
        CHECK(k.abscissa() == doctest::Approx(b));
        for (double l : {0.1, 0.8, 1.4}) CHECK(k.mgf(l) == doctest::Approx(laplace_mgf(l, a, b)).epsilon(1e-9));
        CHECK(kind_of([&] { (void)k.mgf(1.6); }) == ErrorKind::domain);
        const auto r = k.reflected();
        CHECK(r.abscissa() == doctest::Approx(a));
        CHECK(r.mgf(0.5) == doctest::Approx(laplace_mgf(0.5, b, a)).epsilon(1e-9));
    }

    TEST_CASE("tabulated tent matches the analytic tent") {
        std::vector<double> v;
        const double dy = 1e-3;
        for (int i = 0; i <= 2000; ++i) v.push_back(std::max(0.0, 1.0 - std::abs(-1.0 + dy * i)));
        const auto k = KernelSpec::tabulated(-1.0, dy, v);
        CHECK(k.mass() == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(k.mgf(1.3) == doctest::Approx(tent_mgf(1.3, 1.0)).epsilon(1e-6));
    }

    TEST_CASE("invalid kernels are rejected") {
        CHECK(kind_of([] { (void)KernelSpec::gaussian(-1.0); }) == ErrorKind::invalid_kernel);
        CHECK(kind_of([] { (void)KernelSpec::tent(1.0, 0.0); }) == ErrorKind::invalid_kernel);
        CHECK(kind_of([] { (void)KernelSpec::tabulated(0.0, 0.1, {1.0, -0.5, 1.0}); }) == ErrorKind::invalid_kernel);
        CHECK(kind_of([] { (void)KernelSpec::laplace(1.0, 0.0); }) == ErrorKind::assumption_violation);
    }

    TEST_CASE("property: M is convex and M(0) = K̄") {
        for (const auto& k : {KernelSpec::gaussian(1.0, 0.7), KernelSpec::tent(2.0), KernelSpec::laplace(1.0, 2.0)}) {
            CHECK(k.mgf(0.0) == doctest::Approx(k.mass()).epsilon(1e-10));
            const double top = std::min(3.0, 0.95 * k.abscissa());
            for (int i = 1; i < 20; ++i) {
                const double l = top * i / 20.0, h = top / 40.0;
                const double m = k.mgf(l);
                CHECK(k.mgf(l + h) - 2.0 * m + k.mgf(l - h) >= -1e-9 * m);
            }
        }
    }

    TEST_CASE("property: the cosine minorant lies under the kernel") {
        for (const auto& k : {KernelSpec::gaussian(1.0), KernelSpec::tent(1.0), KernelSpec::laplace(2.0, 1.0)}) {
            const auto m = minorant(k, 0.5);
            CHECK(m.apex > 0.0);
            for (int i = 0; i <= 200; ++i) {
                const double y = -0.5 + i * 0.005;
                CHECK(m.evaluate(y) <= k(y) + 1e-14);
            }
            CHECK(m.mass() <= k.mass());
        }
        CHECK(kind_of([] { (void)minorant(KernelSpec::tent(1.0), 1.5); }) == ErrorKind::no_minorant);
    }
}
