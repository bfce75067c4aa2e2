#include <doctest.h>

#include <cmath>
#include <random>

#include "nlkpp/convolution.hpp"
#include "nlkpp/error.hpp"

using namespace nlkpp;

namespace {

std::vector<double> random_field(std::size_t n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(0.0, 1.0);
    std::vector<double> u(n);
    for (auto& v : u) v = d(rng);
    return u;
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST_SUITE("convolution") {
    TEST_CASE("stencil mass and shape") {
        const auto s = make_stencil(KernelSpec::gaussian(1.0), 0.1);
        CHECK(s.lo == -s.hi);
        CHECK(s.discrete_mass == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(s.weight(0) == doctest::Approx(0.1 / std::sqrt(2.0 * M_PI)));
        CHECK_THROWS_AS((void)make_stencil(KernelSpec::tent(1.0), 0.5), Error);
    }

    TEST_CASE("serial, parallel and spectral convolutions agree") {
        for (const auto& k : {KernelSpec::gaussian(1.0), KernelSpec::tent(2.0), KernelSpec::laplace(2.0, 1.0)}) {
            const auto s = make_stencil(k, 0.05);
            for (std::size_t n : {std::size_t{700}, std::size_t{4096}}) {
                const auto u = random_field(n, static_cast<unsigned>(n));
                for (Boundary b : {Boundary::zero_pad, Boundary::periodic}) {
                    std::vector<double> ref(n), par(n), fft(n);
                    convolve_direct_serial(s, u, ref, b);
                    convolve_direct(s, u, par, b);
                    SpectralConvolver conv(s, n, b);
                    conv.apply(u, fft);
                    CHECK(max_diff(ref, par) <= 1e-13);
                    CHECK(max_diff(ref, fft) <= 1e-10);
                }
            }
        }
    }

    TEST_CASE("impulse response reproduces the weights") {
        const auto s = make_stencil(KernelSpec::laplace(3.0, 1.0), 0.1);
        const std::size_t n = 2000, at = 1000;
        std::vector<double> u(n, 0.0), out(n);
        u[at] = 1.0;
        convolve_direct(s, u, out, Boundary::zero_pad);
        for (int j = s.lo; j <= s.hi; ++j) CHECK(out[at + static_cast<std::size_t>(j)] == doctest::Approx(s.weight(j)));
    }

    TEST_CASE("periodic mode keeps constants exact") {
        const auto s = make_stencil(KernelSpec::gaussian(2.0), 0.1);
        std::vector<double> u(512, 0.7), out(512);
        convolve_direct(s, u, out, Boundary::periodic);
        for (double v : out) CHECK(v == doctest::Approx(0.7 * s.discrete_mass).epsilon(1e-14));
    }

    TEST_CASE("exponentials are eigenfunctions away from the boundary") {
        const double dx = 0.05, lambda = 0.8;
        const auto s = make_stencil(KernelSpec::gaussian(1.0), dx);
        const std::size_t n = 3000;
        std::vector<double> u(n), out(n);
        for (std::size_t i = 0; i < n; ++i) u[i] = std::exp(-lambda * dx * static_cast<double>(i));
        convolve_direct(s, u, out, Boundary::zero_pad);
        for (std::size_t i = 1000; i < 2000; i += 50)
            CHECK(out[i] / u[i] == doctest::Approx(std::exp(0.5 * lambda * lambda)).epsilon(1e-9));
    }

    TEST_CASE("zero-pad mode leaves far regions of a compact field untouched") {
        const auto s = make_stencil(KernelSpec::tent(1.0), 0.05);
        std::vector<double> u(4000, 0.0), out(4000, 5.0);
        for (std::size_t i = 100; i < 150; ++i) u[i] = 1.0;
        convolve_direct(s, u, out, Boundary::zero_pad);
        for (std::size_t i = 200; i < 4000; ++i) CHECK(out[i] == 0.0);
    }
}
