// Times the serial reference convolution against the OpenMP direct sum and the
// FFT path on the grids used by the front runs, and checks they agree.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include <omp.h>

#include "nlkpp/convolution.hpp"
#include "nlkpp/kernel.hpp"

using namespace nlkpp;

namespace {

template <class F>
double seconds_per_call(F&& f, int reps) {
    f();
    const auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) f();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count() / reps;
}

}  // namespace

int main() {
    std::printf("threads available to OpenMP: %d\n", omp_get_max_threads());
    std::printf("%8s %10s %8s %12s %12s %12s %10s\n", "n", "boundary", "span", "serial[ms]", "omp[ms]", "fft[ms]",
                "max|diff|");
    const KernelSpec kernel = KernelSpec::gaussian(1.0);
    for (int n : {2048, 8192, 32768}) {
        const double dx = 600.0 / (n - 1);
        const Stencil s = make_stencil(kernel, dx);
        std::vector<double> u(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            const double x = -100.0 + dx * i;
            u[static_cast<std::size_t>(i)] = 1.0 / (1.0 + std::exp(x - 150.0));
        }
        for (Boundary b : {Boundary::zero_pad, Boundary::periodic}) {
            std::vector<double> ref(u.size()), par(u.size()), fft(u.size());
            SpectralConvolver conv(s, u.size(), b);
            const int reps = n <= 8192 ? 20 : 5;
            const double ts = seconds_per_call([&] { convolve_direct_serial(s, u, ref, b); }, reps);
            const double tp = seconds_per_call([&] { convolve_direct(s, u, par, b); }, reps);
            const double tf = seconds_per_call([&] { conv.apply(u, fft); }, reps);
            double diff = 0.0;
            for (std::size_t i = 0; i < u.size(); ++i)
                diff = std::max({diff, std::abs(ref[i] - par[i]), std::abs(ref[i] - fft[i])});
            std::printf("%8d %10s %8d %12.3f %12.3f %12.3f %10.2e\n", n, b == Boundary::zero_pad ? "zero_pad" : "periodic",
                        s.span(), 1e3 * ts, 1e3 * tp, 1e3 * tf, diff);
        }
    }
    return 0;
}
