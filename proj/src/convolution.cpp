#include "nlkpp/convolution.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <sstream>

#include "nlkpp/error.hpp"

namespace nlkpp {

namespace {

constexpr double kStencilCutoff = 1e-14;
constexpr int kMinResolved = 8;

// FFTW's planner is not thread-safe; execution on distinct plans is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

void check_sizes(std::span<const double> u, std::span<double> out) {
    if (u.size() != out.size()) fail(ErrorKind::invalid_parameters, "convolution input and output sizes differ");
}

inline std::ptrdiff_t wrap(std::ptrdiff_t i, std::ptrdiff_t n) {
    const std::ptrdiff_t r = i % n;
    return r < 0 ? r + n : r;
}

}  // namespace

Stencil make_stencil(const KernelSpec& kernel, double dx) {
    if (!(dx > 0.0)) fail(ErrorKind::invalid_parameters, "grid spacing must be positive");
    const Interval support = kernel.effective_support(kStencilCutoff);
    Stencil s;
    s.dx = dx;
    s.lo = static_cast<int>(std::floor(support.lo / dx));
    s.hi = static_cast<int>(std::ceil(support.hi / dx));
    s.weights.resize(static_cast<std::size_t>(s.span()));
    int resolved = 0;
    const double floor_value = kStencilCutoff * kernel.peak();
    for (int j = s.lo; j <= s.hi; ++j) {
        const double k = kernel.evaluate(j * dx);
        if (k > floor_value) ++resolved;
        s.weights[static_cast<std::size_t>(j - s.lo)] = k * dx;
    }
    if (resolved < kMinResolved) {
        std::ostringstream os;
        os << "kernel support resolved by only " << resolved << " grid points (need " << kMinResolved
           << "); reduce dx below " << support.width() / kMinResolved;
        fail(ErrorKind::resolution, os.str());
    }
    // Trim exact zeros at the ends (compact kernels sampled past their support).
    while (s.lo < s.hi && s.weights.front() == 0.0) {
        s.weights.erase(s.weights.begin());
        ++s.lo;
    }
    while (s.hi > s.lo && s.weights.back() == 0.0) {
        s.weights.pop_back();
        --s.hi;
    }
    for (double w : s.weights) s.discrete_mass += w;
    return s;
}

void convolve_direct_serial(const Stencil& s, std::span<const double> u, std::span<double> out, Boundary b) {
    check_sizes(u, out);
    const auto n = static_cast<std::ptrdiff_t>(u.size());
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int j = s.lo; j <= s.hi; ++j) {
            std::ptrdiff_t k = i - j;
            if (b == Boundary::periodic) {
                k = wrap(k, n);
            } else if (k < 0 || k >= n) {
                continue;
            }
            acc += s.weight(j) * u[static_cast<std::size_t>(k)];
        }
        out[static_cast<std::size_t>(i)] = acc;
    }
}

void convolve_direct(const Stencil& s, std::span<const double> u, std::span<double> out, Boundary b) {
    check_sizes(u, out);
    const auto n = static_cast<std::ptrdiff_t>(u.size());
    const double* w = s.weights.data();
    const double* uu = u.data();
    double* o = out.data();
    const int lo = s.lo;
    const int hi = s.hi;
    // Blocks of output cells; within a block the stencil loop is outermost so the
    // cell loop vectorises, while every cell still sums over j in ascending order.
    constexpr std::ptrdiff_t kBlock = 512;
    const std::ptrdiff_t blocks = (n + kBlock - 1) / kBlock;
    // Outputs whose window only sees exact zeros stay zero (zero-pad mode).
    std::ptrdiff_t first = 0;
    std::ptrdiff_t last = n - 1;
    if (b == Boundary::zero_pad) {
        while (first < n && uu[first] == 0.0) ++first;
        while (last >= first && uu[last] == 0.0) --last;
    }
    const std::ptrdiff_t active_lo = first + lo;
    const std::ptrdiff_t active_hi = last + hi;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t blk = 0; blk < blocks; ++blk) {
        const std::ptrdiff_t i0 = blk * kBlock;
        const std::ptrdiff_t i1 = std::min(n, i0 + kBlock);
        std::fill(o + i0, o + i1, 0.0);
        if (i1 <= active_lo || i0 > active_hi) continue;
        for (std::ptrdiff_t j = lo; j <= hi; ++j) {
            const double wj = w[j - lo];
            if (b == Boundary::zero_pad) {
                const std::ptrdiff_t a = std::max(i0, j);
                const std::ptrdiff_t e = std::min(i1, n + j);
                for (std::ptrdiff_t i = a; i < e; ++i) o[i] += wj * uu[i - j];
            } else {
                for (std::ptrdiff_t i = i0; i < i1; ++i) o[i] += wj * uu[wrap(i - j, n)];
            }
        }
    }
}

struct SpectralConvolver::Plans {
    double* real = nullptr;
    fftw_complex* spec = nullptr;
    std::vector<std::complex<double>> kernel_hat;
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;

    ~Plans() {
        std::lock_guard lock(planner_mutex());
        if (forward) fftw_destroy_plan(forward);
        if (backward) fftw_destroy_plan(backward);
        fftw_free(real);
        fftw_free(spec);
    }
};

SpectralConvolver::SpectralConvolver(const Stencil& s, std::size_t n, Boundary b)
    : n_(n), len_(0), boundary_(b), plans_(std::make_unique<Plans>()) {
    if (n < 2) fail(ErrorKind::invalid_parameters, "spectral convolution needs at least 2 points");
    len_ = b == Boundary::periodic ? n : next_pow2(n + static_cast<std::size_t>(s.span()));
    const std::size_t half = len_ / 2 + 1;
    {
        std::lock_guard lock(planner_mutex());
        plans_->real = fftw_alloc_real(len_);
        plans_->spec = fftw_alloc_complex(half);
        const int len = static_cast<int>(len_);
        plans_->forward = fftw_plan_dft_r2c_1d(len, plans_->real, plans_->spec, FFTW_ESTIMATE);
        plans_->backward = fftw_plan_dft_c2r_1d(len, plans_->spec, plans_->real, FFTW_ESTIMATE);
    }
    if (!plans_->forward || !plans_->backward) fail(ErrorKind::numerical, "FFTW plan creation failed");

    std::fill(plans_->real, plans_->real + len_, 0.0);
    const auto len = static_cast<std::ptrdiff_t>(len_);
    for (int j = s.lo; j <= s.hi; ++j) plans_->real[wrap(j, len)] += s.weight(j);
    fftw_execute(plans_->forward);
    plans_->kernel_hat.resize(half);
    const double norm = 1.0 / static_cast<double>(len_);
    for (std::size_t k = 0; k < half; ++k)
        plans_->kernel_hat[k] = std::complex<double>(plans_->spec[k][0], plans_->spec[k][1]) * norm;
}

SpectralConvolver::~SpectralConvolver() = default;

void SpectralConvolver::apply(std::span<const double> u, std::span<double> out) {
    check_sizes(u, out);
    if (u.size() != n_) fail(ErrorKind::invalid_parameters, "field size does not match the spectral convolver");
    std::copy(u.begin(), u.end(), plans_->real);
    std::fill(plans_->real + n_, plans_->real + len_, 0.0);
    fftw_execute(plans_->forward);
    const std::size_t half = len_ / 2 + 1;
    for (std::size_t k = 0; k < half; ++k) {
        const std::complex<double> v(plans_->spec[k][0], plans_->spec[k][1]);
        const std::complex<double> r = v * plans_->kernel_hat[k];
        plans_->spec[k][0] = r.real();
        plans_->spec[k][1] = r.imag();
    }
    fftw_execute(plans_->backward);
    std::copy(plans_->real, plans_->real + n_, out.begin());
}

}  // namespace nlkpp
