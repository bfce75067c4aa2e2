#pragma once

#include <memory>
#include <span>
#include <vector>

#include "nlkpp/kernel.hpp"

namespace nlkpp {

/// How values outside the grid are treated: zero (the truncated line) or a
/// periodic extension, which turns constants into exact equilibria.
enum class Boundary { zero_pad, periodic };

/// Kernel sampled at y_j = j*dx for j in [lo, hi], weights K(y_j)*dx.
struct Stencil {
    int lo = 0;
    int hi = 0;
    double dx = 0.0;
    std::vector<double> weights;
    /// Σ w_j, the discrete counterpart of K̄.
    double discrete_mass = 0.0;

    int span() const { return hi - lo + 1; }
    double weight(int j) const { return weights[static_cast<std::size_t>(j - lo)]; }
};

/// Samples the kernel on the grid spacing over the region where K > 1e-14 * peak.
/// Throws `resolution` when fewer than 8 samples land inside that region.
Stencil make_stencil(const KernelSpec& kernel, double dx);

/// out[i] = Σ_j w_j u[i-j]. Single-threaded reference implementation.
void convolve_direct_serial(const Stencil& s, std::span<const double> u, std::span<double> out, Boundary b);

/// Same sum as convolve_direct_serial, parallelised over output cells.
void convolve_direct(const Stencil& s, std::span<const double> u, std::span<double> out, Boundary b);

/// FFT-based convolution with a precomputed kernel transform. Zero-pad mode
/// embeds the field in a buffer of length >= n + span so that the circular
/// wrap only ever reads zeros.
class SpectralConvolver {
public:
    SpectralConvolver(const Stencil& s, std::size_t n, Boundary b);
    ~SpectralConvolver();
    SpectralConvolver(const SpectralConvolver&) = delete;
    SpectralConvolver& operator=(const SpectralConvolver&) = delete;

    std::size_t size() const { return n_; }
    std::size_t transform_length() const { return len_; }

    /// Not reentrant: the convolver owns its work buffers.
    void apply(std::span<const double> u, std::span<double> out);

private:
    struct Plans;
    std::size_t n_;
    std::size_t len_;
    Boundary boundary_;
    std::unique_ptr<Plans> plans_;
};

enum class ConvolutionMethod { direct_serial, direct, spectral };

}  // namespace nlkpp
