#pragma once

#include <vector>

#include "cpde/field.hpp"

namespace cpde {

/// Truncated discrete Gaussian, renormalized to unit sum.
/// weights is a dense (2*radius+1)^2 row-major square; all entries positive.
struct GaussianKernel {
    double xi = 0.0;
    int radius = 0;
    std::vector<double> weights;

    int side() const { return 2 * radius + 1; }
    /// Weight at offset (di, dj), each in [-radius, radius].
    double w(int di, int dj) const {
        return weights[static_cast<std::size_t>(dj + radius) * side() + (di + radius)];
    }
};

/// Builds exp(-(i^2+j^2)/(2 xi^2)) on the [-r, r]^2 grid with r = ceil(3 xi),
/// renormalized to unit sum. Throws ParameterError for xi <= 0.
GaussianKernel gaussian_kernel(double xi);

/// Folds an arbitrary integer index into [0, n) by repeated mirror reflection.
/// Edge pixels repeat (..., 1, 0 | 0, 1, ...), matching the one-step
/// MirrorNeumann sampling rule.
int mirror_index(int i, int n);

/// Direct 2-D weighted summation over the mirror-extended neighborhood.
/// Output has the same dimensions as the input.
ImageField convolve(const ImageField& field, const GaussianKernel& kernel);

/// Squared gradient magnitude by central differences with MirrorNeumann sampling.
/// Requires width, height >= 2.
ImageField grad_mag_sq(const ImageField& field);

/// 5-point Laplacian with unit grid spacing under the given boundary rule.
ImageField laplacian(const ImageField& field, BoundaryRule rule);

/// g = 1 / (1 + |G_xi * u| / k^2) pixelwise; output in (0, 1].
ImageField diffusivity(const ImageField& u, double k, double xi);

/// h(|grad(G_xi * I)|^2) with h(s) = min(s, cap); output in [0, cap].
ImageField edge_source(const ImageField& I, double xi, double cap);

}  // namespace cpde
