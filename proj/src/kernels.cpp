#include "cpde/kernels.hpp"

#include <cmath>

#include "cpde/errors.hpp"

namespace cpde {

GaussianKernel gaussian_kernel(double xi) {
    if (!(xi > 0.0) || !std::isfinite(xi))
        throw ParameterError("gaussian_kernel: xi must be positive and finite");
    GaussianKernel k;
    k.xi = xi;
    k.radius = static_cast<int>(std::ceil(3.0 * xi));
    const int side = k.side();
    k.weights.assign(static_cast<std::size_t>(side) * side, 0.0);
    const double inv2x2 = 1.0 / (2.0 * xi * xi);
    double sum = 0.0;
    for (int dj = -k.radius; dj <= k.radius; ++dj) {
        for (int di = -k.radius; di <= k.radius; ++di) {
            const double w = std::exp(-(di * di + dj * dj) * inv2x2);
            k.weights[static_cast<std::size_t>(dj + k.radius) * side + (di + k.radius)] = w;
            sum += w;
        }
    }
    for (double& w : k.weights) w /= sum;
    return k;
}

int mirror_index(int i, int n) {
    if (n == 1) return 0;
    const int period = 2 * n;
    int m = i % period;
    if (m < 0) m += period;
    return m < n ? m : period - 1 - m;
}

ImageField convolve(const ImageField& field, const GaussianKernel& kernel) {
    const int w = field.width();
    const int h = field.height();
    const int r = kernel.radius;
    ImageField out(w, h, 0.0);
    for (int j = 0; j < h; ++j) {
        for (int i = 0; i < w; ++i) {
            double acc = 0.0;
            for (int dj = -r; dj <= r; ++dj) {
                const int jj = mirror_index(j + dj, h);
                for (int di = -r; di <= r; ++di) {
                    const int ii = mirror_index(i + di, w);
                    acc += kernel.w(di, dj) * field.at(ii, jj);
                }
            }
            out.at(i, j) = acc;
        }
    }
    return out;
}

ImageField grad_mag_sq(const ImageField& field) {
    if (field.width() < 2 || field.height() < 2)
        throw DimensionError("grad_mag_sq: both dimensions must be >= 2");
    ImageField out(field.width(), field.height(), 0.0);
    for (int j = 0; j < field.height(); ++j) {
        for (int i = 0; i < field.width(); ++i) {
            const double dx = 0.5 * (sample(field, i + 1, j, BoundaryRule::MirrorNeumann) -
                                     sample(field, i - 1, j, BoundaryRule::MirrorNeumann));
            const double dy = 0.5 * (sample(field, i, j + 1, BoundaryRule::MirrorNeumann) -
                                     sample(field, i, j - 1, BoundaryRule::MirrorNeumann));
            out.at(i, j) = dx * dx + dy * dy;
        }
    }
    return out;
}

ImageField laplacian(const ImageField& field, BoundaryRule rule) {
    ImageField out(field.width(), field.height(), 0.0);
    for (int j = 0; j < field.height(); ++j) {
        for (int i = 0; i < field.width(); ++i) {
            out.at(i, j) = sample(field, i + 1, j, rule) + sample(field, i - 1, j, rule) +
                           sample(field, i, j + 1, rule) + sample(field, i, j - 1, rule) -
                           4.0 * field.at(i, j);
        }
    }
    return out;
}

ImageField diffusivity(const ImageField& u, double k, double xi) {
    if (!(k > 0.0) || !std::isfinite(k))
        throw ParameterError("diffusivity: k must be positive and finite");
    const ImageField smoothed = convolve(u, gaussian_kernel(xi));
    ImageField g(u.width(), u.height(), 0.0);
    const double k2 = k * k;
    for (int idx = 0; idx < g.size(); ++idx)
        g[idx] = 1.0 / (1.0 + std::abs(smoothed[idx]) / k2);
    return g;
}

ImageField edge_source(const ImageField& I, double xi, double cap) {
    if (!(cap > 0.0) || !std::isfinite(cap))
        throw ParameterError("edge_source: cap must be positive and finite");
    ImageField s = grad_mag_sq(convolve(I, gaussian_kernel(xi)));
    for (int idx = 0; idx < s.size(); ++idx) s[idx] = std::min(s[idx], cap);
    return s;
}

}  // namespace cpde
