#include "cpde/quality.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "cpde/errors.hpp"

namespace cpde {

namespace {

constexpr double kTwoPow53Inv = 1.0 / 9007199254740992.0;  // 2^-53
constexpr double kPi = 3.14159265358979323846;

std::uint64_t splitmix_draw(std::uint64_t seed, std::uint64_t counter) {
    std::uint64_t z = seed + (counter + 1) * 0x9E3779B97F4A7C15ULL;
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

double squared_error(const ImageField& a, const ImageField& b) {
    double acc = 0.0;
    for (int idx = 0; idx < a.size(); ++idx) {
        const double d = a[idx] - b[idx];
        acc += d * d;
    }
    return acc;
}

double central_dx(const ImageField& f, int i, int j) {
    return 0.5 * (sample(f, i + 1, j, BoundaryRule::MirrorNeumann) -
                  sample(f, i - 1, j, BoundaryRule::MirrorNeumann));
}

double central_dy(const ImageField& f, int i, int j) {
    return 0.5 * (sample(f, i, j + 1, BoundaryRule::MirrorNeumann) -
                  sample(f, i, j - 1, BoundaryRule::MirrorNeumann));
}

}  // namespace

ImageField add_gaussian_noise(const ImageField& clean, const NoiseSpec& spec) {
    if (!(spec.sigma >= 0.0) || !std::isfinite(spec.sigma))
        throw ParameterError("add_gaussian_noise: sigma must be nonnegative and finite");
    if (spec.sigma == 0.0) return clean;
    ImageField out = clean;
    for (int p = 0; p < out.size(); ++p) {
        const std::uint64_t c = 2 * static_cast<std::uint64_t>(p);
        const double u1 =
            (static_cast<double>(splitmix_draw(spec.seed, c) >> 11) + 1.0) * kTwoPow53Inv;
        const double u2 = static_cast<double>(splitmix_draw(spec.seed, c + 1) >> 11) * kTwoPow53Inv;
        const double n = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
        out[p] += spec.sigma * n;
    }
    return out;
}

double psnr(const ImageField& reference, const ImageField& test,
            std::optional<double> fixed_range) {
    require_same_shape(reference, test, "psnr");
    const double err = squared_error(reference, test);
    if (err == 0.0) return std::numeric_limits<double>::infinity();
    double range;
    if (fixed_range) {
        if (!(*fixed_range > 0.0) || !std::isfinite(*fixed_range))
            throw ParameterError("psnr: fixed range must be positive and finite");
        range = *fixed_range;
    } else {
        range = max_value(reference) - min_value(reference);
        if (range == 0.0) throw RangeError("psnr: reference image is constant");
    }
    const double mn = static_cast<double>(reference.size());
    return 10.0 * std::log10(mn * range * range / err);
}

double psnr_grad(const ImageField& reference, const ImageField& test) {
    require_same_shape(reference, test, "psnr_grad");
    if (reference.width() < 2 || reference.height() < 2)
        throw DimensionError("psnr_grad: both dimensions must be >= 2");
    const int w = reference.width();
    const int h = reference.height();
    ImageField rx(w, h, 0.0), ry(w, h, 0.0), tx(w, h, 0.0), ty(w, h, 0.0);
    for (int j = 0; j < h; ++j) {
        for (int i = 0; i < w; ++i) {
            rx.at(i, j) = central_dx(reference, i, j);
            ry.at(i, j) = central_dy(reference, i, j);
            tx.at(i, j) = central_dx(test, i, j);
            ty.at(i, j) = central_dy(test, i, j);
        }
    }
    return 0.5 * (psnr(rx, tx) + psnr(ry, ty));
}

double mssim(const ImageField& reference, const ImageField& test) {
    require_same_shape(reference, test, "mssim");
    constexpr int kWin = 8;
    constexpr double kInvCount = 1.0 / (kWin * kWin);
    const double c1 = (0.01 * 255.0) * (0.01 * 255.0);
    const double c2 = (0.03 * 255.0) * (0.03 * 255.0);
    const int w = reference.width();
    const int h = reference.height();
    if (w < kWin || h < kWin) throw DimensionError("mssim: image smaller than the 8x8 window");
    double acc = 0.0;
    int windows = 0;
    for (int j0 = 0; j0 + kWin <= h; ++j0) {
        for (int i0 = 0; i0 + kWin <= w; ++i0) {
            double sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
            for (int dj = 0; dj < kWin; ++dj) {
                for (int di = 0; di < kWin; ++di) {
                    const double x = reference.at(i0 + di, j0 + dj);
                    const double y = test.at(i0 + di, j0 + dj);
                    sx += x;
                    sy += y;
                    sxx += x * x;
                    syy += y * y;
                    sxy += x * y;
                }
            }
            const double mx = sx * kInvCount;
            const double my = sy * kInvCount;
            const double vx = sxx * kInvCount - mx * mx;
            const double vy = syy * kInvCount - my * my;
            const double cov = sxy * kInvCount - mx * my;
            acc += ((2.0 * mx * my + c1) * (2.0 * cov + c2)) /
                   ((mx * mx + my * my + c1) * (vx + vy + c2));
            ++windows;
        }
    }
    return acc / windows;
}

double isnr(const ImageField& clean, const ImageField& noisy, const ImageField& denoised) {
    require_same_shape(clean, noisy, "isnr");
    require_same_shape(clean, denoised, "isnr");
    const double den = squared_error(clean, denoised);
    if (den == 0.0) return std::numeric_limits<double>::infinity();
    const double num = squared_error(clean, noisy);
    if (num == 0.0) return -std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(num / den);
}

MetricsReport evaluate_metrics(const ImageField& clean, const ImageField& noisy,
                               const ImageField& denoised, std::optional<double> psnr_range) {
    MetricsReport rep;
    rep.psnr = psnr(clean, denoised, psnr_range);
    rep.psnr_grad = psnr_grad(clean, denoised);
    rep.mssim = mssim(clean, denoised);
    rep.isnr = isnr(clean, noisy, denoised);
    return rep;
}

std::string metric_to_string(double value) {
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os.precision(17);
    os << value;
    return os.str();
}

}  // namespace cpde
