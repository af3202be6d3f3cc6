#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "cpde/field.hpp"

namespace cpde {

struct NoiseSpec {
    double sigma = 0.0;     // std of the additive Gaussian, intensity units
    std::uint64_t seed = 0;
};

/// All four metrics of the evaluation suite, in dB except mssim. +-infinity
/// is representable here; reports render it as "inf"/"-inf" strings.
struct MetricsReport {
    double psnr = 0.0;
    double psnr_grad = 0.0;
    double mssim = 0.0;
    double isnr = 0.0;
};

/// Adds per-pixel independent N(0, sigma^2) noise. Output is not clamped.
///
/// The generator is part of the external contract: pixel p (row-major index)
/// draws two uniforms from a counter-based SplitMix64 stream at counters 2p
/// and 2p+1, where draw(c) = finalize(seed + (c + 1) * 0x9E3779B97F4A7C15)
/// with the SplitMix64 finalizer (z ^= z>>30; z *= 0xBF58476D1CE4E5B9;
/// z ^= z>>27; z *= 0x94D049BB133111EB; z ^= z>>31). u1 = ((z1>>11)+1) * 2^-53
/// in (0,1], u2 = (z2>>11) * 2^-53 in [0,1), and the normal deviate is
/// sqrt(-2 ln u1) * cos(2 pi u2).
ImageField add_gaussian_noise(const ImageField& clean, const NoiseSpec& spec);

/// 10 log10(M N range^2 / sum (test-ref)^2), range = max(ref) - min(ref) or
/// the fixed override. Identical images give +infinity; constant reference
/// without an override throws RangeError.
double psnr(const ImageField& reference, const ImageField& test,
            std::optional<double> fixed_range = std::nullopt);

/// Mean of psnr over the central-difference x- and y-derivative fields.
double psnr_grad(const ImageField& reference, const ImageField& test);

/// Mean SSIM over all fully-inside 8x8 windows, stride 1, uniform weights,
/// population moments, c1 = (0.01*255)^2, c2 = (0.03*255)^2.
double mssim(const ImageField& reference, const ImageField& test);

/// 10 log10(sum (clean-noisy)^2 / sum (clean-denoised)^2); +infinity when the
/// denominator vanishes (checked first), -infinity when only the numerator does.
double isnr(const ImageField& clean, const ImageField& noisy, const ImageField& denoised);

/// psnr/psnr_grad/mssim on (clean, denoised) plus isnr of the triple.
MetricsReport evaluate_metrics(const ImageField& clean, const ImageField& noisy,
                               const ImageField& denoised,
                               std::optional<double> psnr_range = std::nullopt);

/// Full-precision decimal rendering; infinities become "inf"/"-inf".
std::string metric_to_string(double value);

}  // namespace cpde
