#include "cpde/field.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cpde {

ImageField::ImageField(int width, int height, double fill) : width_(width), height_(height) {
    if (width < 1 || height < 1)
        throw DimensionError("ImageField: width and height must be >= 1");
    if (!std::isfinite(fill))
        throw ParameterError("ImageField: fill value must be finite");
    data_.assign(static_cast<std::size_t>(width) * height, fill);
}

ImageField new_field(int width, int height, double fill) {
    return ImageField(width, height, fill);
}

double sample(const ImageField& field, int i, int j, BoundaryRule rule) {
    const int w = field.width();
    const int h = field.height();
    if (i < -1 || i > w || j < -1 || j > h)
        throw IndexError("sample: index more than one step outside the grid");
    const bool outside = (i < 0 || i >= w || j < 0 || j >= h);
    if (!outside)
        return field.at(i, j);
    switch (rule) {
        case BoundaryRule::MirrorNeumann: {
            const int ic = std::clamp(i, 0, w - 1);
            const int jc = std::clamp(j, 0, h - 1);
            return field.at(ic, jc);
        }
        case BoundaryRule::ZeroDirichlet:
            return 0.0;
    }
    return 0.0;  // unreachable
}

double l2_norm(const ImageField& a) {
    double acc = 0.0;
    for (double v : a.data()) acc += v * v;
    return std::sqrt(acc);
}

double linf_diff(const ImageField& a, const ImageField& b) {
    require_same_shape(a, b, "linf_diff");
    double m = 0.0;
    for (int idx = 0; idx < a.size(); ++idx) m = std::max(m, std::abs(a[idx] - b[idx]));
    return m;
}

ImageField add_scaled(const ImageField& a, double s, const ImageField& b) {
    require_same_shape(a, b, "add_scaled");
    ImageField out = a;
    for (int idx = 0; idx < a.size(); ++idx) out[idx] += s * b[idx];
    return out;
}

double min_value(const ImageField& a) {
    return *std::min_element(a.data().begin(), a.data().end());
}

double max_value(const ImageField& a) {
    return *std::max_element(a.data().begin(), a.data().end());
}

double field_sum(const ImageField& a) {
    double acc = 0.0;
    for (double v : a.data()) acc += v;
    return acc;
}

bool all_finite(const ImageField& a) {
    return std::all_of(a.data().begin(), a.data().end(),
                       [](double v) { return std::isfinite(v); });
}

}  // namespace cpde
