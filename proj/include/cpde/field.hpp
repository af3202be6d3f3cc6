#pragma once

#include <vector>

#include "cpde/errors.hpp"

namespace cpde {

// Out-of-range reads one step beyond the grid resolve according to the
// boundary rule of the PDE variable being sampled.
enum class BoundaryRule {
    MirrorNeumann,  // (-1) reads 0, (n) reads n-1: zero normal derivative
    ZeroDirichlet,  // out-of-range reads 0
};

// Dense 2-D scalar field, row-major, intensities on the 0-255 working scale.
// Value type: copy freely, share const references across threads.
class ImageField {
public:
    ImageField() = default;
    ImageField(int width, int height, double fill);

    int width() const { return width_; }
    int height() const { return height_; }
    int size() const { return width_ * height_; }

    double& at(int i, int j) { return data_[static_cast<std::size_t>(j) * width_ + i]; }
    double at(int i, int j) const { return data_[static_cast<std::size_t>(j) * width_ + i]; }

    double& operator[](int idx) { return data_[static_cast<std::size_t>(idx)]; }
    double operator[](int idx) const { return data_[static_cast<std::size_t>(idx)]; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    bool same_shape(const ImageField& other) const {
        return width_ == other.width_ && height_ == other.height_;
    }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<double> data_;
};

ImageField new_field(int width, int height, double fill);

// Sample (i, j), where i indexes columns (x) and j rows (y). Indices may be
// at most one step outside the grid; further is an IndexError.
double sample(const ImageField& field, int i, int j, BoundaryRule rule);

double l2_norm(const ImageField& a);
double linf_diff(const ImageField& a, const ImageField& b);

// a + s * b, elementwise.
ImageField add_scaled(const ImageField& a, double s, const ImageField& b);

double min_value(const ImageField& a);
double max_value(const ImageField& a);
double field_sum(const ImageField& a);
bool all_finite(const ImageField& a);

inline void require_same_shape(const ImageField& a, const ImageField& b, const char* where) {
    if (!a.same_shape(b))
        throw DimensionError(std::string(where) + ": field dimensions differ");
}

}  // namespace cpde
