#include "cpde/assembly.hpp"

#include <algorithm>
#include <cmath>

#include "cpde/errors.hpp"

namespace cpde {

namespace {

constexpr int kMaxRowEntries = 5;

/// Accumulates one row at a time; rows must be finished in ascending order.
class RowBuilder {
public:
    explicit RowBuilder(int n) {
        op_.n = n;
        op_.row_offsets.assign(static_cast<std::size_t>(n) + 1, 0);
        op_.diag.assign(static_cast<std::size_t>(n), 0.0);
        op_.col_indices.reserve(static_cast<std::size_t>(n) * kMaxRowEntries);
        op_.values.reserve(static_cast<std::size_t>(n) * kMaxRowEntries);
    }

    void add(int col, double value) { entries_.emplace_back(col, value); }

    void finish_row(int row) {
        std::sort(entries_.begin(), entries_.end());
        for (const auto& [col, value] : entries_) {
            op_.col_indices.push_back(col);
            op_.values.push_back(value);
            if (col == row) op_.diag[row] = value;
        }
        op_.row_offsets[static_cast<std::size_t>(row) + 1] =
            static_cast<int>(op_.col_indices.size());
        entries_.clear();
    }

    SparseOperator take() { return std::move(op_); }

private:
    SparseOperator op_;
    std::vector<std::pair<int, double>> entries_;
};

void check_positive(double value, const char* what) {
    if (!(value > 0.0) || !std::isfinite(value))
        throw ParameterError(std::string(what) + " must be positive and finite");
}

}  // namespace

SparseOperator sparse_from_triplets(int n,
                                    const std::vector<std::tuple<int, int, double>>& entries) {
    if (n < 1) throw DimensionError("sparse_from_triplets: n must be >= 1");
    std::vector<std::vector<std::pair<int, double>>> rows(static_cast<std::size_t>(n));
    for (const auto& [r, c, v] : entries) {
        if (r < 0 || r >= n || c < 0 || c >= n)
            throw IndexError("sparse_from_triplets: entry outside the matrix");
        rows[static_cast<std::size_t>(r)].emplace_back(c, v);
    }
    RowBuilder builder(n);
    for (int r = 0; r < n; ++r) {
        auto& row = rows[static_cast<std::size_t>(r)];
        if (static_cast<int>(row.size()) > kMaxRowEntries)
            throw ParameterError("sparse_from_triplets: more than 5 entries in a row");
        std::sort(row.begin(), row.end());
        for (std::size_t e = 1; e < row.size(); ++e)
            if (row[e].first == row[e - 1].first)
                throw ParameterError("sparse_from_triplets: duplicate (row, col) entry");
        for (const auto& [c, v] : row) builder.add(c, v);
        builder.finish_row(r);
    }
    return builder.take();
}

std::vector<double> spmv(const SparseOperator& op, const std::vector<double>& x) {
    if (static_cast<int>(x.size()) != op.n)
        throw DimensionError("spmv: vector length does not match operator order");
    std::vector<double> y(static_cast<std::size_t>(op.n), 0.0);
    for (int r = 0; r < op.n; ++r) {
        double acc = 0.0;
        for (int e = op.row_offsets[r]; e < op.row_offsets[r + 1]; ++e)
            acc += op.values[e] * x[static_cast<std::size_t>(op.col_indices[e])];
        y[static_cast<std::size_t>(r)] = acc;
    }
    return y;
}

StencilWeights dg_stencil(const ImageField& g, int i, int j) {
    const int w = g.width();
    const int h = g.height();
    StencilWeights s;
    const double gc = g.at(i, j);
    if (i + 1 < w) s.east = 0.5 * (gc + g.at(i + 1, j));
    if (i - 1 >= 0) s.west = 0.5 * (gc + g.at(i - 1, j));
    if (j + 1 < h) s.south = 0.5 * (gc + g.at(i, j + 1));
    if (j - 1 >= 0) s.north = 0.5 * (gc + g.at(i, j - 1));
    s.center = -(s.east + s.west + s.south + s.north);
    return s;
}

SparseOperator assemble_image_operator(const ImageField& g, double tau) {
    check_positive(tau, "assemble_image_operator: tau");
    for (int idx = 0; idx < g.size(); ++idx)
        if (!(g[idx] > 0.0))
            throw ParameterError("assemble_image_operator: diffusivity must be strictly positive");
    const int w = g.width();
    const int h = g.height();
    const double half_tau = 0.5 * tau;
    RowBuilder builder(w * h);
    for (int j = 0; j < h; ++j) {
        for (int i = 0; i < w; ++i) {
            const int row = j * w + i;
            const StencilWeights s = dg_stencil(g, i, j);
            builder.add(row, 1.0 - half_tau * s.center);
            if (s.east != 0.0) builder.add(row + 1, -half_tau * s.east);
            if (s.west != 0.0) builder.add(row - 1, -half_tau * s.west);
            if (s.south != 0.0) builder.add(row + w, -half_tau * s.south);
            if (s.north != 0.0) builder.add(row - w, -half_tau * s.north);
            builder.finish_row(row);
        }
    }
    return builder.take();
}

ImageField apply_image_explicit(const ImageField& I, const ImageField& g, const ImageField& v,
                                double tau, double lambda) {
    require_same_shape(I, g, "apply_image_explicit");
    require_same_shape(I, v, "apply_image_explicit");
    check_positive(tau, "apply_image_explicit: tau");
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw ParameterError("apply_image_explicit: lambda must be nonnegative and finite");
    const int w = I.width();
    const int h = I.height();
    const double half_tau = 0.5 * tau;
    ImageField out(w, h, 0.0);
    for (int j = 0; j < h; ++j) {
        for (int i = 0; i < w; ++i) {
            const StencilWeights s = dg_stencil(g, i, j);
            const double ic = I.at(i, j);
            double dg = s.center * ic;
            if (s.east != 0.0) dg += s.east * I.at(i + 1, j);
            if (s.west != 0.0) dg += s.west * I.at(i - 1, j);
            if (s.south != 0.0) dg += s.south * I.at(i, j + 1);
            if (s.north != 0.0) dg += s.north * I.at(i, j - 1);
            out.at(i, j) = ic + half_tau * (dg - 2.0 * lambda * v.at(i, j));
        }
    }
    return out;
}

SparseOperator assemble_edge_operator(int width, int height, double tau, double phi, double psi) {
    if (width < 1 || height < 1)
        throw DimensionError("assemble_edge_operator: dimensions must be >= 1");
    check_positive(tau, "assemble_edge_operator: tau");
    check_positive(phi, "assemble_edge_operator: phi");
    if (!(psi >= 0.0) || !std::isfinite(psi))
        throw ParameterError("assemble_edge_operator: psi must be nonnegative and finite");
    const double c = tau * phi * psi * psi * 0.5;
    RowBuilder builder(width * height);
    for (int j = 0; j < height; ++j) {
        for (int i = 0; i < width; ++i) {
            const int row = j * width + i;
            // Out-of-grid neighbors mirror onto the center pixel, so each one
            // moves its -c weight into the diagonal.
            int in_grid = 0;
            if (i + 1 < width) ++in_grid;
            if (i - 1 >= 0) ++in_grid;
            if (j + 1 < height) ++in_grid;
            if (j - 1 >= 0) ++in_grid;
            builder.add(row, 1.0 + tau * phi + c * in_grid);
            if (c != 0.0) {
                if (i + 1 < width) builder.add(row + 1, -c);
                if (i - 1 >= 0) builder.add(row - 1, -c);
                if (j + 1 < height) builder.add(row + width, -c);
                if (j - 1 >= 0) builder.add(row - width, -c);
            }
            builder.finish_row(row);
        }
    }
    return builder.take();
}

SparseOperator assemble_fidelity_operator(int width, int height, double tau) {
    if (width < 1 || height < 1)
        throw DimensionError("assemble_fidelity_operator: dimensions must be >= 1");
    check_positive(tau, "assemble_fidelity_operator: tau");
    RowBuilder builder(width * height);
    for (int j = 0; j < height; ++j) {
        for (int i = 0; i < width; ++i) {
            const int row = j * width + i;
            builder.add(row, 1.0 + 4.0 * tau);
            if (i + 1 < width) builder.add(row + 1, -tau);
            if (i - 1 >= 0) builder.add(row - 1, -tau);
            if (j + 1 < height) builder.add(row + width, -tau);
            if (j - 1 >= 0) builder.add(row - width, -tau);
            builder.finish_row(row);
        }
    }
    return builder.take();
}

}  // namespace cpde
