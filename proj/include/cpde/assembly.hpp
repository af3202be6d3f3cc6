#pragma once

#include <tuple>
#include <vector>

#include "cpde/field.hpp"

namespace cpde {

/// Compressed-sparse-row matrix of order n with the diagonal cached separately.
/// Rows hold at most 5 entries (5-point stencils); columns are sorted within
/// each row and each (row, col) pair is stored once. diag[i] mirrors the stored
/// (i, i) entry, 0 if that entry is absent. Operators produced by the assemble_*
/// functions always carry a strictly positive diagonal; hand-built matrices may
/// not.
struct SparseOperator {
    int n = 0;
    std::vector<int> row_offsets;
    std::vector<int> col_indices;
    std::vector<double> values;
    std::vector<double> diag;
};

/// Builds a SparseOperator from (row, col, value) triplets. Sorts columns within
/// rows, rejects duplicates, out-of-range indices, and rows with more than 5
/// entries. Zero-valued triplets are kept as stored entries.
SparseOperator sparse_from_triplets(int n, const std::vector<std::tuple<int, int, double>>& entries);

/// Exact sparse matrix-vector product; throws DimensionError on length mismatch.
std::vector<double> spmv(const SparseOperator& op, const std::vector<double>& x);

/// One row of a 5-point operator. north = (i, j-1), south = (i, j+1),
/// east = (i+1, j), west = (i-1, j); weights for dropped (out-of-grid) neighbors
/// are 0.
struct StencilWeights {
    double center = 0.0;
    double north = 0.0;
    double south = 0.0;
    double east = 0.0;
    double west = 0.0;
};

/// Row weights of the divergence-form operator D_g at (i, j): half-point
/// coefficients g_{i+1/2,j} = (g(i,j) + g(i+1,j))/2 by arithmetic mean,
/// boundary flux terms dropped (Neumann closure). Row sums to 0 by
/// construction.
StencilWeights dg_stencil(const ImageField& g, int i, int j);

/// Id - (tau/2) D_g with the stencil above. Symmetric M-matrix; every row sums
/// to exactly 1. Throws ParameterError for nonpositive g entries or tau <= 0.
SparseOperator assemble_image_operator(const ImageField& g, double tau);

/// Explicit half of the Crank-Nicolson step: I + (tau/2)(D_g I - 2 lambda v),
/// evaluated matrix-free with the same stencil as the implicit half.
ImageField apply_image_explicit(const ImageField& I, const ImageField& g, const ImageField& v,
                                double tau, double lambda);

/// (1 + tau phi) Id - tau phi (psi^2/2) Laplacian with MirrorNeumann closure
/// (out-of-grid neighbors fold onto the center column). Every row sums to
/// 1 + tau phi. psi = 0 stores the diagonal only.
SparseOperator assemble_edge_operator(int width, int height, double tau, double phi, double psi);

/// Id - tau Laplacian with ZeroDirichlet closure: center 1 + 4 tau everywhere,
/// in-grid neighbors -tau, ghost terms dropped.
SparseOperator assemble_fidelity_operator(int width, int height, double tau);

}  // namespace cpde
