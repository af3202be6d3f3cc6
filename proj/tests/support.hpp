#pragma once

// Shared helpers for the test suites: a self-contained RNG (independent of the
// library's noise generator), random field/matrix builders, and densification
// of sparse operators for oracle comparisons.

#include <cstdint>
#include <vector>

#include "cpde/assembly.hpp"
#include "cpde/field.hpp"

namespace testsup {

// xorshift64*, good enough for test-data generation; never used by the library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9E3779B97F4A7C15ULL) {}

    std::uint64_t next() {
        state_ ^= state_ >> 12;
        state_ ^= state_ << 25;
        state_ ^= state_ >> 27;
        return state_ * 0x2545F4914F6CDD1DULL;
    }

    double uniform(double lo, double hi) {
        const double u = static_cast<double>(next() >> 11) * (1.0 / 9007199254740992.0);
        return lo + u * (hi - lo);
    }

    int uniform_int(int lo, int hi) {  // inclusive bounds
        return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
    }

private:
    std::uint64_t state_;
};

inline cpde::ImageField random_field(int w, int h, double lo, double hi, Rng& rng) {
    cpde::ImageField f(w, h, 0.0);
    for (int idx = 0; idx < f.size(); ++idx) f[idx] = rng.uniform(lo, hi);
    return f;
}

inline std::vector<std::vector<double>> densify(const cpde::SparseOperator& op) {
    std::vector<std::vector<double>> dense(op.n, std::vector<double>(op.n, 0.0));
    for (int r = 0; r < op.n; ++r)
        for (int e = op.row_offsets[r]; e < op.row_offsets[r + 1]; ++e)
            dense[r][op.col_indices[e]] += op.values[e];
    return dense;
}

inline int row_nnz(const cpde::SparseOperator& op, int row) {
    return op.row_offsets[row + 1] - op.row_offsets[row];
}

// Random strictly diagonally dominant M-matrix (tridiagonal pattern plus a
// random far coupling), order n.
inline cpde::SparseOperator random_m_matrix(int n, Rng& rng) {
    std::vector<std::tuple<int, int, double>> entries;
    std::vector<double> offdiag_sum(n, 0.0);
    for (int r = 0; r < n; ++r) {
        const auto couple = [&](int c) {
            if (c < 0 || c >= n || c == r) return;
            const double v = -rng.uniform(0.05, 1.0);
            entries.emplace_back(r, c, v);
            offdiag_sum[r] -= v;
        };
        couple(r - 1);
        couple(r + 1);
        if (n > 4) couple((r + n / 2) % n);
    }
    for (int r = 0; r < n; ++r)
        entries.emplace_back(r, r, offdiag_sum[r] + rng.uniform(0.1, 2.0));
    return cpde::sparse_from_triplets(n, entries);
}

}  // namespace testsup
