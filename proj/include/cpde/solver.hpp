#pragma once

#include <vector>

#include "cpde/assembly.hpp"

namespace cpde {

enum class Preconditioner { None, Jacobi };

struct SolverConfig {
    double tol = 1e-8;        // relative residual target, in (0, 1)
    int max_iter = 500;
    Preconditioner precondition = Preconditioner::Jacobi;
};

struct SolverReport {
    int iterations = 0;
    double final_residual = 0.0;  // ||b - Ax||_2 / ||b||_2
    bool converged = false;
    bool breakdown = false;
};

struct SolveResult {
    std::vector<double> x;
    SolverReport report;
};

/// BiCGStab with optional Jacobi preconditioning and restart-on-breakdown
/// (restart from the current iterate, at most 3 restarts). x0 is the warm
/// start. ||b|| = 0 returns x = 0 with 0 iterations. The returned residual is
/// recomputed from the final iterate, so converged implies
/// final_residual <= tol. All reductions run in a fixed sequential order.
SolveResult bicgstab(const SparseOperator& op, const std::vector<double>& b,
                     const std::vector<double>& x0, const SolverConfig& config);

/// Gaussian elimination with partial pivoting on the densified matrix.
/// Test oracle; guards n <= 4096 and throws SingularError when a pivot
/// vanishes to working precision.
std::vector<double> dense_solve(const SparseOperator& op, const std::vector<double>& b);

}  // namespace cpde
