#include "cpde/solver.hpp"

#include <cmath>

#include "cpde/errors.hpp"

namespace cpde {

namespace {

// Absolute guard for denominators that have collapsed to machine scale.
constexpr double kBreakdownTiny = 1e-300;

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

std::vector<double> residual(const SparseOperator& op, const std::vector<double>& b,
                             const std::vector<double>& x) {
    std::vector<double> r = spmv(op, x);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
    return r;
}

void validate_config(const SolverConfig& config) {
    if (!(config.tol > 0.0 && config.tol < 1.0))
        throw ParameterError("bicgstab: tol must lie in (0, 1)");
    if (config.max_iter < 1) throw ParameterError("bicgstab: max_iter must be >= 1");
}

}  // namespace

SolveResult bicgstab(const SparseOperator& op, const std::vector<double>& b,
                     const std::vector<double>& x0, const SolverConfig& config) {
    validate_config(config);
    if (static_cast<int>(b.size()) != op.n || static_cast<int>(x0.size()) != op.n)
        throw DimensionError("bicgstab: vector length does not match operator order");
    const bool jacobi = config.precondition == Preconditioner::Jacobi;
    if (jacobi)
        for (double d : op.diag)
            if (!(d > 0.0))
                throw ParameterError("bicgstab: Jacobi preconditioning needs a strictly positive diagonal");

    SolveResult out;
    out.x = x0;
    const double bnorm = norm2(b);
    if (bnorm == 0.0) {
        out.x.assign(b.size(), 0.0);
        out.report.converged = true;
        return out;
    }
    const double target = config.tol * bnorm;
    const auto precond = [&](const std::vector<double>& v) {
        std::vector<double> z = v;
        if (jacobi)
            for (std::size_t i = 0; i < z.size(); ++i) z[i] /= op.diag[i];
        return z;
    };

    std::vector<double> r = residual(op, b, out.x);
    std::vector<double> rhat = r;
    std::vector<double> p(b.size(), 0.0), v(b.size(), 0.0);
    double rho = 1.0, alpha = 1.0, omega = 1.0;
    int restarts = 0;
    bool fresh = true;  // p, v are zero and rho/alpha/omega are at their reset values

    SolverReport& rep = out.report;
    const auto finish = [&]() {
        rep.final_residual = norm2(residual(op, b, out.x)) / bnorm;
        rep.converged = rep.final_residual <= config.tol && !rep.breakdown;
        return out;
    };
    if (norm2(r) <= target) return finish();

    const auto restart = [&]() {
        r = residual(op, b, out.x);
        rhat = r;
        std::fill(p.begin(), p.end(), 0.0);
        std::fill(v.begin(), v.end(), 0.0);
        rho = alpha = omega = 1.0;
        fresh = true;
    };

    while (rep.iterations < config.max_iter) {
        const double rho_next = dot(rhat, r);
        if (std::abs(rho_next) < kBreakdownTiny) {
            if (restarts++ >= 3) { rep.breakdown = true; break; }
            restart();
            ++rep.iterations;
            continue;
        }
        if (fresh) {
            p = r;
            fresh = false;
        } else {
            const double beta = (rho_next / rho) * (alpha / omega);
            for (std::size_t i = 0; i < p.size(); ++i)
                p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        rho = rho_next;
        const std::vector<double> phat = precond(p);
        v = spmv(op, phat);
        const double denom = dot(rhat, v);
        if (std::abs(denom) < kBreakdownTiny) {
            if (restarts++ >= 3) { rep.breakdown = true; break; }
            restart();
            ++rep.iterations;
            continue;
        }
        alpha = rho / denom;
        std::vector<double> s = r;
        for (std::size_t i = 0; i < s.size(); ++i) s[i] -= alpha * v[i];
        if (norm2(s) <= target) {
            for (std::size_t i = 0; i < out.x.size(); ++i) out.x[i] += alpha * phat[i];
            ++rep.iterations;
            if (norm2(residual(op, b, out.x)) <= target) break;
            restart();  // recurrence drifted from the true residual; rebuild and continue
            continue;
        }
        const std::vector<double> shat = precond(s);
        const std::vector<double> t = spmv(op, shat);
        const double tt = dot(t, t);
        if (tt < kBreakdownTiny) {
            if (restarts++ >= 3) { rep.breakdown = true; break; }
            restart();
            ++rep.iterations;
            continue;
        }
        omega = dot(t, s) / tt;
        for (std::size_t i = 0; i < out.x.size(); ++i)
            out.x[i] += alpha * phat[i] + omega * shat[i];
        r = s;
        for (std::size_t i = 0; i < r.size(); ++i) r[i] -= omega * t[i];
        ++rep.iterations;
        if (norm2(r) <= target) {
            if (norm2(residual(op, b, out.x)) <= target) break;
            restart();
            continue;
        }
        if (std::abs(omega) < kBreakdownTiny) {
            if (restarts++ >= 3) { rep.breakdown = true; break; }
            restart();
        }
    }
    return finish();
}

std::vector<double> dense_solve(const SparseOperator& op, const std::vector<double>& b) {
    if (op.n > 4096) throw DimensionError("dense_solve: order exceeds the 4096 guard");
    if (static_cast<int>(b.size()) != op.n)
        throw DimensionError("dense_solve: vector length does not match operator order");
    const int n = op.n;
    std::vector<double> a(static_cast<std::size_t>(n) * n, 0.0);
    double amax = 0.0;
    for (int r = 0; r < n; ++r)
        for (int e = op.row_offsets[r]; e < op.row_offsets[r + 1]; ++e) {
            const double val = op.values[e];
            a[static_cast<std::size_t>(r) * n + op.col_indices[e]] = val;
            amax = std::max(amax, std::abs(val));
        }
    std::vector<double> x = b;
    const double pivot_floor = amax * n * 2.3e-16;
    for (int col = 0; col < n; ++col) {
        int best = col;
        double best_abs = std::abs(a[static_cast<std::size_t>(col) * n + col]);
        for (int r = col + 1; r < n; ++r) {
            const double cand = std::abs(a[static_cast<std::size_t>(r) * n + col]);
            if (cand > best_abs) { best = r; best_abs = cand; }
        }
        if (best_abs <= pivot_floor)
            throw SingularError("dense_solve: matrix is singular to working precision");
        if (best != col) {
            for (int c = 0; c < n; ++c)
                std::swap(a[static_cast<std::size_t>(col) * n + c],
                          a[static_cast<std::size_t>(best) * n + c]);
            std::swap(x[static_cast<std::size_t>(col)], x[static_cast<std::size_t>(best)]);
        }
        const double pivot = a[static_cast<std::size_t>(col) * n + col];
        for (int r = col + 1; r < n; ++r) {
            const double factor = a[static_cast<std::size_t>(r) * n + col] / pivot;
            if (factor == 0.0) continue;
            a[static_cast<std::size_t>(r) * n + col] = 0.0;
            for (int c = col + 1; c < n; ++c)
                a[static_cast<std::size_t>(r) * n + c] -= factor * a[static_cast<std::size_t>(col) * n + c];
            x[static_cast<std::size_t>(r)] -= factor * x[static_cast<std::size_t>(col)];
        }
    }
    for (int r = n - 1; r >= 0; --r) {
        double acc = x[static_cast<std::size_t>(r)];
        for (int c = r + 1; c < n; ++c)
            acc -= a[static_cast<std::size_t>(r) * n + c] * x[static_cast<std::size_t>(c)];
        x[static_cast<std::size_t>(r)] = acc / a[static_cast<std::size_t>(r) * n + r];
    }
    return x;
}

}  // namespace cpde
