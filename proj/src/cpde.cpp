#include "cpde/cpde.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "cpde/assembly.hpp"
#include "cpde/errors.hpp"
#include "cpde/kernels.hpp"

namespace cpde {

namespace {

void require_positive(double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value))
        throw ParameterError(std::string("CpdeParams: ") + name + " must be positive and finite");
}

void require_nonnegative(double value, const char* name) {
    if (!(value >= 0.0) || !std::isfinite(value))
        throw ParameterError(std::string("CpdeParams: ") + name +
                             " must be nonnegative and finite");
}

ImageField to_field(std::vector<double> flat, int width, int height) {
    ImageField out(width, height, 0.0);
    for (int idx = 0; idx < out.size(); ++idx) out[idx] = flat[static_cast<std::size_t>(idx)];
    return out;
}

}  // namespace

void CpdeParams::validate() const {
    require_positive(tau, "tau");
    require_positive(xi, "xi");
    require_positive(phi, "phi");
    require_nonnegative(psi, "psi");
    require_nonnegative(lambda, "lambda");
    if (!(k > 0.0) || !std::isfinite(k))
        throw ParameterError("CpdeParams: k must be set to a positive value");
    if (!(eps > 0.0 && eps < 1.0))
        throw ParameterError("CpdeParams: eps must lie in (0, 1)");
    require_positive(h_cap, "h_cap");
    if (max_steps < 1) throw ParameterError("CpdeParams: max_steps must be >= 1");
    if (!(solver.tol > 0.0 && solver.tol < 1.0))
        throw ParameterError("CpdeParams: solver.tol must lie in (0, 1)");
    if (solver.max_iter < 1) throw ParameterError("CpdeParams: solver.max_iter must be >= 1");
}

double lambda_for_sigma(double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw ParameterError("lambda_for_sigma: sigma must be positive and finite");
    return 1275.0 / (sigma * sigma);
}

CpdeState init_state(const ImageField& I0, const CpdeParams& params) {
    params.validate();
    if (I0.width() < 2 || I0.height() < 2)
        throw DimensionError("init_state: image must be at least 2x2");
    CpdeState state;
    state.I = I0;
    state.I0 = I0;
    state.v = ImageField(I0.width(), I0.height(), 0.0);
    state.u = convolve(grad_mag_sq(I0), gaussian_kernel(params.xi));
    state.step = 0;
    return state;
}

StepRecord step(CpdeState& state, const CpdeParams& params) {
    params.validate();
    const int w = state.I.width();
    const int h = state.I.height();
    const int next_step = state.step + 1;

    // Edge system: ((1 + tau phi) Id - tau phi (psi^2/2) Lap) u' = u + tau phi h(...)
    const SparseOperator edge_op = assemble_edge_operator(w, h, params.tau, params.phi, params.psi);
    const ImageField source = edge_source(state.I, params.xi, params.h_cap);
    std::vector<double> rhs_u = state.u.data();
    for (int idx = 0; idx < source.size(); ++idx)
        rhs_u[static_cast<std::size_t>(idx)] += params.tau * params.phi * source[idx];
    SolveResult sol_u = bicgstab(edge_op, rhs_u, state.u.data(), params.solver);
    if (!sol_u.report.converged)
        throw SolveError(std::string("edge solve ") +
                             (sol_u.report.breakdown ? "broke down" : "did not converge") +
                             " at step " + std::to_string(next_step),
                         next_step, "edge");

    // Fidelity system: (Id - tau Lap) v' = v + tau (I - I0). The source sign
    // keeps v an accumulator of the data misfit, so the -2 lambda v term in the
    // image system pulls I back toward I0; the opposite sign turns the coupled
    // (I, v) pair into a saddle and the iteration diverges for any lambda > 0.
    const SparseOperator fid_op = assemble_fidelity_operator(w, h, params.tau);
    std::vector<double> rhs_v = state.v.data();
    for (int idx = 0; idx < state.I.size(); ++idx)
        rhs_v[static_cast<std::size_t>(idx)] += params.tau * (state.I[idx] - state.I0[idx]);
    SolveResult sol_v = bicgstab(fid_op, rhs_v, state.v.data(), params.solver);
    if (!sol_v.report.converged)
        throw SolveError(std::string("fidelity solve ") +
                             (sol_v.report.breakdown ? "broke down" : "did not converge") +
                             " at step " + std::to_string(next_step),
                         next_step, "fidelity");

    // Image system: (Id - (tau/2) D_g) I' = I + (tau/2)(D_g I - 2 lambda v),
    // with g frozen at the incoming u and v at the incoming level.
    const ImageField g = diffusivity(state.u, params.k, params.xi);
    const SparseOperator img_op = assemble_image_operator(g, params.tau);
    const ImageField rhs_I = apply_image_explicit(state.I, g, state.v, params.tau, params.lambda);
    SolveResult sol_I = bicgstab(img_op, rhs_I.data(), state.I.data(), params.solver);
    if (!sol_I.report.converged)
        throw SolveError(std::string("image solve ") +
                             (sol_I.report.breakdown ? "broke down" : "did not converge") +
                             " at step " + std::to_string(next_step),
                         next_step, "image");

    const ImageField prev_I = std::move(state.I);
    state.u = to_field(std::move(sol_u.x), w, h);
    state.v = to_field(std::move(sol_v.x), w, h);
    state.I = to_field(std::move(sol_I.x), w, h);
    state.step = next_step;

    StepRecord rec;
    rec.step = next_step;
    const double prev_norm = l2_norm(prev_I);
    if (prev_norm > 0.0) {
        rec.rel_change = relative_change(prev_I, state.I);
    } else {
        // Zero image has no relative scale: unchanged counts as converged.
        rec.rel_change = linf_diff(prev_I, state.I) == 0.0
                             ? 0.0
                             : std::numeric_limits<double>::infinity();
    }
    rec.iters_u = sol_u.report.iterations;
    rec.iters_v = sol_v.report.iterations;
    rec.iters_I = sol_I.report.iterations;
    rec.min_I = min_value(state.I);
    rec.max_I = max_value(state.I);
    return rec;
}

double relative_change(const ImageField& prev, const ImageField& next) {
    require_same_shape(prev, next, "relative_change");
    double diff2 = 0.0;
    double prev2 = 0.0;
    for (int idx = 0; idx < prev.size(); ++idx) {
        const double d = next[idx] - prev[idx];
        diff2 += d * d;
        prev2 += prev[idx] * prev[idx];
    }
    if (prev2 == 0.0) throw RangeError("relative_change: previous iterate has zero norm");
    return diff2 / prev2;
}

DenoiseResult denoise(const ImageField& J, const CpdeParams& params, const Prefilter& prefilter) {
    params.validate();
    const ImageField I0 = prefilter ? prefilter(J) : J;
    CpdeState state = init_state(I0, params);
    DenoiseResult out;
    out.history.reason = StopReason::MaxSteps;
    out.history.records.reserve(static_cast<std::size_t>(params.max_steps));
    for (int s = 0; s < params.max_steps; ++s) {
        const StepRecord rec = step(state, params);
        out.history.records.push_back(rec);
        if (rec.rel_change <= params.eps) {
            out.history.reason = StopReason::Converged;
            break;
        }
    }
    out.image = std::move(state.I);
    return out;
}

}  // namespace cpde
