#pragma once

#include <functional>
#include <vector>

#include "cpde/field.hpp"
#include "cpde/solver.hpp"

namespace cpde {

struct CpdeParams {
    double tau = 0.1;      // time step
    double xi = 1.0;       // Gaussian smoothing std (pixels)
    double phi = 1.0;      // edge relaxation rate
    double psi = 1.0;      // edge smoothing strength
    double lambda = 0.0;   // fidelity weight
    double k = 0.0;        // diffusivity threshold; no default, must be set > 0
    double eps = 1e-4;     // stopping threshold on the squared relative change
    double h_cap = 65025.0;  // edge-source truncation (255^2)
    int max_steps = 500;
    SolverConfig solver;

    /// Throws ParameterError on any violated constraint.
    void validate() const;
};

/// Fidelity weight from the noise level: 1275 / sigma^2. The constant is a
/// tunable default, inversely proportional to the noise variance.
double lambda_for_sigma(double sigma);

struct CpdeState {
    ImageField I;   // evolving image
    ImageField u;   // edge strength
    ImageField v;   // fidelity variable
    ImageField I0;  // frozen initial image
    int step = 0;
};

struct StepRecord {
    int step = 0;  // 1-based
    double rel_change = 0.0;
    int iters_u = 0;
    int iters_v = 0;
    int iters_I = 0;
    double min_I = 0.0;
    double max_I = 0.0;
};

enum class StopReason { Converged, MaxSteps };

struct RunHistory {
    std::vector<StepRecord> records;
    StopReason reason = StopReason::Converged;
};

struct DenoiseResult {
    ImageField image;
    RunHistory history;
};

/// I = I0, v = 0, u = G_xi * |grad I0|^2 (smoothing applied after squaring).
/// Requires both dimensions >= 2.
CpdeState init_state(const ImageField& I0, const CpdeParams& params);

/// One step of the scheme: solve the edge, fidelity, and image systems in that
/// order, every right-hand side built from the incoming state. Each solve warm
/// starts from the previous field. Throws SolveError (carrying the step index
/// and system name) if a solve breaks down or fails to converge.
StepRecord step(CpdeState& state, const CpdeParams& params);

/// ||next - prev||_2^2 / ||prev||_2^2; throws RangeError when ||prev|| = 0.
double relative_change(const ImageField& prev, const ImageField& next);

using Prefilter = std::function<ImageField(const ImageField&)>;

/// Runs init_state on prefilter(J) (identity when prefilter is empty), then
/// steps until the relative change drops to params.eps or max_steps is reached.
DenoiseResult denoise(const ImageField& J, const CpdeParams& params,
                      const Prefilter& prefilter = {});

}  // namespace cpde
