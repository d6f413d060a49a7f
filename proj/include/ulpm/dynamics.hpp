#pragma once

#include "ulpm/geometry.hpp"
#include "ulpm/types.hpp"

#include <vector>

namespace ulpm::dynamics {

enum class Integrator { euler, rk4 };

/// Discretization of the gradient flow. step_size is the learning rate in
/// the mean-reduction convention: one step moves by
/// step_size * grad / (n K). The unnormalized objective only rescales the
/// flow clock, and this convention is the one under which the desk-scale
/// rates behave.
struct FlowConfig {
    double step_size = 0.1;
    long max_steps = 10000;
    std::vector<long> checkpoint_schedule;  // empty -> default_schedule(max_steps)
    std::uint64_t seed = 0;
    double init_scale = 0.1;
    Integrator integrator = Integrator::euler;

    void validate(long fallback_max_steps = -1) const;
};

/// Geometric checkpoint grid (ratio ~1.2) including step 0 and max_steps.
std::vector<long> default_schedule(long max_steps, double ratio = 1.2);

/// i.i.d. Gaussian entries with standard deviation init_scale/sqrt(d) for
/// both blocks; bit-reproducible for a fixed seed.
ParameterPoint init_point(const ProblemShape& shape, double init_scale,
                          std::uint64_t seed);

struct Checkpoint {
    long step = 0;
    double loss = 0.0;
    double rho_sq = 0.0;        // ||W||_F^2 + ||H||_F^2
    double gamma_tilde = 0.0;   // -log(e^L - 1)/rho^2; NaN when saturated
    double beta = 0.0;          // cos(theta, -grad); NaN when gradient underflows
    double q_min = 0.0;
    bool separated = false;     // loss < log 2
    geometry::NcMetrics nc{};
    // Certificate residuals, filled only at separated checkpoints.
    double eps_direct, delta_direct, eps_bound, delta_bound;
};

enum class FlowStatus { completed, diverged };

struct TrajectoryRecord {
    std::vector<Checkpoint> checkpoints;
    FlowStatus status = FlowStatus::completed;
    long steps_run = 0;
    std::vector<std::string> warnings;
};

struct FlowResult {
    ParameterPoint point;  // final (or last finite, when diverged)
    TrajectoryRecord record;
};

/// Iterates the configured integrator from p0, recording every scheduled
/// checkpoint. A non-finite loss aborts with FlowStatus::diverged and the
/// record keeps everything up to the last finite checkpoint.
FlowResult run_flow(const ParameterPoint& p0, const FlowConfig& cfg);

struct RateFit {
    double slope = 0.0;
    double r_squared = 0.0;
    long points_used = 0;
};

/// Least-squares fit of 1/loss against the step index over separated
/// checkpoints with step >= from_step. Throws if fewer than 10 qualify;
/// r_squared is NaN for a degenerate (constant) series.
RateFit fit_loss_rate(const TrajectoryRecord& rec, long from_step = 0);

}  // namespace ulpm::dynamics
