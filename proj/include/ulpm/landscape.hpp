#pragma once

#include "ulpm/geometry.hpp"
#include "ulpm/types.hpp"

#include <vector>

namespace ulpm::landscape {

struct RadialTest {
    bool is_radial = false;
    double lambda_hat = 0.0;         // least-squares fit of -grad ~ lambda * theta
    double relative_residual = 0.0;  // ||-grad - lambda theta|| / ||grad||
};

/// A point is radial (a stationary direction) when its negative gradient
/// is parallel to the parameters; gradient flow then only grows the norm.
RadialTest radial_test(const ParameterPoint& p, double tol = 1e-8);

enum class EscapeKind {
    second_order,    // tangent direction with negative curvature
    first_order,     // gradient not radial; tangent-projected descent
    no_escape,       // |lambda| reaches the spectral norm: candidate optimum
    not_applicable,  // stacked [W; H'] has no null vector to build from
};

struct EscapeProbeResult {
    EscapeKind kind = EscapeKind::not_applicable;
    bool is_radial = false;
    double lambda_hat = 0.0;
    double spectral_norm = 0.0;  // ||grad L(WH)||_2
    Matrix delta_w;              // tangent direction, unit joint Frobenius norm
    Matrix delta_h;
    double curvature = 0.0;      // central-difference second derivative along it
    double loss_drop = 0.0;      // best sphere-projected decrease over the probe grid
    double best_delta = 0.0;
    std::string diagnostic;
};

/// Second-order probe. At a radial point with |lambda| below the spectral
/// norm of the logit gradient, builds dW = u a', dH = -a v' from the top
/// singular pair of grad L(WH) and a null vector a of the stacked
/// [W; H'], then probes geometrically spaced step sizes with re-projection
/// to the original sphere radius.
EscapeProbeResult escape_direction(const ParameterPoint& p);

/// End-to-end study of the K=4 rank-two stationary direction: the fixed
/// classifier pattern whose gradient is exactly radial yet whose tangent
/// space carries negative curvature.
struct Example31Report {
    double loss_value = 0.0;
    double q_min = 0.0;
    std::array<int, 3> q_argmin{};
    double gradient_coefficient = 0.0;  // c in grad_W L = c W, least-squares
    double gradient_residual = 0.0;     // ||grad_W L - c W||_F
    bool radial = false;
    double lambda_hat = 0.0;
    // Residuals of the half-weight cross-block multiplier pattern at the
    // point scaled to binding gaps 1.
    double pattern_eps = 0.0;
    double pattern_delta = 0.0;
    bool scaled_feasible = false;
    int binding_constraints = 0;
    // Loss restricted to the symmetric perturbation family, reduced to the
    // inner exponential sum f; derivatives by five-point stencils.
    std::vector<double> alpha_grid;
    std::vector<double> f_values;
    double f_prime_at_zero = 0.0;
    double f_second_deriv_at_zero = 0.0;
    // Escape probe at the point.
    double escape_curvature = 0.0;
    double escape_loss_drop = 0.0;
    double escape_best_delta = 0.0;
    // Plain descent stays on the ray; descent with curvature kicks leaves it.
    double stuck_direction_drift = 0.0;
    long stuck_steps = 0;
    std::array<double, 6> perturbed_final_metrics{};
    long perturbed_steps = 0;
    long perturbed_kicks = 0;
};

Example31Report example_3_1_scenario();

/// The fixed matrices of the scenario (W == H, K = 4, n = 1, d = 4).
ParameterPoint example_3_1_point();

}  // namespace ulpm::landscape
