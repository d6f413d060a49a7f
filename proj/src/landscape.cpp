#include "ulpm/landscape.hpp"

#include "ulpm/certify.hpp"
#include "ulpm/model.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <optional>

namespace ulpm::landscape {

namespace {

struct Direction {
    Matrix W, H;
};

double joint_dot(const Matrix& aw, const Matrix& ah, const Matrix& bw,
                 const Matrix& bh) {
    return aw.cwiseProduct(bw).sum() + ah.cwiseProduct(bh).sum();
}

ParameterPoint stepped(const ParameterPoint& p, const Direction& d, double t) {
    ParameterPoint q = p;
    q.W += t * d.W;
    q.H += t * d.H;
    return q;
}

ParameterPoint projected_to_radius(const ParameterPoint& p, double radius) {
    ParameterPoint q = p;
    const double scale = radius / q.joint_norm();
    q.W *= scale;
    q.H *= scale;
    return q;
}

double directional_curvature(const ParameterPoint& p, const Direction& d) {
    const double h = 1e-4 * std::max(1.0, p.joint_norm());
    const double l0 = model::loss(p);
    return (model::loss(stepped(p, d, h)) - 2.0 * l0 +
            model::loss(stepped(p, d, -h))) /
           (h * h);
}

// Best sphere-projected loss decrease over six probe decades.
void probe_drops(const ParameterPoint& p, const Direction& d,
                 EscapeProbeResult& out) {
    const double radius = p.joint_norm();
    const double l0 = model::loss(p);
    out.loss_drop = 0.0;
    out.best_delta = 0.0;
    for (int e = 1; e <= 6; ++e) {
        const double delta = std::pow(10.0, -e);
        const double drop =
            l0 - model::loss(projected_to_radius(stepped(p, d, delta), radius));
        if (drop > out.loss_drop) {
            out.loss_drop = drop;
            out.best_delta = delta;
        }
    }
}

// The Appendix-style tangent construction: a in the null space of the
// stacked [W; H'], u/v the top singular pair of the logit gradient.
std::optional<Direction> second_order_direction(const ParameterPoint& p,
                                                const Matrix& G,
                                                double lambda_hat,
                                                double* sigma1_out,
                                                std::string* diag) {
    Matrix stacked(p.W.rows() + p.H.cols(), p.W.cols());
    stacked.topRows(p.W.rows()) = p.W;
    stacked.bottomRows(p.H.cols()) = p.H.transpose();
    Eigen::JacobiSVD<Matrix> stack_svd(stacked, Eigen::ComputeThinV);
    const auto& sv = stack_svd.singularValues();
    if (sv(sv.size() - 1) > 1e-8 * sv(0)) {
        if (diag)
            *diag = "stacked [W; H'] has full column rank; no tangent null "
                    "vector (requires dim above the factor rank)";
        return std::nullopt;
    }
    const Vector a = stack_svd.matrixV().col(sv.size() - 1);

    Eigen::JacobiSVD<Matrix> gsvd(G, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double sigma1 = gsvd.singularValues()(0);
    if (sigma1_out) *sigma1_out = sigma1;
    if (std::abs(lambda_hat) >= sigma1 - 1e-8 * std::max(1.0, sigma1)) {
        if (diag)
            *diag = "|lambda| reaches the spectral norm of the logit "
                    "gradient; candidate global direction";
        return std::nullopt;
    }

    Direction d;
    d.W = gsvd.matrixU().col(0) * a.transpose();
    d.H = -a * gsvd.matrixV().col(0).transpose();
    const double norm = std::sqrt(d.W.squaredNorm() + d.H.squaredNorm());
    d.W /= norm;
    d.H /= norm;
    return d;
}

}  // namespace

RadialTest radial_test(const ParameterPoint& p, double tol) {
    p.validate();
    const double rho_sq = p.joint_norm_sq();
    if (rho_sq <= 0) throw std::invalid_argument("radial_test: zero point");

    const auto [gw, gh] = model::gradient(p);
    const double gnorm = std::sqrt(gw.squaredNorm() + gh.squaredNorm());

    RadialTest rt;
    rt.lambda_hat = -joint_dot(gw, gh, p.W, p.H) / rho_sq;
    if (gnorm < 1e-300) {  // exactly stationary; trivially radial
        rt.is_radial = true;
        rt.relative_residual = 0.0;
        return rt;
    }
    const Matrix rw = -gw - rt.lambda_hat * p.W;
    const Matrix rh = -gh - rt.lambda_hat * p.H;
    rt.relative_residual =
        std::sqrt(rw.squaredNorm() + rh.squaredNorm()) / gnorm;
    rt.is_radial = rt.relative_residual <= tol;
    return rt;
}

EscapeProbeResult escape_direction(const ParameterPoint& p) {
    p.validate();
    const auto rt = radial_test(p);

    EscapeProbeResult out;
    out.is_radial = rt.is_radial;
    out.lambda_hat = rt.lambda_hat;

    const Matrix G = model::softmax_residual(p);
    Eigen::JacobiSVD<Matrix> gsvd(G);
    out.spectral_norm = gsvd.singularValues()(0);

    if (!rt.is_radial) {
        // Gradient still has a tangent component; that is already a
        // first-order escape once projected.
        const auto [gw, gh] = model::gradient(p);
        Direction d{-gw, -gh};
        const double radial_part =
            joint_dot(d.W, d.H, p.W, p.H) / p.joint_norm_sq();
        d.W -= radial_part * p.W;
        d.H -= radial_part * p.H;
        const double norm = std::sqrt(d.W.squaredNorm() + d.H.squaredNorm());
        d.W /= norm;
        d.H /= norm;
        out.kind = EscapeKind::first_order;
        out.delta_w = d.W;
        out.delta_h = d.H;
        out.curvature = directional_curvature(p, d);
        probe_drops(p, d, out);
        return out;
    }

    std::string diag;
    const auto d =
        second_order_direction(p, G, rt.lambda_hat, &out.spectral_norm, &diag);
    if (!d) {
        out.diagnostic = diag;
        out.kind = std::abs(rt.lambda_hat) >=
                           out.spectral_norm -
                               1e-8 * std::max(1.0, out.spectral_norm)
                       ? EscapeKind::no_escape
                       : EscapeKind::not_applicable;
        return out;
    }
    out.kind = EscapeKind::second_order;
    out.delta_w = d->W;
    out.delta_h = d->H;
    out.curvature = directional_curvature(p, *d);
    probe_drops(p, *d, out);
    return out;
}

ParameterPoint example_3_1_point() {
    ParameterPoint p;
    p.shape = {4, 1, 4};
    p.W.resize(4, 4);
    p.W << 1, -1, 0, 0,
          -1,  1, 0, 0,
           0,  0, 1, -1,
           0,  0, -1, 1;
    p.H = p.W;
    return p;
}

namespace {

// Raw-gradient descent used by the scenario runs; the step multiplies the
// unnormalized gradient directly.
ParameterPoint plain_descent(ParameterPoint p, double step, long steps) {
    for (long t = 0; t < steps; ++t) {
        const auto [gw, gh] = model::gradient(p);
        p.W -= step * gw;
        p.H -= step * gh;
    }
    return p;
}

// Descent with periodic curvature kicks: whenever the direction is near
// radial, step a fixed fraction of the norm along the constructed escape
// direction and re-project to the sphere. Deterministic.
ParameterPoint kicked_descent(ParameterPoint p, double step, long steps,
                              long kick_every, double kick_fraction,
                              long* kicks_out) {
    long kicks = 0;
    for (long t = 0; t < steps; ++t) {
        if (t > 0 && t % kick_every == 0) {
            const auto rt = radial_test(p, 0.5);
            if (rt.is_radial) {
                const Matrix G = model::softmax_residual(p);
                const auto d =
                    second_order_direction(p, G, rt.lambda_hat, nullptr, nullptr);
                if (d) {
                    const double rho = p.joint_norm();
                    p = projected_to_radius(
                        stepped(p, *d, kick_fraction * rho), rho);
                    ++kicks;
                    continue;
                }
            }
        }
        const auto [gw, gh] = model::gradient(p);
        p.W -= step * gw;
        p.H -= step * gh;
    }
    if (kicks_out) *kicks_out = kicks;
    return p;
}

double family_inner_sum(double alpha) {
    // Loss of the symmetric perturbation family, reduced to the inner
    // exponential sum via L/4 = log(e^2 + f) - 2.
    const double s = std::sqrt(1.0 / (1.0 + 2.0 * alpha * alpha));
    Matrix Wp(4, 4);
    const double a = alpha;
    Wp << 1 + a, -1 + a, a, a,
         -1 + a, 1 + a, a, a,
         -a, -a, 1 - a, -1 - a,
         -a, -a, -1 - a, 1 - a;
    Wp *= s;
    ParameterPoint p;
    p.shape = {4, 1, 4};
    p.W = Wp;
    p.H = Wp.transpose();
    return std::exp(model::loss(p) / 4.0 + 2.0) - std::exp(2.0);
}

}  // namespace

Example31Report example_3_1_scenario() {
    const ParameterPoint p = example_3_1_point();
    Example31Report rep;

    rep.loss_value = model::loss(p);
    const auto marg = model::margins(p);
    rep.q_min = marg.q_min;
    rep.q_argmin = marg.argmin;

    const auto [gw, gh] = model::gradient(p);
    rep.gradient_coefficient =
        gw.cwiseProduct(p.W).sum() / p.W.squaredNorm();
    rep.gradient_residual = (gw - rep.gradient_coefficient * p.W).norm();

    const auto rt = radial_test(p);
    rep.radial = rt.is_radial;
    rep.lambda_hat = rt.lambda_hat;

    // Scale so the binding gaps sit at 1, then evaluate the half-weight
    // cross-block multiplier pattern.
    ParameterPoint scaled = p;
    const double inv = 1.0 / std::sqrt(rep.q_min);
    scaled.W *= inv;
    scaled.H *= inv;
    rep.scaled_feasible = certify::separation_feasible(scaled);
    const auto scaled_margins = model::margins(scaled);
    for (int c = 0; c < scaled_margins.gaps.cols(); ++c)
        for (int j = 0; j < scaled_margins.gaps.rows(); ++j)
            if (j != c && std::abs(scaled_margins.gaps(j, c) - 1.0) <= 1e-12)
                ++rep.binding_constraints;

    std::vector<double> lambdas(4 * 4, 0.0);
    for (int k = 0; k < 4; ++k)
        for (int j = 0; j < 4; ++j) {
            const bool cross_block = (k < 2) != (j < 2);
            if (cross_block) lambdas[size_t(k) * 4 + j] = 0.5;
        }
    const auto res = certify::kkt_residuals(scaled, lambdas);
    rep.pattern_eps = res.eps;
    rep.pattern_delta = res.delta;

    const int grid_points = 41;
    for (int i = 0; i < grid_points; ++i) {
        const double alpha = -0.2 + 0.4 * i / (grid_points - 1);
        rep.alpha_grid.push_back(alpha);
        rep.f_values.push_back(family_inner_sum(alpha));
    }
    const double h = 1e-2;
    rep.f_prime_at_zero =
        (family_inner_sum(h) - family_inner_sum(-h)) / (2.0 * h);
    rep.f_second_deriv_at_zero =
        (-family_inner_sum(2 * h) + 16 * family_inner_sum(h) -
         30 * family_inner_sum(0) + 16 * family_inner_sum(-h) -
         family_inner_sum(-2 * h)) /
        (12.0 * h * h);

    const auto probe = escape_direction(p);
    rep.escape_curvature = probe.curvature;
    rep.escape_loss_drop = probe.loss_drop;
    rep.escape_best_delta = probe.best_delta;

    rep.stuck_steps = 1000;
    const ParameterPoint stuck = plain_descent(p, 0.5, rep.stuck_steps);
    {
        const double n0 = p.joint_norm(), n1 = stuck.joint_norm();
        const Matrix dw = stuck.W / n1 - p.W / n0;
        const Matrix dh = stuck.H / n1 - p.H / n0;
        rep.stuck_direction_drift =
            std::sqrt(dw.squaredNorm() + dh.squaredNorm());
    }

    rep.perturbed_steps = 100000;
    const ParameterPoint escaped = kicked_descent(
        p, 0.5, rep.perturbed_steps, 1000, 0.15, &rep.perturbed_kicks);
    rep.perturbed_final_metrics = geometry::nc_metrics(escaped).as_array();
    return rep;
}

}  // namespace ulpm::landscape
