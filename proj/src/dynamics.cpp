#include "ulpm/dynamics.hpp"

#include "ulpm/certify.hpp"
#include "ulpm/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace ulpm::dynamics {

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kLog2 = 0.6931471805599453;

struct Gradient {
    Matrix W, H;
};

Gradient flow_field(const ParameterPoint& p, double inv_samples) {
    const Matrix G = model::softmax_residual(p);
    return {-inv_samples * (G * p.H.transpose()),
            -inv_samples * (p.W.transpose() * G)};
}

}  // namespace

void FlowConfig::validate(long fallback_max_steps) const {
    if (!(step_size > 0)) throw std::invalid_argument("step_size must be > 0");
    if (max_steps < 1) throw std::invalid_argument("max_steps must be >= 1");
    if (!(init_scale > 0)) throw std::invalid_argument("init_scale must be > 0");
    const long cap = fallback_max_steps >= 0 ? fallback_max_steps : max_steps;
    long prev = -1;
    for (long s : checkpoint_schedule) {
        if (s <= prev)
            throw std::invalid_argument("checkpoint_schedule must be strictly increasing");
        if (s > cap)
            throw std::invalid_argument("checkpoint_schedule exceeds max_steps");
        prev = s;
    }
}

std::vector<long> default_schedule(long max_steps, double ratio) {
    std::vector<long> out{0};
    long t = 1;
    while (t < max_steps) {
        out.push_back(t);
        t = std::max(t + 1, long(std::floor(double(t) * ratio)));
    }
    if (max_steps >= 1) out.push_back(max_steps);
    return out;
}

ParameterPoint init_point(const ProblemShape& shape, double init_scale,
                          std::uint64_t seed) {
    shape.validate();
    if (!(init_scale > 0)) throw std::invalid_argument("init_scale must be > 0");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0,
                                           init_scale / std::sqrt(shape.dim));
    ParameterPoint p;
    p.shape = shape;
    p.W.resize(shape.classes, shape.dim);
    p.H.resize(shape.dim, shape.samples());
    for (int r = 0; r < p.W.rows(); ++r)
        for (int c = 0; c < p.W.cols(); ++c) p.W(r, c) = gauss(rng);
    for (int r = 0; r < p.H.rows(); ++r)
        for (int c = 0; c < p.H.cols(); ++c) p.H(r, c) = gauss(rng);
    return p;
}

FlowResult run_flow(const ParameterPoint& p0, const FlowConfig& cfg) {
    p0.validate();
    cfg.validate();

    std::vector<long> schedule = cfg.checkpoint_schedule.empty()
                                     ? default_schedule(cfg.max_steps)
                                     : cfg.checkpoint_schedule;

    FlowResult result;
    result.point = p0;
    if (p0.shape.narrow_for_etf())
        result.record.warnings.push_back(
            "dim < classes - 1: the simplex geometry cannot embed");

    const double inv_samples = 1.0 / double(p0.shape.samples());
    const double h = cfg.step_size;

    ParameterPoint p = p0;
    std::size_t next_cp = 0;
    bool was_separated = false;

    auto record_checkpoint = [&](long step, double loss_value) {
        Checkpoint cp;
        cp.step = step;
        cp.loss = loss_value;
        cp.rho_sq = p.joint_norm_sq();
        cp.gamma_tilde = -model::log_expm1(loss_value) / cp.rho_sq;
        if (!std::isfinite(cp.gamma_tilde)) cp.gamma_tilde = kNaN;

        const auto [gw, gh] = model::gradient(p);
        const double gnorm = std::sqrt(gw.squaredNorm() + gh.squaredNorm());
        cp.beta = gnorm >= 1e-300
                      ? std::clamp(-(p.W.cwiseProduct(gw).sum() +
                                     p.H.cwiseProduct(gh).sum()) /
                                       (std::sqrt(cp.rho_sq) * gnorm),
                                   -1.0, 1.0)
                      : kNaN;

        cp.q_min = model::margins(p).q_min;
        cp.separated = loss_value < kLog2;
        if (was_separated && !cp.separated)
            result.record.warnings.push_back(
                "separation lost at step " + std::to_string(step) +
                "; step size may be too large");
        was_separated = was_separated || cp.separated;

        cp.nc = geometry::nc_metrics(p);
        cp.eps_direct = cp.delta_direct = cp.eps_bound = cp.delta_bound = kNaN;
        if (cp.separated && cp.q_min > 0) {
            const auto cert = certify::certificate(p);
            cp.eps_direct = cert.eps;
            cp.delta_direct = cert.delta;
            cp.eps_bound = cert.eps_bound;
            cp.delta_bound = cert.delta_bound;
        }
        result.record.checkpoints.push_back(std::move(cp));
    };

    for (long step = 0; step <= cfg.max_steps; ++step) {
        const double L = model::loss(p);
        if (!std::isfinite(L)) {
            result.record.status = FlowStatus::diverged;
            result.record.steps_run = step;
            return result;
        }
        result.point = p;
        result.record.steps_run = step;

        if (next_cp < schedule.size() && schedule[next_cp] == step) {
            record_checkpoint(step, L);
            ++next_cp;
        }
        if (step == cfg.max_steps) break;

        if (cfg.integrator == Integrator::euler) {
            const auto f = flow_field(p, inv_samples);
            p.W += h * f.W;
            p.H += h * f.H;
        } else {
            const auto k1 = flow_field(p, inv_samples);
            ParameterPoint q = p;
            q.W = p.W + 0.5 * h * k1.W;
            q.H = p.H + 0.5 * h * k1.H;
            const auto k2 = flow_field(q, inv_samples);
            q.W = p.W + 0.5 * h * k2.W;
            q.H = p.H + 0.5 * h * k2.H;
            const auto k3 = flow_field(q, inv_samples);
            q.W = p.W + h * k3.W;
            q.H = p.H + h * k3.H;
            const auto k4 = flow_field(q, inv_samples);
            p.W += (h / 6.0) * (k1.W + 2.0 * k2.W + 2.0 * k3.W + k4.W);
            p.H += (h / 6.0) * (k1.H + 2.0 * k2.H + 2.0 * k3.H + k4.H);
        }
        if (!p.W.allFinite() || !p.H.allFinite()) {
            result.record.status = FlowStatus::diverged;
            result.record.steps_run = step + 1;
            return result;
        }
    }
    result.record.status = FlowStatus::completed;
    return result;
}

RateFit fit_loss_rate(const TrajectoryRecord& rec, long from_step) {
    std::vector<double> xs, ys;
    for (const auto& cp : rec.checkpoints) {
        if (!cp.separated || cp.step < from_step) continue;
        if (cp.loss <= 0) continue;
        xs.push_back(double(cp.step));
        ys.push_back(1.0 / cp.loss);
    }
    if (xs.size() < 10)
        throw std::domain_error(
            "fit_loss_rate: needs at least 10 separated checkpoints, got " +
            std::to_string(xs.size()));

    const double N = double(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double denom = N * sxx - sx * sx;
    RateFit fit;
    fit.points_used = long(xs.size());
    fit.slope = denom != 0 ? (N * sxy - sx * sy) / denom : 0.0;
    const double intercept = (sy - fit.slope * sx) / N;

    double ss_tot = 0, ss_res = 0;
    const double ymean = sy / N;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        ss_tot += (ys[i] - ymean) * (ys[i] - ymean);
        const double r = ys[i] - (intercept + fit.slope * xs[i]);
        ss_res += r * r;
    }
    fit.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : kNaN;
    return fit;
}

}  // namespace ulpm::dynamics
