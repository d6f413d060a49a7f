#include "ulpm/certify.hpp"

#include "ulpm/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ulpm::certify {

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kLog2 = 0.6931471805599453;

// Sum of lambda-weighted constraint gradients at a candidate point,
// assembled sparsely: constraint (k,i,j) touches rows w_k, w_j and the
// single feature column (k,i). Collapses to (S - Lambda) H' and
// W' (S - Lambda) with S carrying the per-column multiplier sums on the
// true-class row.
std::pair<Matrix, Matrix> weighted_constraint_gradients(
    const ParameterPoint& p, const Matrix& lambda_mat) {
    const int n = p.shape.per_class;
    Matrix R = -lambda_mat;
    for (int c = 0; c < R.cols(); ++c)
        R(c / n, c) += lambda_mat.col(c).sum();
    return {R * p.H.transpose(), p.W.transpose() * R};
}

Matrix lambda_matrix(const ParameterPoint& p,
                     std::span<const double> lambdas) {
    const int K = p.shape.classes;
    const int cols = p.shape.samples();
    if (static_cast<int>(lambdas.size()) != cols * K)
        throw std::invalid_argument("lambdas must have K*n*K entries");
    Matrix L(K, cols);
    for (int c = 0; c < cols; ++c)
        for (int j = 0; j < K; ++j) L(j, c) = lambdas[c * K + j];
    return L;
}

KktResiduals residuals_impl(const ParameterPoint& normalized,
                            const Matrix& lambda_mat) {
    const auto [TW, TH] = weighted_constraint_gradients(normalized, lambda_mat);
    KktResiduals r;
    r.eps = std::sqrt((normalized.W - TW).squaredNorm() +
                      (normalized.H - TH).squaredNorm());

    const auto rep = model::margins(normalized);
    const int n = normalized.shape.per_class;
    double worst = 0.0, sum = 0.0;
    for (int c = 0; c < rep.gaps.cols(); ++c) {
        const int k = c / n;
        for (int j = 0; j < rep.gaps.rows(); ++j) {
            if (j == k) continue;
            const double term = lambda_mat(j, c) * (rep.gaps(j, c) - 1.0);
            sum += term;
            worst = std::max(worst, term);
        }
    }
    r.delta = worst;
    r.delta_sum = sum;
    return r;
}

}  // namespace

KktResiduals kkt_residuals(const ParameterPoint& normalized,
                           std::span<const double> lambdas) {
    normalized.validate();
    return residuals_impl(normalized, lambda_matrix(normalized, lambdas));
}

KktCertificate certificate(const ParameterPoint& p) {
    p.validate();
    const auto rep = model::margins(p);
    if (!(rep.q_min > 0.0))
        throw std::domain_error(
            "certificate: point does not separate the data (q_min <= 0)");

    const int K = p.shape.classes;
    const int n = p.shape.per_class;
    const double L = model::loss(p);
    const Matrix G = model::softmax_residual(p);
    const Matrix grad_w = G * p.H.transpose();
    const Matrix grad_h = p.W.transpose() * G;

    const double rho = p.joint_norm();
    const double gnorm =
        std::sqrt(grad_w.squaredNorm() + grad_h.squaredNorm());
    // beta = cos(theta, -grad); g = -grad is the flow velocity
    double beta = kNaN;
    if (gnorm >= 1e-300)
        beta = std::clamp(
            -(p.W.cwiseProduct(grad_w).sum() + p.H.cwiseProduct(grad_h).sum()) /
                (rho * gnorm),
            -1.0, 1.0);

    KktCertificate cert;
    cert.q_min = rep.q_min;
    cert.beta = beta;
    cert.gamma_tilde = -model::log_expm1(L) / p.joint_norm_sq();

    // lambda_{k,i,j} = (rho/||g||) e^{-s_{k,i,j}} / (1 + sum_l e^{-s_{k,i,l}}),
    // which is exactly the off-class softmax probability rescaled.
    Matrix lambda_mat(K, p.shape.samples());
    const double scale = gnorm >= 1e-300 ? rho / gnorm : kNaN;
    for (int c = 0; c < lambda_mat.cols(); ++c) {
        const int k = c / n;
        for (int j = 0; j < K; ++j)
            lambda_mat(j, c) = j == k ? 0.0 : scale * G(j, c);
    }

    cert.normalized_point = p;
    const double inv = 1.0 / std::sqrt(rep.q_min);
    cert.normalized_point.W *= inv;
    cert.normalized_point.H *= inv;
    cert.feasible =
        model::margins(cert.normalized_point).q_min >= 1.0 - 1e-12;

    const auto res = residuals_impl(cert.normalized_point, lambda_mat);
    cert.eps = res.eps;
    cert.delta = res.delta;
    cert.delta_sum = res.delta_sum;

    if (L < kLog2 && std::isfinite(cert.gamma_tilde) && cert.gamma_tilde > 0) {
        cert.eps_bound =
            std::sqrt(std::max(0.0, 2.0 * (1.0 - beta)) / cert.gamma_tilde);
        cert.delta_bound = double(K) * K * (K - 1) * n /
                           (2.0 * std::exp(1.0) * cert.gamma_tilde * rep.q_min);
    } else {
        cert.eps_bound = kNaN;
        cert.delta_bound = kNaN;
    }

    cert.lambdas.assign(size_t(p.shape.samples()) * K, 0.0);
    for (int c = 0; c < lambda_mat.cols(); ++c)
        for (int j = 0; j < K; ++j) cert.lambdas[size_t(c) * K + j] = lambda_mat(j, c);
    return cert;
}

MfcqReport mfcq_check(const ParameterPoint& p) {
    const auto rep = model::margins(p);
    const int n = p.shape.per_class;
    MfcqReport out;
    for (int c = 0; c < rep.gaps.cols(); ++c) {
        const int k = c / n;
        for (int j = 0; j < rep.gaps.rows(); ++j) {
            if (j == k) continue;
            if (!(rep.gaps(j, c) > 0.0)) {
                out.satisfied = false;
                out.violating = {{k, c % n, j}};
                return out;
            }
        }
    }
    out.satisfied = true;
    return out;
}

bool separation_feasible(const ParameterPoint& p) {
    return model::margins(p).q_min >= 1.0 - 1e-12;
}

}  // namespace ulpm::certify
