#include "ulpm/model.hpp"

#include <cmath>
#include <limits>

namespace ulpm::model {

namespace {

// Logits Z = W H, one column per sample (k,i).
Matrix logits(const ParameterPoint& p) { return p.W * p.H; }

}  // namespace

double log_expm1(double x) {
    if (x < 1e-300) return -std::numeric_limits<double>::infinity();
    if (x > 0.6931471805599453)  // log 2; e^x - 1 > 1, direct form is exact enough
        return x + std::log1p(-std::exp(-x));
    return std::log(std::expm1(x));
}

double loss(const ParameterPoint& p) {
    p.validate();
    const Matrix Z = logits(p);
    const int n = p.shape.per_class;
    double total = 0.0;
    for (int c = 0; c < Z.cols(); ++c) {
        const int k = c / n;
        const double zmax = Z.col(c).maxCoeff();
        double sum = 0.0;
        for (int j = 0; j < Z.rows(); ++j) sum += std::exp(Z(j, c) - zmax);
        // log-sum-exp minus the true-class logit
        total += std::log(sum) + zmax - Z(k, c);
    }
    return total;
}

Matrix softmax_residual(const ParameterPoint& p) {
    p.validate();
    Matrix G = logits(p);
    const int n = p.shape.per_class;
    for (int c = 0; c < G.cols(); ++c) {
        const double zmax = G.col(c).maxCoeff();
        G.col(c) = (G.col(c).array() - zmax).exp();
        G.col(c) /= G.col(c).sum();
        G(c / n, c) -= 1.0;
    }
    return G;
}

std::pair<Matrix, Matrix> gradient(const ParameterPoint& p) {
    const Matrix G = softmax_residual(p);
    return {G * p.H.transpose(), p.W.transpose() * G};
}

MarginReport margins(const ParameterPoint& p) {
    p.validate();
    const Matrix Z = logits(p);
    const int K = p.shape.classes;
    const int n = p.shape.per_class;

    MarginReport rep;
    rep.gaps.resize(K, Z.cols());
    rep.per_sample.resize(Z.cols());
    rep.q_min = std::numeric_limits<double>::infinity();

    for (int k = 0; k < K; ++k) {
        for (int i = 0; i < n; ++i) {
            const int c = p.shape.col(k, i);
            double q = std::numeric_limits<double>::infinity();
            for (int j = 0; j < K; ++j) {
                const double s = Z(k, c) - Z(j, c);
                rep.gaps(j, c) = s;
                if (j != k && s < q) q = s;
            }
            rep.per_sample(c) = q;
            // strict < keeps the lexicographically smallest (k,i,j)
            for (int j = 0; j < K; ++j) {
                if (j == k) continue;
                if (rep.gaps(j, c) < rep.q_min) {
                    rep.q_min = rep.gaps(j, c);
                    rep.argmin = {k, i, j};
                }
            }
        }
    }
    return rep;
}

double margin_upper_bound(const ParameterPoint& p) {
    p.shape.validate();
    return p.joint_norm_sq() /
           (2.0 * (p.shape.classes - 1) * std::sqrt(double(p.shape.per_class)));
}

}  // namespace ulpm::model
