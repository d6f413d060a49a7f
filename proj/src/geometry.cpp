#include "ulpm/geometry.hpp"

#include <Eigen/QR>

#include <cmath>
#include <limits>
#include <random>

namespace ulpm::geometry {

namespace {

constexpr double kDenominatorFloor = 1e-15;
const double kNaN = std::numeric_limits<double>::quiet_NaN();

double guarded_ratio(double num, double den) {
    return den < kDenominatorFloor ? kNaN : num / den;
}

}  // namespace

EtfFrame make_etf(int classes, int dim, std::uint64_t seed) {
    if (classes < 2) throw std::invalid_argument("make_etf: classes must be >= 2");
    if (dim < classes)
        throw std::invalid_argument(
            "make_etf: dim must be >= classes for a column-orthogonal factor");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix A(dim, classes);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < classes; ++c) A(r, c) = gauss(rng);

    Eigen::HouseholderQR<Matrix> qr(A);
    Matrix Q = qr.householderQ() * Matrix::Identity(dim, classes);
    const Matrix R = qr.matrixQR().topRows(classes);
    for (int c = 0; c < classes; ++c)
        if (R(c, c) < 0) Q.col(c) = -Q.col(c);

    const double K = classes;
    Matrix centering =
        Matrix::Identity(classes, classes) - Matrix::Constant(classes, classes, 1.0 / K);

    EtfFrame frame;
    frame.q_factor = Q;
    frame.directions = std::sqrt(K / (K - 1.0)) * Q * centering;
    frame.scale = 1.0;
    return frame;
}

ParameterPoint nc_solution(const ProblemShape& shape, double radius,
                           std::uint64_t seed) {
    shape.validate();
    if (radius <= 0) throw std::invalid_argument("nc_solution: radius must be > 0");
    const EtfFrame frame = make_etf(shape.classes, shape.dim, seed);

    // h_{k,i} = c m_k and w_k = sqrt(n) c m_k gives ||W||_F = ||H||_F and
    // joint norm radius when c = radius / sqrt(2 n K).
    const double c =
        radius / std::sqrt(2.0 * shape.per_class * shape.classes);

    ParameterPoint p;
    p.shape = shape;
    p.W = std::sqrt(double(shape.per_class)) * c * frame.directions.transpose();
    p.H.resize(shape.dim, shape.samples());
    for (int k = 0; k < shape.classes; ++k)
        for (int i = 0; i < shape.per_class; ++i)
            p.H.col(shape.col(k, i)) = c * frame.directions.col(k);
    return p;
}

NcMetrics nc_metrics(const ParameterPoint& p, NcMetricsOptions opts) {
    p.validate();
    const int K = p.shape.classes;
    const int n = p.shape.per_class;
    const int d = p.shape.dim;

    Matrix class_means(d, K);
    for (int k = 0; k < K; ++k) {
        Vector m = Vector::Zero(d);
        for (int i = 0; i < n; ++i) m += p.H.col(p.shape.col(k, i));
        class_means.col(k) = m / n;
    }
    const Vector global_mean = class_means.rowwise().mean();
    const Matrix centered = class_means.colwise() - global_mean;

    Matrix Wm = p.W;
    if (opts.center_classifiers) Wm.rowwise() -= Wm.colwise().mean();

    Vector h_norms(K), w_norms(K);
    for (int k = 0; k < K; ++k) {
        h_norms(k) = centered.col(k).norm();
        w_norms(k) = Wm.row(k).norm();
    }

    NcMetrics m{};
    const double h_avg = h_norms.mean();
    const double w_avg = w_norms.mean();
    const double h_std =
        std::sqrt((h_norms.array() - h_avg).square().sum() / K);
    const double w_std =
        std::sqrt((w_norms.array() - w_avg).square().sum() / K);
    m.norm_variation_h = guarded_ratio(h_std, h_avg);
    m.norm_variation_w = guarded_ratio(w_std, w_avg);

    double within = 0.0, spread = 0.0;
    for (int k = 0; k < K; ++k)
        for (int i = 0; i < n; ++i) {
            const auto h = p.H.col(p.shape.col(k, i));
            within += (h - class_means.col(k)).norm();
            spread += (h - global_mean).norm();
        }
    m.within_class_variation = guarded_ratio(within / (K * n), spread / (K * n));

    double cos_h_sum = 0.0, cos_w_sum = 0.0;
    bool cos_ok = true;
    const double target = 1.0 / (K - 1);
    int pairs = 0;
    for (int a = 0; a < K; ++a)
        for (int b = a + 1; b < K; ++b) {
            ++pairs;
            const double hd = h_norms(a) * h_norms(b);
            const double wd = w_norms(a) * w_norms(b);
            if (hd < kDenominatorFloor || wd < kDenominatorFloor) {
                cos_ok = false;
                continue;
            }
            cos_h_sum +=
                std::abs(centered.col(a).dot(centered.col(b)) / hd + target);
            cos_w_sum += std::abs(Wm.row(a).dot(Wm.row(b)) / wd + target);
        }
    m.cos_h = cos_ok ? cos_h_sum / pairs : kNaN;
    m.cos_w = cos_ok ? cos_w_sum / pairs : kNaN;

    double dual = 0.0;
    bool dual_ok = true;
    for (int k = 0; k < K; ++k) {
        if (h_norms(k) < kDenominatorFloor || w_norms(k) < kDenominatorFloor) {
            dual_ok = false;
            break;
        }
        dual += (centered.col(k) / h_norms(k) -
                 Wm.row(k).transpose() / w_norms(k))
                    .norm();
    }
    m.self_duality = dual_ok ? dual / K : kNaN;
    return m;
}

}  // namespace ulpm::geometry
