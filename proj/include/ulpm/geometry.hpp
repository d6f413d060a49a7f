#pragma once

#include "ulpm/types.hpp"

namespace ulpm::geometry {

/// Simplex equiangular tight frame: d x K matrix whose unit-norm columns
/// all meet at cosine -1/(K-1).
struct EtfFrame {
    Matrix directions;  // M, d x K
    Matrix q_factor;    // column-orthogonal Q used to build M
    double scale = 1.0;
};

/// M = sqrt(K/(K-1)) Q (I - 11'/K) with Q drawn from the QR of a Gaussian
/// matrix, sign-fixed so diag(R) > 0. Requires d >= K.
EtfFrame make_etf(int classes, int dim, std::uint64_t seed);

/// Exact collapsed optimum: every feature sits on its class's frame
/// direction, w_k = sqrt(n) h_{k,i}, ||W||_F = ||H||_F, and
/// ||W||_F^2 + ||H||_F^2 = radius^2.
ParameterPoint nc_solution(const ProblemShape& shape, double radius,
                           std::uint64_t seed);

/// The six collapse diagnostics. All are dimensionless and vanish at an
/// exact nc_solution; a metric whose averaging denominator underflows is
/// reported as NaN (saturated), never thrown.
struct NcMetrics {
    double norm_variation_h;        // Std/Avg of ||hbar_k - hbar||
    double norm_variation_w;        // Std/Avg of ||w_k||
    double within_class_variation;  // Avg||h_{k,i} - hbar_k|| / Avg||h_{k,i} - hbar||
    double cos_h;                   // Avg |cos(hbar_k - hbar, hbar_k' - hbar) + 1/(K-1)|
    double cos_w;                   // same over classifier rows
    double self_duality;            // Avg_k ||(hbar_k - hbar)/||.|| - w_k/||w_k||||

    std::array<double, 6> as_array() const {
        return {norm_variation_h, norm_variation_w, within_class_variation,
                cos_h,            cos_w,            self_duality};
    }
};

struct NcMetricsOptions {
    // Subtract the classifier row mean before the w-based metrics. Off by
    // default; the empirical definitions leave W uncentered.
    bool center_classifiers = false;
};

NcMetrics nc_metrics(const ParameterPoint& p, NcMetricsOptions opts = {});

}  // namespace ulpm::geometry
