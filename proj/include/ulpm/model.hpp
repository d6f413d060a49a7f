#pragma once

#include "ulpm/types.hpp"

#include <utility>

namespace ulpm::model {

/// All pairwise score gaps s_{k,i,j} = w_k'h_{k,i} - w_j'h_{k,i} plus the
/// per-sample and dataset margins.
struct MarginReport {
    Matrix gaps;                   // K x nK; gaps(j, col(k,i)) = s_{k,i,j}; row k is 0
    Vector per_sample;             // nK; q_{k,i} = min_{j != k} s_{k,i,j}
    double q_min = 0.0;
    std::array<int, 3> argmin{};   // (k, i, j), 0-based, lexicographic tie-break
};

/// Cross-entropy objective sum_{k,i} log(1 + sum_{j != k} exp(-s_{k,i,j})),
/// evaluated with a per-column max shift so late-training gaps in the
/// hundreds do not overflow.
double loss(const ParameterPoint& p);

/// Softmax residual G = grad of the cross-entropy in logit space: column
/// (k,i) holds the class probabilities with 1 subtracted at row k.
/// Column sums vanish identically.
Matrix softmax_residual(const ParameterPoint& p);

/// Analytic gradients (dL/dW, dL/dH) = (G H', W' G).
std::pair<Matrix, Matrix> gradient(const ParameterPoint& p);

MarginReport margins(const ParameterPoint& p);

/// (||W||_F^2 + ||H||_F^2) / (2 (K-1) sqrt(n)); q_min never exceeds it,
/// with equality exactly at the collapsed geometry.
double margin_upper_bound(const ParameterPoint& p);

/// log(e^x - 1) with the small-x branch computed via expm1; returns -inf
/// below 1e-300 (caller treats the derived quantity as saturated).
double log_expm1(double x);

}  // namespace ulpm::model
