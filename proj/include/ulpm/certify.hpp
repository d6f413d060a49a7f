#pragma once

#include "ulpm/types.hpp"

#include <optional>
#include <span>
#include <vector>

namespace ulpm::certify {

/// Multipliers and residuals certifying a direction as an approximate KKT
/// point of the minimum-norm separation problem
///     min 1/2 ||W||^2 + 1/2 ||H||^2   s.t.   s_{k,i,j} >= 1.
struct KktCertificate {
    // lambda_{k,i,j} stored flat at index (k*n + i)*K + j; the j == k
    // slots stay 0. All entries nonnegative by construction.
    std::vector<double> lambdas;
    double eps = 0.0;          // direct stationarity residual at theta_tilde
    double delta = 0.0;        // direct complementary-slackness residual, max form
    double delta_sum = 0.0;    // sum form, the quantity the closed form bounds
    double eps_bound = 0.0;    // sqrt(2 (1 - beta) / gamma_tilde); NaN unless loss < log 2
    double delta_bound = 0.0;  // K^2 (K-1) n / (2 e gamma_tilde q_min); NaN unless loss < log 2
    ParameterPoint normalized_point;  // theta / sqrt(q_min), binding gaps == 1
    bool feasible = false;            // all normalized gaps >= 1 - 1e-12
    double q_min = 0.0;
    double beta = 0.0;
    double gamma_tilde = 0.0;
};

/// Builds the margin-weighted multipliers from the current gradient and
/// evaluates both the directly assembled residuals and the closed-form
/// bounds. Requires q_min > 0 (throws std::domain_error otherwise).
KktCertificate certificate(const ParameterPoint& p);

struct KktResiduals {
    double eps = 0.0;
    double delta = 0.0;      // max(0, max lambda (s - 1))
    double delta_sum = 0.0;  // sum lambda (s - 1)
};

/// Residuals of an arbitrary multiplier vector at a candidate point that
/// is already normalized (binding gaps expected at 1). Layout of lambdas
/// matches KktCertificate::lambdas.
KktResiduals kkt_residuals(const ParameterPoint& normalized,
                           std::span<const double> lambdas);

struct MfcqReport {
    bool satisfied = false;
    // First constraint (k,i,j) with s <= 0 when unsatisfied. The witness
    // direction for the satisfied case is the point itself.
    std::optional<std::array<int, 3>> violating;
};

/// All gaps strictly positive makes v = theta a strict-inner-product
/// witness, since <grad s_{k,i,j}, theta> = 2 s_{k,i,j}.
MfcqReport mfcq_check(const ParameterPoint& p);

/// Every gap >= 1 - 1e-12.
bool separation_feasible(const ParameterPoint& p);

}  // namespace ulpm::certify
