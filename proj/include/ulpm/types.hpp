#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace ulpm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Dimensions of one classification instance: K classes, n samples per
/// class, feature dimension d.
struct ProblemShape {
    int classes = 0;    // K
    int per_class = 0;  // n
    int dim = 0;        // d

    int samples() const { return classes * per_class; }

    // Column index of feature (k, i) in H. Class-major order is a hard
    // contract: (0,0)...(0,n-1),(1,0),...
    int col(int k, int i) const { return k * per_class + i; }

    // Throws std::invalid_argument unless K >= 2, n >= 1, d >= 1.
    void validate() const;

    // A simplex frame needs K-1 independent directions; below that the
    // geometry cannot close. Flagged, not rejected.
    bool narrow_for_etf() const { return dim < classes - 1; }
};

/// Classifier matrix W (K x d, row k is w_k) together with the free
/// feature matrix H (d x nK, column (k,i) is h_{k,i}).
struct ParameterPoint {
    ProblemShape shape;
    Matrix W;
    Matrix H;

    // Checks dimensions against shape and that every entry is finite.
    void validate() const;

    double joint_norm_sq() const { return W.squaredNorm() + H.squaredNorm(); }
    double joint_norm() const;
};

ParameterPoint make_point(const ProblemShape& shape, Matrix W, Matrix H);

}  // namespace ulpm
