#include "ulpm/types.hpp"

#include <cmath>

namespace ulpm {

void ProblemShape::validate() const {
    if (classes < 2)
        throw std::invalid_argument("classes must be >= 2, got " +
                                    std::to_string(classes));
    if (per_class < 1)
        throw std::invalid_argument("per-class must be >= 1, got " +
                                    std::to_string(per_class));
    if (dim < 1)
        throw std::invalid_argument("dim must be >= 1, got " +
                                    std::to_string(dim));
}

void ParameterPoint::validate() const {
    shape.validate();
    if (W.rows() != shape.classes || W.cols() != shape.dim)
        throw std::invalid_argument("W must be classes x dim");
    if (H.rows() != shape.dim || H.cols() != shape.samples())
        throw std::invalid_argument("H must be dim x (per_class * classes)");
    if (!W.allFinite() || !H.allFinite())
        throw std::invalid_argument("parameter point has non-finite entries");
}

double ParameterPoint::joint_norm() const { return std::sqrt(joint_norm_sq()); }

ParameterPoint make_point(const ProblemShape& shape, Matrix W, Matrix H) {
    ParameterPoint p{shape, std::move(W), std::move(H)};
    p.validate();
    return p;
}

}  // namespace ulpm
