#include "sohb/skew_expm.hpp"

#include <unsupported/Eigen/MatrixFunctions>

namespace sohb {

Mat expm(const Mat& m) { return m.exp(); }

Rotation exp_skew(const SkewMatrix& s) {
  Mat e = expm(s.matrix());
  // exp of skew is orthogonal up to roundoff; the checked constructor
  // enforces the Rotation tolerance.
  return Rotation(std::move(e));
}

}  // namespace sohb
