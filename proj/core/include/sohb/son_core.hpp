#pragma once

#include <Eigen/Dense>

#include "sohb/errors.hpp"
#include "sohb/rng.hpp"

namespace sohb {

/// Dense row-major matrix with runtime dimension; n stays small (3..~10).
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vec = Eigen::VectorXd;

/// Frobenius inner product A.B = Tr(A^T B) = sum_ij A_ij B_ij.
double matrix_inner(const Mat& a, const Mat& b);

/// An element of SO(n): orthogonal with unit determinant.
class Rotation {
 public:
  static constexpr double kTol = 1e-10;

  /// Validating constructor; throws std::invalid_argument if `m` is not
  /// special orthogonal within kTol.
  explicit Rotation(Mat m);

  static Rotation identity(int n);

  /// Wraps a matrix known to be a rotation by construction (torus blocks,
  /// products of rotations, ...). Checked in debug builds only.
  static Rotation trusted(Mat m);

  const Mat& matrix() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }

  /// k-th column (0-based); the frame vector Omega_{k+1} when applied to a
  /// mean frame.
  Vec column(int k) const { return m_.col(k); }

  Rotation transpose() const { return Rotation(m_.transpose(), Trusted{}); }

  friend Rotation operator*(const Rotation& a, const Rotation& b) {
    return Rotation(a.m_ * b.m_, Trusted{});
  }

  static bool is_special_orthogonal(const Mat& m, double tol = kTol);

 private:
  struct Trusted {};
  Rotation(Mat m, Trusted) : m_(std::move(m)) {}
  Mat m_;
};

/// Antisymmetric matrix, stored canonically: the strict lower triangle is
/// the exact negation of the strict upper one and the diagonal is zero.
class SkewMatrix {
 public:
  /// Checks |m + m^T| entrywise against `tol` scaled by max|m|, then
  /// canonicalizes from the strict upper triangle.
  explicit SkewMatrix(const Mat& m, double tol = 1e-12);

  /// Builds from the strict upper triangle of `m`, ignoring the rest.
  static SkewMatrix from_upper(const Mat& m);

  static SkewMatrix zero(int n);

  const Mat& matrix() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }

 private:
  struct Raw {};
  SkewMatrix(Mat m, Raw) : m_(std::move(m)) {}
  Mat m_;
};

/// Symmetric matrix, stored canonically from the upper triangle.
class SymMatrix {
 public:
  explicit SymMatrix(const Mat& m, double tol = 1e-12);
  static SymMatrix from_upper(const Mat& m);
  static SymMatrix zero(int n);

  const Mat& matrix() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }

 private:
  struct Raw {};
  SymMatrix(Mat m, Raw) : m_(std::move(m)) {}
  Mat m_;
};

/// Haar-distributed rotation: orthonormalize an iid Gaussian matrix with the
/// sign convention that makes the triangular factor's diagonal positive,
/// then flip one column if the determinant came out -1.
Rotation haar_sample(RngStream& rng, int n);

struct ProjectionOptions {
  /// Relative gap threshold on the two smallest singular values used to
  /// declare the maximizer non-unique (scaled by the largest one).
  double tie_tol = 1e-9;
  /// Strict mode additionally rejects near-singular inputs whose
  /// det(UV^T) = -1, where the sign of the correction is not trustworthy.
  bool strict = false;
};

/// The rotation maximizing A.J over SO(n), via the SVD J = U S V^T and
/// Theta = U diag(1,...,1,det(UV^T)) V^T. Guarantees J Theta^T symmetric.
///
/// Throws NonUniqueProjectionError when det(UV^T) = -1 and the two smallest
/// singular values are tied within tie_tol, and (strict mode only)
/// SingularProjectionError when the smallest singular value is below
/// tie_tol * s_max with det(UV^T) = -1.
Rotation project_to_rotation(const Mat& j, const ProjectionOptions& opts = {});

/// (X ^ Y)_ij = X_i Y_j - X_j Y_i.
SkewMatrix wedge_vec(const Vec& x, const Vec& y);

}  // namespace sohb
