#include "sohb/son_core.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <cmath>
#include <sstream>

namespace sohb {

double matrix_inner(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionMismatchError("matrix_inner: shapes differ");
  }
  return (a.array() * b.array()).sum();
}

bool Rotation::is_special_orthogonal(const Mat& m, double tol) {
  if (m.rows() != m.cols() || m.rows() < 2) return false;
  const int n = static_cast<int>(m.rows());
  const Mat gram = m.transpose() * m;
  const double orth_err = (gram - Mat::Identity(n, n)).norm();
  if (!(orth_err <= tol)) return false;
  return std::abs(m.determinant() - 1.0) <= tol;
}

Rotation::Rotation(Mat m) : m_(std::move(m)) {
  if (!is_special_orthogonal(m_)) {
    std::ostringstream os;
    os << "Rotation: matrix is not special orthogonal within " << kTol;
    throw std::invalid_argument(os.str());
  }
}

Rotation Rotation::identity(int n) {
  return Rotation(Mat::Identity(n, n), Trusted{});
}

Rotation Rotation::trusted(Mat m) {
#ifndef NDEBUG
  if (!is_special_orthogonal(m, 1e-8)) {
    throw std::invalid_argument("Rotation::trusted: invariant violated");
  }
#endif
  return Rotation(std::move(m), Trusted{});
}

namespace {

Mat antisym_canonical(const Mat& m) {
  const int n = static_cast<int>(m.rows());
  Mat out = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      out(i, j) = m(i, j);
      out(j, i) = -m(i, j);
    }
  }
  return out;
}

Mat sym_canonical(const Mat& m) {
  const int n = static_cast<int>(m.rows());
  Mat out = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    out(i, i) = m(i, i);
    for (int j = i + 1; j < n; ++j) {
      out(i, j) = m(i, j);
      out(j, i) = m(i, j);
    }
  }
  return out;
}

void require_square(const Mat& m, const char* who) {
  if (m.rows() != m.cols()) throw DimensionMismatchError(std::string(who) + ": matrix must be square");
}

}  // namespace

SkewMatrix::SkewMatrix(const Mat& m, double tol) : m_(Mat()) {
  require_square(m, "SkewMatrix");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (((m + Mat(m.transpose())).cwiseAbs().maxCoeff()) > tol * scale) {
    throw std::invalid_argument("SkewMatrix: input is not antisymmetric");
  }
  m_ = antisym_canonical(m);
}

SkewMatrix SkewMatrix::from_upper(const Mat& m) {
  require_square(m, "SkewMatrix::from_upper");
  return SkewMatrix(antisym_canonical(m), Raw{});
}

SkewMatrix SkewMatrix::zero(int n) { return SkewMatrix(Mat::Zero(n, n), Raw{}); }

SymMatrix::SymMatrix(const Mat& m, double tol) : m_(Mat()) {
  require_square(m, "SymMatrix");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (((m - Mat(m.transpose())).cwiseAbs().maxCoeff()) > tol * scale) {
    throw std::invalid_argument("SymMatrix: input is not symmetric");
  }
  m_ = sym_canonical(m);
}

SymMatrix SymMatrix::from_upper(const Mat& m) {
  require_square(m, "SymMatrix::from_upper");
  return SymMatrix(sym_canonical(m), Raw{});
}

SymMatrix SymMatrix::zero(int n) { return SymMatrix(Mat::Zero(n, n), Raw{}); }

Rotation haar_sample(RngStream& rng, int n) {
  if (n < 2) throw std::invalid_argument("haar_sample: n must be >= 2");
  for (;;) {
    Mat g(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) g(i, j) = rng.normal();
    }
    Eigen::HouseholderQR<Mat> qr(g);
    Mat q = qr.householderQ();
    const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
    bool degenerate = false;
    for (int j = 0; j < n; ++j) {
      const double d = r(j, j);
      if (std::abs(d) < 1e-300) {
        degenerate = true;
        break;
      }
      if (d < 0) q.col(j) = -q.col(j);
    }
    if (degenerate) continue;  // essentially never; resample
    if (q.determinant() < 0) q.col(n - 1) = -q.col(n - 1);
    return Rotation::trusted(std::move(q));
  }
}

Rotation project_to_rotation(const Mat& j, const ProjectionOptions& opts) {
  require_square(j, "project_to_rotation");
  const int n = static_cast<int>(j.rows());
  if (n < 2) throw DimensionMismatchError("project_to_rotation: n must be >= 2");
  Eigen::JacobiSVD<Mat> svd(j, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Mat& u = svd.matrixU();
  const Mat& v = svd.matrixV();
  const Vec& s = svd.singularValues();  // nonincreasing
  const double det_uv = u.determinant() * v.determinant();  // +-1
  const double s_max = s(0);
  if (det_uv < 0) {
    if (opts.strict && s(n - 1) <= opts.tie_tol * s_max) {
      throw SingularProjectionError(
          "project_to_rotation: smallest singular value below tolerance with det(UV^T) = -1");
    }
    if (s(n - 2) - s(n - 1) <= opts.tie_tol * s_max) {
      throw NonUniqueProjectionError(
          "project_to_rotation: maximizer not unique (tied smallest singular pair, det(UV^T) = -1)");
    }
  }
  Vec d = Vec::Ones(n);
  d(n - 1) = det_uv < 0 ? -1.0 : 1.0;
  Mat theta = u * d.asDiagonal() * v.transpose();
  return Rotation::trusted(std::move(theta));
}

SkewMatrix wedge_vec(const Vec& x, const Vec& y) {
  if (x.size() != y.size()) throw DimensionMismatchError("wedge_vec: lengths differ");
  const int n = static_cast<int>(x.size());
  Mat w(n, n);
  w.noalias() = x * y.transpose();
  w -= Mat(y * x.transpose());
  return SkewMatrix::from_upper(w);
}

}  // namespace sohb
