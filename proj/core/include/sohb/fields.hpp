#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "sohb/son_core.hpp"

namespace sohb {

/// Periodic uniform grid over a box, up to 3 live axes. Axes with a single
/// node carry no variation (derivatives along them are zero); this is how
/// matrix dimension n > 3 decouples from the spatial resolution budget.
struct GridShape {
  std::array<int, 3> dims{1, 1, 1};
  double h = 1.0;

  static GridShape cubic(int nodes_per_axis, double box_edge);

  std::size_t node_count() const {
    return static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
  }
  std::size_t flat(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * dims[1] + j) * dims[2] + k;
  }
  bool operator==(const GridShape&) const = default;
};

class ScalarField {
 public:
  ScalarField(GridShape grid, double fill = 0.0)
      : grid_(grid), v_(grid.node_count(), fill) {}

  const GridShape& grid() const { return grid_; }
  double& at(int i, int j, int k) { return v_[grid_.flat(i, j, k)]; }
  double at(int i, int j, int k) const { return v_[grid_.flat(i, j, k)]; }
  std::span<const double> data() const { return v_; }
  std::span<double> data() { return v_; }

 private:
  GridShape grid_;
  std::vector<double> v_;
};

/// n real components per node.
class VectorField {
 public:
  VectorField(GridShape grid, int n)
      : grid_(grid), n_(n), v_(grid.node_count() * n, 0.0) {}

  const GridShape& grid() const { return grid_; }
  int components() const { return n_; }
  Eigen::Map<Vec> at(int i, int j, int k) {
    return Eigen::Map<Vec>(v_.data() + grid_.flat(i, j, k) * n_, n_);
  }
  Eigen::Map<const Vec> at(int i, int j, int k) const {
    return Eigen::Map<const Vec>(v_.data() + grid_.flat(i, j, k) * n_, n_);
  }

 private:
  GridShape grid_;
  int n_;
  std::vector<double> v_;
};

/// rows x cols real matrix per node, row-major within the node.
class MatrixField {
 public:
  MatrixField(GridShape grid, int rows, int cols)
      : grid_(grid), rows_(rows), cols_(cols),
        v_(grid.node_count() * rows * cols, 0.0) {}

  const GridShape& grid() const { return grid_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Eigen::Map<Mat> at(int i, int j, int k) {
    return Eigen::Map<Mat>(v_.data() + grid_.flat(i, j, k) * rows_ * cols_, rows_, cols_);
  }
  Eigen::Map<const Mat> at(int i, int j, int k) const {
    return Eigen::Map<const Mat>(v_.data() + grid_.flat(i, j, k) * rows_ * cols_, rows_, cols_);
  }
  std::span<const double> data() const { return v_; }

 private:
  GridShape grid_;
  int rows_, cols_;
  std::vector<double> v_;
};

/// Rotation-valued field; construction validates every node.
class RotationField {
 public:
  static RotationField checked(MatrixField samples);
  const MatrixField& matrices() const { return m_; }
  const GridShape& grid() const { return m_.grid(); }
  int dim() const { return m_.rows(); }

 private:
  explicit RotationField(MatrixField m) : m_(std::move(m)) {}
  MatrixField m_;
};

/// n^3 entries per node (the Delta_ijk array).
class Rank3Field {
 public:
  Rank3Field(GridShape grid, int n)
      : grid_(grid), n_(n), v_(grid.node_count() * n * n * n, 0.0) {}
  double& at(int i, int j, int k, int a, int b, int c) {
    return v_[(grid_.flat(i, j, k) * n_ + a) * static_cast<std::size_t>(n_) * n_ +
              static_cast<std::size_t>(b) * n_ + c];
  }
  double at(int i, int j, int k, int a, int b, int c) const {
    return v_[(grid_.flat(i, j, k) * n_ + a) * static_cast<std::size_t>(n_) * n_ +
              static_cast<std::size_t>(b) * n_ + c];
  }
  int dim() const { return n_; }
  const GridShape& grid() const { return grid_; }

 private:
  GridShape grid_;
  int n_;
  std::vector<double> v_;
};

/// Central differences (order 2 or 4) along one axis with periodic wrap.
/// Axes with a single node return zero; axes too small for the stencil
/// throw std::invalid_argument.
ScalarField fd_axis_derivative(const ScalarField& f, int axis, int order);
MatrixField fd_axis_derivative(const MatrixField& f, int axis, int order);

/// Gradient of a scalar as an n-vector field (entries for axes beyond the
/// grid are zero).
VectorField fd_gradient(const ScalarField& f, int n, int order);

/// Divergence of the first min(3, n) components along the live axes.
ScalarField fd_divergence(const VectorField& x, int order);

/// (nabla ^ X)_ij = d_i X_j - d_j X_i.
MatrixField fd_wedge_curl(const VectorField& x, int order);

/// Derived SOHB tensors on the grid.
struct FieldBundle {
  VectorField r;        // sum_k (div Omega_k) Omega_k
  VectorField force;    // F = -c3 grad rho - c4 rho r
  MatrixField w;        // W = F ^ Omega_1 - c4 rho (nabla ^ Omega_1)
  MatrixField w_tilde;  // F ^ Omega_1 + c4 rho A
  MatrixField a;        // A = sum_{k,l} Delta_1kl Omega_k (x) Omega_l
  Rank3Field delta;     // Delta_ijk = delta(Omega_i, Omega_j, Omega_k)
  double c2, c3, c4;
};

FieldBundle compute_bundle(const ScalarField& rho, const RotationField& theta,
                           double kappa, int order = 4);

enum class OrientForm { orient3, orient4 };

/// dt Theta from either form of the orientation equation:
///   orient3: (W Theta)/rho      - c2       (Omega_1 . grad) Theta
///   orient4: (Wtilde Theta)/rho - (c2-c4)  (Omega_1 . grad) Theta
MatrixField theta_rhs(const ScalarField& rho, const RotationField& theta,
                      double kappa, OrientForm form, int order = 4);

/// dt rho = -div(c1 rho Omega_1).
ScalarField mass_rhs(const ScalarField& rho, const RotationField& theta,
                     double kappa, int order = 4);

/// Smooth synthetic (rho, Theta) family: Theta = exp(S) for a skew-valued
/// trigonometric polynomial S, rho a positive trigonometric polynomial.
/// Deterministic in the seed and resolution-independent, so the same fields
/// can be sampled on a refinement sequence.
struct SyntheticFields {
  int n = 3;
  double box_edge = 2.0 * 3.14159265358979323846;
  std::uint64_t seed = 1;
  int modes = 2;
  double skew_amplitude = 0.45;
  double rho_amplitude = 0.4;

  ScalarField rho(int nodes_per_axis) const;
  RotationField theta(int nodes_per_axis) const;
};

struct EquivalenceReport {
  std::vector<int> grid_sizes;
  std::vector<double> a_error;      // max |A Theta - Atilde Theta|
  std::vector<double> rhs_error;    // max |rhs(orient3) - rhs(orient4)|
  double a_order = 0.0;             // empirical order from the last pair
  double rhs_order = 0.0;
};

/// Samples the synthetic fields on each grid size (which should double),
/// evaluates both sides of the alternate-form identity and both orientation
/// right-hand sides, and reports max-norm errors with empirical orders.
EquivalenceReport check_equivalence(const SyntheticFields& synth, double kappa,
                                    std::span<const int> grid_sizes, int order = 4);

struct OmegaComponentReport {
  double max_residual = 0.0;   // worst node/component mismatch
  double tangency_error = 0.0; // max |sym(dtTheta Theta^T)|
};

/// Expands theta_rhs(orient4) into the per-column equations and compares.
OmegaComponentReport omega_component_check(const ScalarField& rho,
                                           const RotationField& theta,
                                           double kappa, int order = 4);

/// CSV dumps with a shape/spacing/layout header comment.
void write_scalar_csv(std::ostream& os, const ScalarField& f);
void write_matrix_csv(std::ostream& os, const MatrixField& f);

}  // namespace sohb
