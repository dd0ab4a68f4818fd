#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "sohb/son_core.hpp"

namespace sohb {

/// A point (theta_1, ..., theta_p) on the maximal torus of SO(n),
/// p = floor(n/2).
struct TorusPoint {
  int n = 0;
  Vec angles;  // length p

  int p() const { return n / 2; }
};

/// C_n^(k)(theta) = 2 sum_j cos(k theta_j), plus 1 when n is odd.
/// Equals Tr(R_theta^k) on the torus.
double c_fn(int n, int k, const TorusPoint& theta);

/// Weyl density u_n(theta):
///   u_2p   = 2^{(p-1)^2}/p!  prod_{j<k} (cos th_j - cos th_k)^2
///   u_2p+1 = 2^{p(p-1)}/p!   prod_{j<k} (cos th_j - cos th_k)^2
///                            prod_j (1 - cos th_j)
double weyl_weight(int n, const TorusPoint& theta);

/// The block-planar rotation R_{theta_1 ... theta_p} (trailing 1 if n odd).
Rotation torus_rotation(int n, const TorusPoint& theta);

/// Tensor-product trapezoid grid on [0, 2pi)^p with the Weyl weight.
/// Nodes and weights are generated on demand from the per-axis angle table,
/// so the grid stays O(M) in memory at any M^p node count.
class QuadratureGrid {
 public:
  QuadratureGrid(int n, int points_per_angle);

  int dim() const { return n_; }
  int points_per_angle() const { return m_; }
  std::size_t node_count() const;

  TorusPoint node(std::size_t flat) const;
  /// u_n(theta) / M^p; the (2pi/M)^p cell volume and (2pi)^-p prefactor of
  /// the integration formula cancel to 1/M^p.
  double weight(std::size_t flat) const;

  const std::vector<double>& axis_angles() const { return angles_; }
  const std::vector<double>& axis_cosines() const { return cosines_; }

 private:
  int n_, m_;
  std::vector<double> angles_;
  std::vector<double> cosines_;
};

using TorusFn = std::function<double(const TorusPoint&)>;

/// Integral over SO(n) of a class function whose torus restriction is `g`,
/// by the trapezoid tensor rule on the periodic cube with weight u_n.
/// Spectrally accurate for smooth g. Nodes are reduced by deterministic
/// chunked pairwise summation; the result does not depend on thread count.
double integrate_class_function(int n, const TorusFn& g, int points_per_angle);

struct McIntegral {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

/// Monte Carlo form of the torus integral: uniform draws on the cube,
/// weighted by u_n. Used for p >= 5 where tensor grids blow up.
McIntegral integrate_class_function_mc(int n, const TorusFn& g,
                                       std::size_t samples, RngStream& rng);

struct ConvergenceOptions {
  int m_start = 16;
  /// 0 = pick per dimension: 1024 for p <= 3, 128 for p = 4.
  int m_max = 0;
  /// Monte Carlo fallback budget for p >= 5.
  std::size_t mc_max_samples = std::size_t{1} << 24;
};

/// Doubles the per-angle resolution from m_start until two successive
/// values agree within tol * (1 + |value|); returns the last value.
/// For p >= 5 falls back to Monte Carlo with growing sample counts until
/// 3 standard errors fit the same tolerance. Throws NoConvergenceError
/// when the resolution budget is exhausted.
double converged_integral(int n, const TorusFn& g, double tol,
                          const ConvergenceOptions& opts = {});

namespace detail {

/// Shared integration engine: evaluates `k_out` integrands per node through
/// `eval(cosines, angles, out[])` and reduces each output deterministically.
/// `eval` receives the node's per-axis cosines and angles.
using NodeEval = std::function<void(const double* cosines, const double* angles,
                                    int p, double* out)>;
std::vector<double> integrate_many(int n, int points_per_angle, int k_out,
                                   const NodeEval& eval);

double weyl_constant(int n);

}  // namespace detail

}  // namespace sohb
