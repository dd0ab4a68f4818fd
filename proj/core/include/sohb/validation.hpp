#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sohb/son_core.hpp"
#include "sohb/von_mises.hpp"

namespace sohb {

struct MixtureComponent {
  double weight;
  VonMises vm;
};

/// Finite mixture of von Mises components; the generic test family for the
/// kinetic identities. Densities are evaluable and the first moment is
/// analytic, so every residual has an exact oracle.
class MixtureDistribution {
 public:
  explicit MixtureDistribution(std::vector<MixtureComponent> components);

  double rho_total() const { return rho_; }
  int dim() const;
  const std::vector<MixtureComponent>& components() const { return components_; }

  /// f(A) = sum_i w_i exp(kappa_i Theta_i.A) / Z_i  (wrt normalized Haar).
  double density(const Rotation& a) const;

 private:
  std::vector<MixtureComponent> components_;
  double rho_ = 0.0;
};

struct MixtureMoments {
  double rho = 0.0;
  Mat j_analytic;        // sum_i w_i c1(kappa_i) Theta_i
  Mat j_mc;              // importance-sampling cross-check
  Mat j_mc_std_error;
  Rotation theta;        // projection of j_analytic
};

/// (rho_f, J_f, Theta_f). J_f comes from the first-moment identity
/// (int A M_Theta dA = c1 Theta) applied per component, plus a Monte Carlo
/// estimate for cross-checking; Theta_f = project_to_rotation(J_f).
MixtureMoments moments_of(const MixtureDistribution& f, std::size_t n_samples,
                          RngStream& rng);

/// Pointwise evaluator of the relaxation operator
/// Q(f)(A) = rho_f M_{Theta_f}(A) - f(A), with M at the model concentration
/// `model_kappa`. The overload without it uses the first component's kappa
/// (the equilibrium case).
std::function<double(const Rotation&)> collision_q(const MixtureDistribution& f,
                                                   double model_kappa);
std::function<double(const Rotation&)> collision_q(const MixtureDistribution& f);

struct GciResiduals {
  double r0 = 0.0;         // MC estimate of int Q(f) dA
  double r0_std_error = 0.0;
  Mat r1;                  // MC estimate of int Q(f) (A Theta^T - Theta A^T) dA
  Mat r1_std_error;
  std::size_t samples = 0;
};

/// Estimates the collision-invariant residuals by importance sampling with
/// a defensive proposal (half M_{Theta_f}, half the normalized mixture), so
/// both terms of Q are covered and the weights stay bounded. `theta_override`
/// substitutes a wrong rotation into the test function (negative control).
GciResiduals gci_residuals(const MixtureDistribution& f, double model_kappa,
                           std::size_t n_samples, RngStream& rng,
                           const std::optional<Rotation>& theta_override = std::nullopt);
GciResiduals gci_residuals(const MixtureDistribution& f, std::size_t n_samples,
                           RngStream& rng,
                           const std::optional<Rotation>& theta_override = std::nullopt);

/// MC estimate of L(P) = int (A.P) (A - A^T)/2 M_Id(A) dA.
/// The closed form is C2 P.
McMatrixEstimate operator_l_mc(const SkewMatrix& p, double kappa,
                               std::size_t n_samples, RngStream& rng);

/// MC estimate of B(P,Q) = int (A.P)(A.Q)(A + A^T)/2 M_Id(A) dA.
/// The closed form is C3 Tr(PQ) Id + C4 ((PQ+QP)/2 - Tr(PQ)/n Id).
McMatrixEstimate operator_b_mc(const SkewMatrix& p, const SkewMatrix& q, double kappa,
                               std::size_t n_samples, RngStream& rng);

/// Closed form of B(P,Q) given the constants (for oracles and reports).
Mat operator_b_closed_form(const SkewMatrix& p, const SkewMatrix& q, double C3, double C4);

/// One validation check outcome; serialized as one NDJSON object with
/// fields {check, n, kappa, estimate, stderr, pass} (+ optional detail).
struct CheckResult {
  std::string check;
  int n = 0;
  double kappa = 0.0;
  double estimate = 0.0;
  double std_error = 0.0;
  bool pass = false;
  std::string detail;
};

std::string to_ndjson(const CheckResult& r);

}  // namespace sohb
