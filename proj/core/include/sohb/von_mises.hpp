#pragma once

#include <cstddef>
#include <functional>

#include "sohb/son_core.hpp"

namespace sohb {

/// Matrix von Mises distribution on SO(n): density exp(kappa Theta.A)/Z
/// with respect to normalized Haar measure.
class VonMises {
 public:
  /// Computes and caches log Z via Weyl quadrature.
  VonMises(Rotation theta, double kappa);

  /// Uses a precomputed log partition function; Z does not depend on
  /// Theta, so re-orienting an existing distribution can reuse it.
  VonMises(Rotation theta, double kappa, double precomputed_log_z);

  const Rotation& theta() const { return theta_; }
  double kappa() const { return kappa_; }
  double log_z() const { return log_z_; }
  int dim() const { return theta_.dim(); }

 private:
  Rotation theta_;
  double kappa_;
  double log_z_;
};

/// log M_Theta(A) = kappa (Theta.A) - log Z.
double log_density(const VonMises& vm, const Rotation& a);

struct SamplerConfig {
  /// Rejection proposals per acceptance-rate check window.
  std::size_t window = 2000;
  /// Below this windowed acceptance rate the sampler switches to Metropolis.
  double switch_rate = 1e-3;
  int burn_in = 200;
  int thinning = 20;
  /// Step-size adaptation keeps the Metropolis acceptance in this band
  /// (tuning toward ~0.4).
  double accept_low = 0.23;
  double accept_high = 0.5;
};

enum class SamplerMode { automatic, rejection, metropolis };

/// Exact/MCMC sampler. Rejection proposes Haar draws and accepts with
/// probability exp(kappa (Theta.A - n)); if the windowed acceptance rate
/// collapses, a Metropolis random walk (left-multiplication by exp(s K)
/// for a random unit skew K) takes over with burn-in and thinning.
///
/// Internally the chain targets M_Id and draws are left-multiplied by
/// Theta, which is exact by the left invariance of Haar measure.
class VonMisesSampler {
 public:
  explicit VonMisesSampler(VonMises vm, SamplerMode mode = SamplerMode::automatic,
                           SamplerConfig cfg = {});

  Rotation draw(RngStream& rng);

  /// Re-targets the orientation parameter, keeping kappa, the cached
  /// normalization, and the chain state.
  void set_theta(Rotation theta);

  SamplerMode active_mode() const { return active_; }

 private:
  Rotation draw_identity(RngStream& rng);
  Rotation metropolis_draw(RngStream& rng);
  void metropolis_step(RngStream& rng, std::size_t& accepted);
  void ensure_burn_in(RngStream& rng);

  VonMises vm_;
  SamplerMode requested_;
  SamplerMode active_;
  SamplerConfig cfg_;
  // windowed rejection statistics
  std::size_t window_proposals_ = 0;
  std::size_t window_accepts_ = 0;
  // Metropolis chain state (targets M_Id)
  Mat chain_;
  double chain_trace_ = 0.0;
  double step_ = 0.0;
  bool burned_in_ = false;
};

/// One-shot convenience draw.
Rotation sample(const VonMises& vm, RngStream& rng);

struct McMatrixEstimate {
  Mat value;
  Mat std_error;  // per-entry
  double ess = 0.0;
};

struct McScalarEstimate {
  double value = 0.0;
  double std_error = 0.0;
  double ess = 0.0;
};

/// Self-normalized importance sampling under Haar proposals with weights
/// exp(kappa (Theta.A - n)): estimates E_vm[h] with per-entry standard
/// errors from the effective sample size. Work is chunked with per-chunk
/// substreams and reduced deterministically, so the result depends only on
/// the rng state, not the thread count.
///
/// Throws DegenerateEssError when the effective sample size drops below 50.
McMatrixEstimate mc_expectation(const VonMises& vm,
                                const std::function<Mat(const Rotation&)>& h,
                                std::size_t n_samples, RngStream& rng);

McScalarEstimate mc_expectation_scalar(const VonMises& vm,
                                       const std::function<double(const Rotation&)>& h,
                                       std::size_t n_samples, RngStream& rng);

}  // namespace sohb
