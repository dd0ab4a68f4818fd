#include "sohb/validation.hpp"

#include <cmath>
#include <sstream>

#include "sohb/coefficients.hpp"
#include "sohb/errors.hpp"
#include "sohb/number_format.hpp"

namespace sohb {

MixtureDistribution::MixtureDistribution(std::vector<MixtureComponent> components)
    : components_(std::move(components)) {
  if (components_.empty()) {
    throw std::invalid_argument("MixtureDistribution: need at least one component");
  }
  const int n = components_.front().vm.dim();
  for (const auto& c : components_) {
    if (!(c.weight >= 0)) throw std::invalid_argument("MixtureDistribution: negative weight");
    if (c.vm.dim() != n) throw DimensionMismatchError("MixtureDistribution: mixed dimensions");
    rho_ += c.weight;
  }
  if (!(rho_ > 0)) throw std::invalid_argument("MixtureDistribution: total mass must be positive");
}

int MixtureDistribution::dim() const { return components_.front().vm.dim(); }

double MixtureDistribution::density(const Rotation& a) const {
  double f = 0.0;
  for (const auto& c : components_) {
    f += c.weight * std::exp(log_density(c.vm, a));
  }
  return f;
}

namespace {

/// J_f = sum_i w_i c1(kappa_i) Theta_i, exact by the first-moment identity.
Mat analytic_first_moment(const MixtureDistribution& f) {
  const int n = f.dim();
  Mat j = Mat::Zero(n, n);
  for (const auto& c : f.components()) {
    j += c.weight * coefficients_weyl(n, c.vm.kappa()).c1 * c.vm.theta().matrix();
  }
  return j;
}

}  // namespace

MixtureMoments moments_of(const MixtureDistribution& f, std::size_t n_samples,
                          RngStream& rng) {
  const int n = f.dim();
  const Mat j = analytic_first_moment(f);

  Mat j_mc = Mat::Zero(n, n);
  Mat var = Mat::Zero(n, n);
  for (const auto& c : f.components()) {
    const auto est = mc_expectation(
        c.vm, [](const Rotation& a) { return Mat(a.matrix()); }, n_samples, rng);
    j_mc += c.weight * est.value;
    var += (c.weight * c.weight) * est.std_error.cwiseProduct(est.std_error);
  }

  return MixtureMoments{f.rho_total(), j, j_mc, var.cwiseSqrt(),
                        project_to_rotation(j)};
}

std::function<double(const Rotation&)> collision_q(const MixtureDistribution& f,
                                                   double model_kappa) {
  const Rotation theta_f = project_to_rotation(analytic_first_moment(f));
  const VonMises equilibrium(theta_f, model_kappa);
  const double rho = f.rho_total();
  return [rho, equilibrium, f](const Rotation& a) {
    return rho * std::exp(log_density(equilibrium, a)) - f.density(a);
  };
}

std::function<double(const Rotation&)> collision_q(const MixtureDistribution& f) {
  return collision_q(f, f.components().front().vm.kappa());
}

namespace {

/// Rejection from Haar proposals accepts at rate Z e^{-kappa n}; below a
/// percent the Metropolis chain is cheaper from the start.
SamplerMode preferred_mode(const VonMises& vm) {
  const double acceptance = std::exp(vm.log_z() - vm.kappa() * vm.dim());
  return acceptance < 1e-2 ? SamplerMode::metropolis : SamplerMode::automatic;
}

/// Defensive proposal: with probability 1/2 a draw from M_{Theta_f}, else
/// from the normalized mixture. Keeps |Q| / proposal bounded by 2 rho_f.
class DefensiveProposal {
 public:
  DefensiveProposal(const MixtureDistribution& f, const VonMises& equilibrium)
      : f_(f), eq_(equilibrium), eq_sampler_(equilibrium, preferred_mode(equilibrium)) {
    for (const auto& c : f.components()) {
      samplers_.emplace_back(c.vm, preferred_mode(c.vm));
    }
  }

  Rotation draw(RngStream& rng) {
    if (rng.uniform() < 0.5) return eq_sampler_.draw(rng);
    double pick = rng.uniform() * f_.rho_total();
    std::size_t idx = 0;
    for (; idx + 1 < samplers_.size(); ++idx) {
      pick -= f_.components()[idx].weight;
      if (pick <= 0) break;
    }
    return samplers_[idx].draw(rng);
  }

  double density(const Rotation& a) const {
    return 0.5 * std::exp(log_density(eq_, a)) + 0.5 * f_.density(a) / f_.rho_total();
  }

 private:
  const MixtureDistribution& f_;
  VonMises eq_;
  VonMisesSampler eq_sampler_;
  std::vector<VonMisesSampler> samplers_;
};

}  // namespace

GciResiduals gci_residuals(const MixtureDistribution& f, double model_kappa,
                           std::size_t n_samples, RngStream& rng,
                           const std::optional<Rotation>& theta_override) {
  if (n_samples < 10000) {
    throw std::invalid_argument("gci_residuals: need at least 10^4 samples");
  }
  const int n = f.dim();
  const Rotation theta_f = project_to_rotation(analytic_first_moment(f));
  const Rotation& psi_theta = theta_override ? *theta_override : theta_f;
  const Mat psi_m = psi_theta.matrix();
  const VonMises equilibrium(theta_f, model_kappa);
  const double rho = f.rho_total();

  DefensiveProposal proposal(f, equilibrium);

  double s0 = 0.0, s0_sq = 0.0;
  Mat s1 = Mat::Zero(n, n), s1_sq = Mat::Zero(n, n);
  for (std::size_t i = 0; i < n_samples; ++i) {
    const Rotation a = proposal.draw(rng);
    const double q = rho * std::exp(log_density(equilibrium, a)) - f.density(a);
    const double ratio = q / proposal.density(a);
    const Mat& am = a.matrix();
    const Mat psi = am * psi_m.transpose() - psi_m * am.transpose();
    s0 += ratio;
    s0_sq += ratio * ratio;
    const Mat term = ratio * psi;
    s1 += term;
    s1_sq += term.cwiseProduct(term);
  }
  const double inv = 1.0 / static_cast<double>(n_samples);
  GciResiduals out;
  out.samples = n_samples;
  out.r0 = s0 * inv;
  out.r0_std_error = std::sqrt(std::max(0.0, s0_sq * inv - out.r0 * out.r0) * inv);
  out.r1 = s1 * inv;
  out.r1_std_error = Mat(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const double mean = out.r1(r, c);
      out.r1_std_error(r, c) =
          std::sqrt(std::max(0.0, s1_sq(r, c) * inv - mean * mean) * inv);
    }
  }
  return out;
}

GciResiduals gci_residuals(const MixtureDistribution& f, std::size_t n_samples,
                           RngStream& rng,
                           const std::optional<Rotation>& theta_override) {
  return gci_residuals(f, f.components().front().vm.kappa(), n_samples, rng,
                       theta_override);
}

McMatrixEstimate operator_l_mc(const SkewMatrix& p, double kappa,
                               std::size_t n_samples, RngStream& rng) {
  const int n = p.dim();
  const Mat pm = p.matrix();
  const VonMises vm(Rotation::identity(n), kappa);
  return mc_expectation(
      vm,
      [pm](const Rotation& a) {
        const Mat& am = a.matrix();
        return Mat(matrix_inner(am, pm) * 0.5 * (am - Mat(am.transpose())));
      },
      n_samples, rng);
}

McMatrixEstimate operator_b_mc(const SkewMatrix& p, const SkewMatrix& q, double kappa,
                               std::size_t n_samples, RngStream& rng) {
  if (p.dim() != q.dim()) throw DimensionMismatchError("operator_b_mc: dimensions differ");
  const Mat pm = p.matrix(), qm = q.matrix();
  const VonMises vm(Rotation::identity(p.dim()), kappa);
  return mc_expectation(
      vm,
      [pm, qm](const Rotation& a) {
        const Mat& am = a.matrix();
        return Mat(matrix_inner(am, pm) * matrix_inner(am, qm) * 0.5 *
                   (am + Mat(am.transpose())));
      },
      n_samples, rng);
}

Mat operator_b_closed_form(const SkewMatrix& p, const SkewMatrix& q, double C3, double C4) {
  const int n = p.dim();
  const Mat pq = p.matrix() * q.matrix();
  const double tr = pq.trace();
  return C3 * tr * Mat(Mat::Identity(n, n)) +
         C4 * (0.5 * (pq + Mat(q.matrix() * p.matrix())) -
               tr / n * Mat(Mat::Identity(n, n)));
}

std::string to_ndjson(const CheckResult& r) {
  std::ostringstream os;
  os << "{\"check\":\"" << r.check << "\",\"n\":" << r.n << ",\"kappa\":" << fp17(r.kappa)
     << ",\"estimate\":" << fp17(r.estimate) << ",\"stderr\":" << fp17(r.std_error)
     << ",\"pass\":" << (r.pass ? "true" : "false");
  if (!r.detail.empty()) os << ",\"detail\":\"" << r.detail << "\"";
  os << "}";
  return os.str();
}

}  // namespace sohb
