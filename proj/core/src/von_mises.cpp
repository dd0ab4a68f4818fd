#include "sohb/von_mises.hpp"

#include <cmath>

#include "sohb/coefficients.hpp"
#include "sohb/errors.hpp"
#include "sohb/skew_expm.hpp"
#include "sohb/threading.hpp"

namespace sohb {

VonMises::VonMises(Rotation theta, double kappa)
    : theta_(std::move(theta)), kappa_(kappa) {
  if (!(kappa >= 0)) throw std::invalid_argument("VonMises: kappa must be >= 0");
  log_z_ = std::log(partition_function(dim(), kappa));
}

VonMises::VonMises(Rotation theta, double kappa, double precomputed_log_z)
    : theta_(std::move(theta)), kappa_(kappa), log_z_(precomputed_log_z) {
  if (!(kappa >= 0)) throw std::invalid_argument("VonMises: kappa must be >= 0");
}

double log_density(const VonMises& vm, const Rotation& a) {
  if (a.dim() != vm.dim()) throw DimensionMismatchError("log_density: dimensions differ");
  return vm.kappa() * matrix_inner(vm.theta().matrix(), a.matrix()) - vm.log_z();
}

VonMisesSampler::VonMisesSampler(VonMises vm, SamplerMode mode, SamplerConfig cfg)
    : vm_(std::move(vm)), requested_(mode), cfg_(cfg) {
  active_ = mode == SamplerMode::metropolis ? SamplerMode::metropolis
                                            : SamplerMode::rejection;
  const int n = vm_.dim();
  chain_ = Mat::Identity(n, n);
  chain_trace_ = n;
  // step scale heuristic; adapted during burn-in
  step_ = std::min(0.5, 1.0 / std::sqrt(std::max(1.0, vm_.kappa() * n)));
}

void VonMisesSampler::set_theta(Rotation theta) {
  if (theta.dim() != vm_.dim()) throw DimensionMismatchError("set_theta: dimension differs");
  vm_ = VonMises(std::move(theta), vm_.kappa(), vm_.log_z());
}

Rotation VonMisesSampler::draw(RngStream& rng) {
  Rotation b = draw_identity(rng);
  return Rotation::trusted(vm_.theta().matrix() * b.matrix());
}

Rotation VonMisesSampler::draw_identity(RngStream& rng) {
  const int n = vm_.dim();
  const double kappa = vm_.kappa();
  if (active_ == SamplerMode::rejection) {
    for (;;) {
      Rotation a = haar_sample(rng, n);
      ++window_proposals_;
      const double log_accept = kappa * (a.matrix().trace() - n);
      if (std::log(rng.uniform_pos()) < log_accept) {
        ++window_accepts_;
        return a;
      }
      if (requested_ == SamplerMode::automatic && window_proposals_ >= cfg_.window) {
        const double rate = static_cast<double>(window_accepts_) / window_proposals_;
        window_proposals_ = window_accepts_ = 0;
        if (rate < cfg_.switch_rate) {
          active_ = SamplerMode::metropolis;
          return metropolis_draw(rng);
        }
      }
    }
  }
  return metropolis_draw(rng);
}

void VonMisesSampler::metropolis_step(RngStream& rng, std::size_t& accepted) {
  const int n = vm_.dim();
  // random unit skew direction
  Mat k = Mat::Zero(n, n);
  double norm2 = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double v = rng.normal();
      k(i, j) = v;
      k(j, i) = -v;
      norm2 += 2.0 * v * v;
    }
  }
  k *= step_ / std::sqrt(norm2);
  const Mat proposal = expm(k) * chain_;
  const double trace_new = proposal.trace();
  const double log_accept = vm_.kappa() * (trace_new - chain_trace_);
  if (std::log(rng.uniform_pos()) < log_accept) {
    chain_ = proposal;
    chain_trace_ = trace_new;
    ++accepted;
  }
}

void VonMisesSampler::ensure_burn_in(RngStream& rng) {
  if (burned_in_) return;
  const int block = 50;
  int done = 0;
  while (done < cfg_.burn_in) {
    std::size_t accepted = 0;
    for (int i = 0; i < block; ++i) metropolis_step(rng, accepted);
    done += block;
    const double rate = static_cast<double>(accepted) / block;
    if (rate < cfg_.accept_low) {
      step_ /= 1.5;
    } else if (rate > cfg_.accept_high) {
      step_ = std::min(1.5 * step_, 2.0);
    }
  }
  burned_in_ = true;
}

Rotation VonMisesSampler::metropolis_draw(RngStream& rng) {
  ensure_burn_in(rng);
  std::size_t accepted = 0;
  for (int i = 0; i < cfg_.thinning; ++i) metropolis_step(rng, accepted);
  // the chain accumulates rounding over many multiplications; re-project
  Rotation out = project_to_rotation(chain_);
  chain_ = out.matrix();
  chain_trace_ = chain_.trace();
  return out;
}

Rotation sample(const VonMises& vm, RngStream& rng) {
  VonMisesSampler sampler(vm);
  return sampler.draw(rng);
}

namespace {

constexpr std::size_t kMcChunk = 4096;
constexpr double kMinEss = 50.0;

struct Accumulators {
  double sum_w = 0.0, sum_w2 = 0.0;
  Mat sum_wh, sum_w2h, sum_w2h2;
};

McMatrixEstimate finish(const std::vector<Accumulators>& parts, int rows, int cols) {
  const std::size_t nc = parts.size();
  std::vector<double> col(nc);
  auto reduce_scalar = [&](auto getter) {
    for (std::size_t i = 0; i < nc; ++i) col[i] = getter(parts[i]);
    return pairwise_sum(col);
  };
  const double sw = reduce_scalar([](const Accumulators& a) { return a.sum_w; });
  const double sw2 = reduce_scalar([](const Accumulators& a) { return a.sum_w2; });
  Mat swh = Mat::Zero(rows, cols), sw2h = Mat::Zero(rows, cols), sw2h2 = Mat::Zero(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      swh(r, c) = reduce_scalar([&](const Accumulators& a) { return a.sum_wh(r, c); });
      sw2h(r, c) = reduce_scalar([&](const Accumulators& a) { return a.sum_w2h(r, c); });
      sw2h2(r, c) = reduce_scalar([&](const Accumulators& a) { return a.sum_w2h2(r, c); });
    }
  }
  const double ess = sw * sw / sw2;
  if (!(ess >= kMinEss)) {
    throw DegenerateEssError("mc_expectation: effective sample size below 50");
  }
  McMatrixEstimate out;
  out.value = swh / sw;
  out.ess = ess;
  out.std_error = Mat(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const double mu = out.value(r, c);
      // delta-method variance of the self-normalized ratio estimator
      const double num = sw2h2(r, c) - 2.0 * mu * sw2h(r, c) + mu * mu * sw2;
      out.std_error(r, c) = std::sqrt(std::max(0.0, num)) / sw;
    }
  }
  return out;
}

}  // namespace

McMatrixEstimate mc_expectation(const VonMises& vm,
                                const std::function<Mat(const Rotation&)>& h,
                                std::size_t n_samples, RngStream& rng) {
  if (n_samples < 1000) {
    throw std::invalid_argument("mc_expectation: need at least 10^3 samples");
  }
  const int n = vm.dim();
  const double kappa = vm.kappa();
  const Mat theta = vm.theta().matrix();
  const std::uint64_t base = rng.next_u64();

  // probe output shape once
  const Mat probe = h(Rotation::identity(n));
  const int rows = static_cast<int>(probe.rows());
  const int cols = static_cast<int>(probe.cols());

  const std::size_t chunks = (n_samples + kMcChunk - 1) / kMcChunk;
  std::vector<Accumulators> parts(chunks);
  parallel_chunks(chunks, [&](std::size_t ci) {
    RngStream local = RngStream::substream(base, ci);
    const std::size_t begin = ci * kMcChunk;
    const std::size_t end = std::min(begin + kMcChunk, n_samples);
    Accumulators acc;
    acc.sum_wh = Mat::Zero(rows, cols);
    acc.sum_w2h = Mat::Zero(rows, cols);
    acc.sum_w2h2 = Mat::Zero(rows, cols);
    for (std::size_t i = begin; i < end; ++i) {
      const Rotation a = haar_sample(local, n);
      const double w = std::exp(kappa * (matrix_inner(theta, a.matrix()) - n));
      const Mat hv = h(a);
      acc.sum_w += w;
      acc.sum_w2 += w * w;
      acc.sum_wh += w * hv;
      acc.sum_w2h += (w * w) * hv;
      acc.sum_w2h2 += (w * w) * hv.cwiseProduct(hv);
    }
    parts[ci] = std::move(acc);
  });
  return finish(parts, rows, cols);
}

McScalarEstimate mc_expectation_scalar(const VonMises& vm,
                                       const std::function<double(const Rotation&)>& h,
                                       std::size_t n_samples, RngStream& rng) {
  auto wrapped = [&](const Rotation& a) {
    Mat m(1, 1);
    m(0, 0) = h(a);
    return m;
  };
  const McMatrixEstimate est = mc_expectation(vm, wrapped, n_samples, rng);
  return McScalarEstimate{est.value(0, 0), est.std_error(0, 0), est.ess};
}

}  // namespace sohb
