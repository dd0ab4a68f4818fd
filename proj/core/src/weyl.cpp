#include "sohb/weyl.hpp"

#include <cmath>
#include <numbers>

#include "sohb/errors.hpp"
#include "sohb/threading.hpp"

namespace sohb {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::size_t kChunk = 8192;  // nodes per reduction chunk (fixed)

void check_point(int n, const TorusPoint& theta) {
  if (n < 3) throw std::invalid_argument("torus: n must be >= 3");
  if (theta.n != n || theta.angles.size() != n / 2) {
    throw DimensionMismatchError("torus: point does not match dimension");
  }
}

double weight_from_cosines(int n, const double* c, int p, double constant) {
  double prod = constant;
  for (int j = 0; j < p; ++j) {
    for (int k = j + 1; k < p; ++k) {
      const double d = c[j] - c[k];
      prod *= d * d;
    }
  }
  if (n % 2 == 1) {
    for (int j = 0; j < p; ++j) prod *= 1.0 - c[j];
  }
  return prod;
}

}  // namespace

namespace detail {

double weyl_constant(int n) {
  const int p = n / 2;
  double fact = 1.0;
  for (int i = 2; i <= p; ++i) fact *= i;
  const int e = (n % 2 == 0) ? (p - 1) * (p - 1) : p * (p - 1);
  return std::ldexp(1.0, e) / fact;
}

std::vector<double> integrate_many(int n, int m, int k_out, const NodeEval& eval) {
  if (n < 3) throw std::invalid_argument("integrate_many: n must be >= 3");
  if (m < 2) throw std::invalid_argument("integrate_many: points per angle must be >= 2");
  const int p = n / 2;
  std::vector<double> angles(m), cosines(m);
  for (int i = 0; i < m; ++i) {
    angles[i] = kTwoPi * i / m;
    cosines[i] = std::cos(angles[i]);
  }
  const double constant = weyl_constant(n);
  const double cell = std::pow(static_cast<double>(m), -p);

  std::size_t count = 1;
  for (int j = 0; j < p; ++j) count *= static_cast<std::size_t>(m);
  const std::size_t chunks = (count + kChunk - 1) / kChunk;

  // one partial per (chunk, output); reduced pairwise in fixed order below
  std::vector<double> partials(chunks * k_out, 0.0);

  parallel_chunks(chunks, [&](std::size_t ci) {
    const std::size_t begin = ci * kChunk;
    const std::size_t end = std::min(begin + kChunk, count);
    std::vector<int> digit(p);
    {
      std::size_t rem = begin;
      for (int j = p - 1; j >= 0; --j) {
        digit[j] = static_cast<int>(rem % m);
        rem /= m;
      }
    }
    std::vector<double> c(p), a(p), out(k_out);
    std::vector<std::vector<double>> buf(k_out);
    for (auto& b : buf) b.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i) {
      for (int j = 0; j < p; ++j) {
        c[j] = cosines[digit[j]];
        a[j] = angles[digit[j]];
      }
      const double w = weight_from_cosines(n, c.data(), p, constant) * cell;
      eval(c.data(), a.data(), p, out.data());
      for (int k = 0; k < k_out; ++k) buf[k].push_back(out[k] * w);
      for (int j = p - 1; j >= 0; --j) {  // odometer
        if (++digit[j] < m) break;
        digit[j] = 0;
      }
    }
    for (int k = 0; k < k_out; ++k) {
      partials[ci * k_out + k] = pairwise_sum(buf[k]);
    }
  });

  std::vector<double> result(k_out);
  std::vector<double> col(chunks);
  for (int k = 0; k < k_out; ++k) {
    for (std::size_t ci = 0; ci < chunks; ++ci) col[ci] = partials[ci * k_out + k];
    result[k] = pairwise_sum(col);
  }
  return result;
}

}  // namespace detail

double c_fn(int n, int k, const TorusPoint& theta) {
  check_point(n, theta);
  double s = 0.0;
  for (int j = 0; j < theta.angles.size(); ++j) {
    s += std::cos(k * theta.angles[j]);
  }
  s *= 2.0;
  if (n % 2 == 1) s += 1.0;
  return s;
}

double weyl_weight(int n, const TorusPoint& theta) {
  check_point(n, theta);
  const int p = n / 2;
  std::vector<double> c(p);
  for (int j = 0; j < p; ++j) c[j] = std::cos(theta.angles[j]);
  return weight_from_cosines(n, c.data(), p, detail::weyl_constant(n));
}

Rotation torus_rotation(int n, const TorusPoint& theta) {
  check_point(n, theta);
  const int p = n / 2;
  Mat r = Mat::Identity(n, n);
  for (int j = 0; j < p; ++j) {
    const double ct = std::cos(theta.angles[j]);
    const double st = std::sin(theta.angles[j]);
    r(2 * j, 2 * j) = ct;
    r(2 * j, 2 * j + 1) = -st;
    r(2 * j + 1, 2 * j) = st;
    r(2 * j + 1, 2 * j + 1) = ct;
  }
  return Rotation::trusted(std::move(r));
}

QuadratureGrid::QuadratureGrid(int n, int points_per_angle)
    : n_(n), m_(points_per_angle) {
  if (n < 3) throw std::invalid_argument("QuadratureGrid: n must be >= 3");
  if (m_ < 2) throw std::invalid_argument("QuadratureGrid: M must be >= 2");
  angles_.resize(m_);
  cosines_.resize(m_);
  for (int i = 0; i < m_; ++i) {
    angles_[i] = kTwoPi * i / m_;
    cosines_[i] = std::cos(angles_[i]);
  }
}

std::size_t QuadratureGrid::node_count() const {
  std::size_t count = 1;
  for (int j = 0; j < n_ / 2; ++j) count *= static_cast<std::size_t>(m_);
  return count;
}

TorusPoint QuadratureGrid::node(std::size_t flat) const {
  const int p = n_ / 2;
  TorusPoint tp{n_, Vec(p)};
  for (int j = p - 1; j >= 0; --j) {
    tp.angles[j] = angles_[flat % m_];
    flat /= m_;
  }
  return tp;
}

double QuadratureGrid::weight(std::size_t flat) const {
  const int p = n_ / 2;
  std::vector<double> c(p);
  for (int j = p - 1; j >= 0; --j) {
    c[j] = cosines_[flat % m_];
    flat /= m_;
  }
  return weight_from_cosines(n_, c.data(), p, detail::weyl_constant(n_)) *
         std::pow(static_cast<double>(m_), -p);
}

double integrate_class_function(int n, const TorusFn& g, int points_per_angle) {
  auto eval = [&](const double* /*cos*/, const double* a, int pp, double* out) {
    thread_local TorusPoint tp;
    if (tp.n != n) tp = TorusPoint{n, Vec(pp)};
    for (int j = 0; j < pp; ++j) tp.angles[j] = a[j];
    out[0] = g(tp);
  };
  return detail::integrate_many(n, points_per_angle, 1, eval)[0];
}

McIntegral integrate_class_function_mc(int n, const TorusFn& g,
                                       std::size_t samples, RngStream& rng) {
  if (n < 3) throw std::invalid_argument("integrate_class_function_mc: n must be >= 3");
  const int p = n / 2;
  const double constant = detail::weyl_constant(n);
  const std::uint64_t base = rng.next_u64();
  const std::size_t chunk = 16384;
  const std::size_t chunks = (samples + chunk - 1) / chunk;
  std::vector<double> sum1(chunks, 0.0), sum2(chunks, 0.0);
  parallel_chunks(chunks, [&](std::size_t ci) {
    RngStream local = RngStream::substream(base, ci);
    const std::size_t begin = ci * chunk;
    const std::size_t end = std::min(begin + chunk, samples);
    TorusPoint tp{n, Vec(p)};
    std::vector<double> c(p);
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      for (int j = 0; j < p; ++j) {
        tp.angles[j] = kTwoPi * local.uniform();
        c[j] = std::cos(tp.angles[j]);
      }
      const double v = g(tp) * weight_from_cosines(n, c.data(), p, constant);
      s1 += v;
      s2 += v * v;
    }
    sum1[ci] = s1;
    sum2[ci] = s2;
  });
  const double s1 = pairwise_sum(sum1);
  const double s2 = pairwise_sum(sum2);
  const double mean = s1 / samples;
  const double var = std::max(0.0, s2 / samples - mean * mean);
  return McIntegral{mean, std::sqrt(var / samples), samples};
}

double converged_integral(int n, const TorusFn& g, double tol,
                          const ConvergenceOptions& opts) {
  if (!(tol > 0)) throw std::invalid_argument("converged_integral: tol must be > 0");
  const int p = n / 2;
  if (p >= 5) {
    // tensor grids are out of reach; Monte Carlo with growing budgets
    RngStream rng(0x5eedULL + static_cast<std::uint64_t>(n));
    std::size_t samples = 1 << 16;
    for (;;) {
      McIntegral r = integrate_class_function_mc(n, g, samples, rng);
      if (3.0 * r.std_error < tol * (1.0 + std::abs(r.value))) return r.value;
      if (samples >= opts.mc_max_samples) {
        throw NoConvergenceError("converged_integral: Monte Carlo fallback budget exhausted");
      }
      samples *= 4;
    }
  }
  const int m_max = opts.m_max > 0 ? opts.m_max : (p <= 3 ? 1024 : 128);
  double prev = integrate_class_function(n, g, opts.m_start);
  for (int m = 2 * opts.m_start; m <= m_max; m *= 2) {
    const double cur = integrate_class_function(n, g, m);
    if (std::abs(cur - prev) < tol * (1.0 + std::abs(cur))) return cur;
    prev = cur;
  }
  throw NoConvergenceError("converged_integral: resolution budget exhausted (M > max)");
}

}  // namespace sohb
