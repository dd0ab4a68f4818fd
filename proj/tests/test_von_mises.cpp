#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "sohb/coefficients.hpp"
#include "sohb/errors.hpp"
#include "sohb/von_mises.hpp"

using namespace sohb;

namespace {

struct MeanStd {
  double mean, se;
};

template <class Draw>
MeanStd sample_statistic(std::size_t count, Draw&& draw) {
  double s = 0, s2 = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const double v = draw();
    s += v;
    s2 += v * v;
  }
  const double mean = s / count;
  const double var = std::max(0.0, s2 / count - mean * mean);
  return {mean, std::sqrt(var / count)};
}

constexpr double kC1At2 = 0.7212035115695826;  // c1(3, 2), frozen reference

}  // namespace

TEST_CASE("log density") {
  RngStream rng(1);
  const Rotation theta = haar_sample(rng, 3);
  const VonMises uniform(theta, 0.0);
  for (int i = 0; i < 5; ++i) {
    CHECK(std::abs(log_density(uniform, haar_sample(rng, 3))) <= 1e-14);
  }

  const VonMises vm(theta, 2.0);
  const double at_mode = log_density(vm, theta);
  CHECK(at_mode == doctest::Approx(2.0 * 3 - vm.log_z()).epsilon(1e-12));
  for (int i = 0; i < 20; ++i) {
    CHECK(log_density(vm, haar_sample(rng, 3)) <= at_mode + 1e-12);
  }
  CHECK_THROWS_AS(log_density(vm, haar_sample(rng, 4)), DimensionMismatchError);
}

TEST_CASE("density normalizes over Haar samples") {
  RngStream rng(2);
  const VonMises vm(haar_sample(rng, 3), 1.5);
  const auto stat = sample_statistic(40000, [&] {
    return std::exp(log_density(vm, haar_sample(rng, 3)));
  });
  CHECK(std::abs(stat.mean - 1.0) <= 3.0 * stat.se);
}

TEST_CASE("kappa 0 sampling is Haar") {
  RngStream rng(3);
  VonMisesSampler sampler{VonMises(Rotation::identity(3), 0.0)};
  const auto tr = sample_statistic(30000, [&] { return sampler.draw(rng).matrix().trace(); });
  CHECK(std::abs(tr.mean) <= 3.0 * tr.se);
  CHECK(sampler.active_mode() == SamplerMode::rejection);
}

TEST_CASE("rejection sampling reproduces the first-moment scalar") {
  RngStream rng(4);
  const Rotation theta = haar_sample(rng, 3);
  VonMisesSampler sampler{VonMises(theta, 2.0)};
  const Mat tm = theta.matrix();
  const auto stat = sample_statistic(30000, [&] {
    const Rotation a = sampler.draw(rng);
    CHECK(Rotation::is_special_orthogonal(a.matrix(), 1e-11));
    return matrix_inner(tm, a.matrix()) / 3.0;
  });
  CHECK(std::abs(stat.mean - kC1At2) <= 3.0 * stat.se);
}

TEST_CASE("metropolis sampler agrees with rejection") {
  RngStream rng_a(5), rng_b(6);
  const VonMises vm(Rotation::identity(3), 2.0);
  VonMisesSampler rejection(vm, SamplerMode::rejection);
  VonMisesSampler metropolis(vm, SamplerMode::metropolis);
  const auto a = sample_statistic(20000, [&] {
    return rejection.draw(rng_a).matrix().trace() / 3.0;
  });
  const auto b = sample_statistic(20000, [&] {
    return metropolis.draw(rng_b).matrix().trace() / 3.0;
  });
  CHECK(metropolis.active_mode() == SamplerMode::metropolis);
  CHECK(std::abs(a.mean - b.mean) <= 3.0 * std::sqrt(a.se * a.se + b.se * b.se));
}

TEST_CASE("auto mode falls back to metropolis at large kappa") {
  RngStream rng(7);
  VonMisesSampler sampler{VonMises(Rotation::identity(3), 25.0)};
  for (int i = 0; i < 5; ++i) (void)sampler.draw(rng);
  CHECK(sampler.active_mode() == SamplerMode::metropolis);
  // samples still concentrate near the mode
  const auto stat = sample_statistic(2000, [&] { return sampler.draw(rng).matrix().trace(); });
  CHECK(stat.mean > 2.8);
}

TEST_CASE("equivariance: M_Theta draws match rotated M_Id draws in law") {
  RngStream rng(8);
  const Rotation theta = haar_sample(rng, 4);
  VonMisesSampler oriented{VonMises(theta, 1.5)};
  VonMisesSampler centered{VonMises(Rotation::identity(4), 1.5)};
  const Mat tm = theta.matrix();
  const auto a = sample_statistic(15000, [&] {
    return matrix_inner(tm, oriented.draw(rng).matrix());
  });
  const auto b = sample_statistic(15000, [&] {
    return matrix_inner(tm, Mat(tm * centered.draw(rng).matrix()));
  });
  CHECK(std::abs(a.mean - b.mean) <= 3.0 * std::sqrt(a.se * a.se + b.se * b.se));
}

TEST_CASE("mc_expectation self-normalizes and matches the first moment") {
  RngStream rng(9);
  const VonMises vm(Rotation::identity(3), 2.0);
  const auto one = mc_expectation_scalar(vm, [](const Rotation&) { return 1.0; }, 10000, rng);
  CHECK(one.value == 1.0);
  CHECK(one.std_error == 0.0);

  const auto est = mc_expectation(
      vm, [](const Rotation& a) { return Mat(a.matrix()); }, 100000, rng);
  const Mat oracle = kC1At2 * Mat::Identity(3, 3);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      CHECK(std::abs(est.value(i, j) - oracle(i, j)) <= 3.0 * est.std_error(i, j) + 1e-12);
    }
  }

  const Rotation theta = haar_sample(rng, 3);
  const VonMises vm_theta(theta, 2.0);
  const auto est2 = mc_expectation(
      vm_theta, [](const Rotation& a) { return Mat(a.matrix()); }, 100000, rng);
  const Mat oracle2 = kC1At2 * theta.matrix();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      CHECK(std::abs(est2.value(i, j) - oracle2(i, j)) <= 3.0 * est2.std_error(i, j) + 1e-12);
    }
  }
}

TEST_CASE("mc_expectation degenerates loudly") {
  RngStream rng(10);
  const VonMises vm(Rotation::identity(4), 30.0);
  CHECK_THROWS_AS(mc_expectation_scalar(vm, [](const Rotation& a) { return a.matrix().trace(); },
                                        1000, rng),
                  DegenerateEssError);
  CHECK_THROWS_AS(mc_expectation_scalar(vm, [](const Rotation& a) { return a.matrix().trace(); },
                                        999, rng),
                  std::invalid_argument);
}

TEST_CASE("mc_expectation is deterministic across thread counts") {
  const VonMises vm(Rotation::identity(3), 1.0);
  auto runner = [&](const char* threads) {
    setenv("SOHB_THREADS", threads, 1);
    RngStream rng(77);
    return mc_expectation(
        vm, [](const Rotation& a) { return Mat(a.matrix()); }, 20000, rng);
  };
  const auto a = runner("1");
  const auto b = runner("2");
  unsetenv("SOHB_THREADS");
  CHECK((a.value - b.value).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.std_error - b.std_error).cwiseAbs().maxCoeff() == 0.0);
}
