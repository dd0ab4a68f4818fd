// Acceptance suite: runs the toolkit's end-to-end checks and prints one
// PASS/FAIL line per criterion. Exit code 0 iff everything passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include "cli.hpp"
#include "sohb/coefficients.hpp"
#include "sohb/fields.hpp"
#include "sohb/pdmp.hpp"
#include "sohb/validation.hpp"
#include "sohb/von_mises.hpp"
#include "sohb/weyl.hpp"

using namespace sohb;

namespace {

int g_failures = 0;

class Criterion {
 public:
  Criterion(int number, std::string title)
      : number_(number), title_(std::move(title)), start_(std::chrono::steady_clock::now()) {}

  void require(bool ok, const std::string& what) {
    if (!ok) {
      issues_.push_back(what);
    }
  }

  void finish(double time_budget_s = 0.0) {
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    if (time_budget_s > 0 && elapsed > time_budget_s) {
      std::ostringstream os;
      os << "runtime " << elapsed << " s exceeds budget " << time_budget_s << " s";
      issues_.push_back(os.str());
    }
    const bool pass = issues_.empty();
    if (!pass) ++g_failures;
    std::printf("[%s] criterion %2d: %s (%.1f s)\n", pass ? "PASS" : "FAIL", number_,
                title_.c_str(), elapsed);
    for (const auto& issue : issues_) {
      std::printf("       - %s\n", issue.c_str());
    }
    std::fflush(stdout);
  }

 private:
  int number_;
  std::string title_;
  std::chrono::steady_clock::time_point start_;
  std::vector<std::string> issues_;
};

std::string describe(const char* fmt, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), fmt, a, b);
  return buf;
}

struct MeanStd {
  double mean, se;
};

template <class Draw>
MeanStd statistic(std::size_t count, Draw&& draw) {
  double s = 0, s2 = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const double v = draw();
    s += v;
    s2 += v * v;
  }
  const double mean = s / count;
  return {mean, std::sqrt(std::max(0.0, s2 / count - mean * mean) / count)};
}

// ---------------------------------------------------------------- 1
void criterion_normalization() {
  Criterion c(1, "Weyl normalization: integral of 1 over SO(n) equals 1, n = 3..8");
  for (int n = 3; n <= 8; ++n) {
    const double v = converged_integral(
        n, [](const TorusPoint&) { return 1.0; }, 1e-9);
    c.require(std::abs(v - 1.0) <= 1e-8,
              describe("n=%.0f: |integral - 1| = %.2e", n, std::abs(v - 1.0)));
  }
  c.finish(10.0);
}

// ---------------------------------------------------------------- 2
void criterion_characters() {
  Criterion c(2, "character integrals: quadrature and Haar Monte Carlo");
  for (int n : {3, 4}) {
    const double m1 = converged_integral(
        n, [n](const TorusPoint& th) { return c_fn(n, 1, th); }, 1e-9);
    const double m2 = converged_integral(
        n, [n](const TorusPoint& th) { return c_fn(n, 1, th) * c_fn(n, 1, th); }, 1e-9);
    c.require(std::abs(m1) <= 1e-8, describe("n=%.0f quadrature Tr moment %.2e", n, m1));
    c.require(std::abs(m2 - 1.0) <= 1e-8,
              describe("n=%.0f quadrature (Tr)^2 error %.2e", n, std::abs(m2 - 1.0)));

    RngStream rng(100 + n);
    const auto tr = statistic(100000, [&] { return haar_sample(rng, n).matrix().trace(); });
    c.require(std::abs(tr.mean) <= 3.0 * tr.se,
              describe("n=%.0f MC Tr mean %.2e outside 3 sigma", n, tr.mean));
    const auto tr2 = statistic(100000, [&] {
      const double t = haar_sample(rng, n).matrix().trace();
      return t * t;
    });
    c.require(std::abs(tr2.mean - 1.0) <= 3.0 * tr2.se,
              describe("n=%.0f MC (Tr)^2 mean %.4f outside 3 sigma", n, tr2.mean));
  }
  c.finish();
}

// ---------------------------------------------------------------- 3
void criterion_c1_properties() {
  Criterion c(3, "c1 properties: zero at kappa 0, nondecreasing, saturating");
  for (int n : {3, 4, 5}) {
    const double z = coefficients_weyl(n, 0.0).c1;
    c.require(std::abs(z) <= 1e-10, describe("c1(%.0f, 0) = %.2e", n, z));
  }
  double prev = -1.0;
  for (double kappa = 0.0; kappa <= 10.0 + 1e-9; kappa += 0.5) {
    const double v = coefficients_weyl(3, kappa).c1;
    c.require(v >= prev - 1e-12, describe("c1 decreased at kappa=%.1f", kappa));
    prev = v;
  }
  const double sat = coefficients_weyl(3, 20.0).c1;
  c.require(sat > 0.95, describe("c1(3, 20) = %.4f <= 0.95", sat));
  c.finish(30.0);
}

// ---------------------------------------------------------------- 4
void criterion_closed_form_agreement() {
  Criterion c(4, "n = 3 closed forms match the Weyl route to 1e-8");
  for (double kappa : {0.5, 1.0, 2.0, 5.0}) {
    const CoefficientTable a = closed_form_n3(kappa);
    const CoefficientTable b = coefficients_weyl(3, kappa);
    const double disc = max_route_discrepancy({a, b});
    c.require(disc <= 1e-8, describe("kappa=%.1f discrepancy %.2e", kappa, disc));
  }
  c.finish();
}

// ---------------------------------------------------------------- 5
void criterion_three_routes() {
  Criterion c(5, "three-route coefficient agreement + Monte Carlo trace moments");
  for (int n = 3; n <= 6; ++n) {
    for (double kappa : {0.5, 2.0}) {
      const CoefficientTable w = coefficients_weyl(n, kappa);
      const CoefficientTable m = coefficients_trace_moments(n, kappa);
      const double disc = max_route_discrepancy({w, m});
      c.require(disc <= 1e-8,
                describe("n=%.0f kappa=%.1f route discrepancy", n, kappa) + ": " +
                    describe("%.2e", disc));
    }
  }
  RngStream rng(55);
  for (int n = 3; n <= 6; ++n) {
    const VonMises vm(Rotation::identity(n), 2.0);
    for (int k = 1; k <= 3; ++k) {
      const auto est = mc_expectation_scalar(
          vm,
          [n, k](const Rotation& a) {
            Mat p = a.matrix();
            for (int i = 1; i < k; ++i) p = Mat(p * a.matrix());
            return p.trace() / n;
          },
          200000, rng);
      const double oracle = trace_moment(n, 2.0, k);
      c.require(std::abs(est.value - oracle) <= 3.0 * est.std_error,
                describe("n=%.0f MC trace moment k=%.0f outside 3 sigma", n, k));
    }
  }
  c.finish();
}

bool entrywise_3sigma(const McMatrixEstimate& est, const Mat& oracle) {
  for (int i = 0; i < oracle.rows(); ++i) {
    for (int j = 0; j < oracle.cols(); ++j) {
      if (std::abs(est.value(i, j) - oracle(i, j)) > 3.0 * est.std_error(i, j) + 1e-12) {
        return false;
      }
    }
  }
  return true;
}

/// Entrywise 3-sigma test with one confirmation pass: across hundreds of
/// entry comparisons a correct estimator strays past 3 sigma somewhere with
/// appreciable probability, while a real bias reproduces at 4x the samples
/// with twice the significance. The retry therefore damps tail flakiness
/// without masking defects.
bool confirmed_3sigma(const std::function<McMatrixEstimate(std::size_t)>& estimate,
                      const Mat& oracle, std::size_t samples) {
  if (entrywise_3sigma(estimate(samples), oracle)) return true;
  return entrywise_3sigma(estimate(4 * samples), oracle);
}

// ---------------------------------------------------------------- 6
void criterion_first_moment() {
  Criterion c(6, "first-moment identity: MC of int A M_Theta dA = c1 Theta");
  RngStream rng(66);
  for (int n : {3, 4}) {
    for (double kappa : {0.5, 2.0, 5.0}) {
      const Rotation theta = haar_sample(rng, n);
      const VonMises vm(theta, kappa);
      const Mat oracle = coefficients_weyl(n, kappa).c1 * theta.matrix();
      const bool ok = confirmed_3sigma(
          [&](std::size_t count) {
            return mc_expectation(
                vm, [](const Rotation& a) { return Mat(a.matrix()); }, count, rng);
          },
          oracle, 100000);
      c.require(ok, describe("n=%.0f kappa=%.1f entry outside 3 sigma (confirmed)", n, kappa));
    }
  }
  c.finish(60.0);
}

// ---------------------------------------------------------------- 7
void criterion_operators() {
  Criterion c(7, "operator lemmas: L(P) = C2 P and the B(P,Q) expansion");
  const double kappa = 1.0;
  for (int n : {3, 4, 5}) {
    const std::size_t samples = n <= 3 ? 200000 : (n == 4 ? 400000 : 1000000);
    const CoefficientTable coeff = coefficients_weyl(n, kappa);
    RngStream rng(700 + n);
    for (int pair = 0; pair < 5; ++pair) {
      Mat raw_p = Mat::Zero(n, n), raw_q = Mat::Zero(n, n);
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
          raw_p(i, j) = rng.normal();
          raw_q(i, j) = rng.normal();
        }
      }
      const SkewMatrix p = SkewMatrix::from_upper(raw_p);
      const SkewMatrix q = SkewMatrix::from_upper(raw_q);

      const bool ok_l = confirmed_3sigma(
          [&](std::size_t count) { return operator_l_mc(p, kappa, count, rng); },
          Mat(coeff.C2 * p.matrix()), samples);
      const bool ok_b = confirmed_3sigma(
          [&](std::size_t count) { return operator_b_mc(p, q, kappa, count, rng); },
          operator_b_closed_form(p, q, coeff.C3, coeff.C4), samples);
      c.require(ok_l, describe("L: n=%.0f pair %.0f outside 3 sigma (confirmed)", n, pair));
      c.require(ok_b, describe("B: n=%.0f pair %.0f outside 3 sigma (confirmed)", n, pair));
    }
  }
  c.finish();
}

// ---------------------------------------------------------------- 8
void criterion_gci() {
  Criterion c(8, "GCI identities for 20 random mixtures, with negative control");
  for (int n : {3, 4}) {
    RngStream rng(800 + n);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<MixtureComponent> comps;
      for (int i = 0; i < 3; ++i) {
        comps.push_back(
            {0.3 + rng.uniform(), VonMises(haar_sample(rng, n), 0.5 + 1.5 * rng.uniform())});
      }
      const MixtureDistribution f(std::move(comps));
      const double model_kappa = 1.0 + rng.uniform();
      const GciResiduals res = gci_residuals(f, model_kappa, 20000, rng);
      // |r0| and ||r1|| against 3 aggregated sigmas
      const bool ok = std::abs(res.r0) <= 3.0 * res.r0_std_error + 1e-12 &&
                      res.r1.norm() <= 3.0 * res.r1_std_error.norm() + 1e-12;
      c.require(ok, describe("n=%.0f mixture %.0f residual outside 3 sigma", n, trial));
    }
    // negative control: a wrong rotation in the test function must scream
    std::vector<MixtureComponent> comps;
    for (int i = 0; i < 3; ++i) {
      comps.push_back(
          {0.3 + rng.uniform(), VonMises(haar_sample(rng, n), 0.5 + 1.5 * rng.uniform())});
    }
    const MixtureDistribution f(std::move(comps));
    const GciResiduals bad = gci_residuals(f, 1.5, 20000, rng, haar_sample(rng, n));
    const double ratio = bad.r1.norm() / std::max(bad.r1_std_error.norm(), 1e-300);
    c.require(ratio > 5.0, describe("n=%.0f negative control only %.1f sigma", n, ratio));
  }
  c.finish();
}

// ---------------------------------------------------------------- 9
void criterion_projection() {
  Criterion c(9, "projection beats 10^4 Haar candidates and symmetrizes J Theta^T");
  RngStream rng(99);
  int done = 0;
  while (done < 100) {
    const int n = 3 + static_cast<int>(rng.uniform_int(3));
    Mat j(n, n);
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < n; ++k) j(i, k) = rng.normal();
    }
    Rotation theta = Rotation::identity(n);
    try {
      theta = project_to_rotation(j);
    } catch (const NonUniqueProjectionError&) {
      continue;  // measure-zero tie; redraw
    }
    const double best = matrix_inner(theta.matrix(), j);
    bool beaten = false;
    for (int i = 0; i < 10000; ++i) {
      if (matrix_inner(haar_sample(rng, n).matrix(), j) > best + 1e-9) {
        beaten = true;
        break;
      }
    }
    c.require(!beaten, "a Haar candidate beat the projection");
    const Mat s = j * theta.matrix().transpose();
    const double asym = (s - Mat(s.transpose())).cwiseAbs().maxCoeff();
    c.require(asym < 1e-10, describe("J Theta^T asymmetry %.2e", asym));
    ++done;
  }
  c.finish();
}

// ---------------------------------------------------------------- 10
void criterion_pdmp_equilibrium() {
  Criterion c(10, "PDMP homogeneous equilibrium: order parameter matches c1(2)");
  SimParams p;
  p.N = 2000;
  p.n = 3;
  p.c0 = 1.0;
  p.nu = 1.0;
  p.kappa = 2.0;
  p.L = 10.0;
  p.R = 20.0;  // sqrt(3) L: all-to-all
  p.T_end = 50.0;
  p.seed = 1234;
  RunStats stats;
  const ParticleEnsemble e = run(p, nullptr, &stats);
  const double order = order_parameter(e);
  const double c1 = closed_form_n3(2.0).c1;  // certified by criterion 4
  c.require(std::abs(order - c1) <= 0.02,
            describe("order parameter %.4f vs c1(2) = %.4f", order, c1));

  double mean = 0.0;
  for (auto count : stats.jumps_per_particle) mean += static_cast<double>(count);
  mean /= p.N;
  const double expected = p.nu * p.T_end;
  const double se = std::sqrt(expected / p.N);
  c.require(std::abs(mean - expected) <= 3.0 * se,
            describe("jump count mean %.2f vs nu T = %.1f", mean, expected));
  c.finish(120.0);
}

// ---------------------------------------------------------------- 11
void criterion_field_identities() {
  Criterion c(11, "field identities: algebraic invariants and 4th-order convergence");
  SyntheticFields synth;
  synth.n = 3;
  synth.seed = 21;
  const double kappa = 2.0;

  const ScalarField rho = synth.rho(24);
  const RotationField theta = synth.theta(24);
  const FieldBundle b = compute_bundle(rho, theta, kappa);
  double delta_asym = 0.0, a_om1 = 0.0;
  for (int i = 0; i < 24; ++i) {
    for (int j = 0; j < 24; ++j) {
      for (int k = 0; k < 24; ++k) {
        for (int a = 0; a < 3; ++a) {
          for (int bb = 0; bb < 3; ++bb) {
            for (int cc = 0; cc < 3; ++cc) {
              const double v = b.delta.at(i, j, k, a, bb, cc);
              delta_asym =
                  std::max(delta_asym, std::abs(v + b.delta.at(i, j, k, bb, a, cc)));
              delta_asym =
                  std::max(delta_asym, std::abs(v + b.delta.at(i, j, k, a, cc, bb)));
            }
          }
        }
        a_om1 = std::max(a_om1, (Mat(b.a.at(i, j, k)) *
                                 Vec(theta.matrices().at(i, j, k).col(0)))
                                    .cwiseAbs()
                                    .maxCoeff());
      }
    }
  }
  c.require(delta_asym <= 1e-12, describe("Delta antisymmetry violation %.2e", delta_asym));
  c.require(a_om1 <= 1e-12, describe("A Omega_1 max %.2e", a_om1));

  const int sizes[2] = {12, 24};
  const EquivalenceReport rep = check_equivalence(synth, kappa, sizes);
  c.require(rep.a_order >= 3.5, describe("A-vs-Atilde order %.2f < 3.5", rep.a_order));
  c.require(rep.rhs_order >= 3.5, describe("orient3-vs-orient4 order %.2f < 3.5", rep.rhs_order));

  const OmegaComponentReport coarse = omega_component_check(synth.rho(12), synth.theta(12), kappa);
  const OmegaComponentReport fine = omega_component_check(rho, theta, kappa);
  const double order = std::log2(coarse.max_residual / fine.max_residual);
  c.require(order >= 3.5, describe("component residual order %.2f < 3.5", order));
  c.finish(120.0);
}

// ---------------------------------------------------------------- 12
void criterion_reproducibility() {
  Criterion c(12, "bit-identical outputs for repeated and manifest-replayed runs");
  const std::string cfg = "/tmp/sohb_acceptance_sim.toml";
  {
    std::ofstream os(cfg);
    os << "N = 60\nn = 3\nc0 = 1.0\nnu = 1.0\nkappa = 2.0\nR = 1.0\nL = 8.0\n"
          "T_end = 2.0\nseed = 5\nsnapshot_every = 0.5\n";
  }
  auto slurp = [](const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const std::string out_a = "/tmp/sohb_acc_a.ndjson", out_b = "/tmp/sohb_acc_b.ndjson",
                    out_c = "/tmp/sohb_acc_c.ndjson";
  c.require(sohb::cli::run({"simulate", "--config", cfg, "--out", out_a}) == 0,
            "first simulate run failed");
  c.require(sohb::cli::run({"simulate", "--config", cfg, "--out", out_b}) == 0,
            "second simulate run failed");
  c.require(slurp(out_a) == slurp(out_b), "repeated simulate runs differ");
  c.require(sohb::cli::run({"simulate", "--from-manifest", out_a + ".manifest.json", "--out",
                            out_c}) == 0,
            "manifest replay failed");
  c.require(slurp(out_a) == slurp(out_c), "manifest replay differs");

  const std::string val_a = "/tmp/sohb_acc_val_a.ndjson", val_b = "/tmp/sohb_acc_val_b.ndjson";
  c.require(sohb::cli::run({"validate", "moments", "--n", "3", "--kappa", "1", "--samples",
                            "20000", "--out", val_a}) == 0,
            "validate run failed");
  c.require(sohb::cli::run({"validate", "--from-manifest", val_a + ".manifest.json", "--out",
                            val_b}) == 0,
            "validate manifest replay failed");
  c.require(slurp(val_a) == slurp(val_b), "validate outputs differ");
  for (const auto& f : {out_a, out_b, out_c, val_a, val_b}) {
    std::remove(f.c_str());
    std::remove((f + ".manifest.json").c_str());
  }
  std::remove(cfg.c_str());
  c.finish();
}

}  // namespace

int main() {
  criterion_normalization();
  criterion_characters();
  criterion_c1_properties();
  criterion_closed_form_agreement();
  criterion_three_routes();
  criterion_first_moment();
  criterion_operators();
  criterion_gci();
  criterion_projection();
  criterion_pdmp_equilibrium();
  criterion_field_identities();
  criterion_reproducibility();

  if (g_failures == 0) {
    std::printf("all acceptance criteria passed\n");
    return 0;
  }
  std::printf("%d acceptance criteria FAILED\n", g_failures);
  return 1;
}
