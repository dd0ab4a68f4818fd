#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "sohb/coefficients.hpp"
#include "sohb/errors.hpp"
#include "sohb/fields.hpp"
#include "sohb/number_format.hpp"
#include "sohb/pdmp.hpp"
#include "sohb/validation.hpp"

namespace sohb::cli {

namespace {

constexpr const char* kToolVersion = "0.1.0";
constexpr int kSchemaVersion = 1;

using nlohmann::json;

std::string now_iso8601() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&t));
  return buf;
}

/// "0.5,1,2" or "0:0.5:10" (start:step:stop, inclusive).
std::vector<double> parse_kappa_list(const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    double start = 0, step = 0, stop = 0;
    char c1 = 0, c2 = 0;
    std::istringstream in(text);
    if (!(in >> start >> c1 >> step >> c2 >> stop) || c1 != ':' || c2 != ':' || step <= 0) {
      throw ConfigError("--kappa range must be start:step:stop with step > 0");
    }
    for (double k = start; k <= stop + 1e-12 * step; k += step) out.push_back(k);
    return out;
  }
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (...) {
      throw ConfigError("--kappa: bad number '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError("--kappa: empty list");
  for (double k : out) {
    if (!(k >= 0)) throw ConfigError("--kappa values must be >= 0");
  }
  return out;
}

struct ManifestWriter {
  std::string subcommand;
  json config;
  std::uint64_t seed = 0;
  std::string started = now_iso8601();

  void write(const std::string& out_path, const std::vector<std::string>& outputs) const {
    if (out_path.empty()) return;
    json m;
    m["schema_version"] = kSchemaVersion;
    m["tool_version"] = kToolVersion;
    m["subcommand"] = subcommand;
    m["seed"] = seed;
    m["config"] = config;
    m["started_at"] = started;
    m["finished_at"] = now_iso8601();
    m["outputs"] = outputs;
    std::ofstream os(out_path);
    if (!os) throw ConfigError("cannot write manifest: " + out_path);
    os << m.dump(2) << "\n";
  }
};

json load_manifest_config(const std::string& path, const std::string& expected_subcommand) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open manifest: " + path);
  json m;
  try {
    in >> m;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("bad manifest JSON: ") + e.what());
  }
  if (m.value("subcommand", "") != expected_subcommand) {
    throw ConfigError("manifest subcommand does not match '" + expected_subcommand + "'");
  }
  if (!m.contains("config")) throw ConfigError("manifest has no config object");
  return m["config"];
}

struct OutStream {
  std::ofstream file;
  std::ostream* os = &std::cout;
  explicit OutStream(const std::string& path) {
    if (!path.empty()) {
      file.open(path, std::ios::binary);
      if (!file) throw ConfigError("cannot open output file: " + path);
      os = &file;
    }
  }
};

// --------------------------------------------------------------------
// coeffs

struct CoeffsArgs {
  int n = 3;
  std::string kappa_text = "1";
  std::string route = "weyl";
  double tol = 1e-10;
  std::string out;
  std::string from_manifest;

  json to_json() const {
    return json{{"n", n}, {"kappa", kappa_text}, {"route", route}, {"tol", tol}};
  }
  void from_json(const json& j) {
    n = j.at("n").get<int>();
    kappa_text = j.at("kappa").get<std::string>();
    route = j.at("route").get<std::string>();
    tol = j.at("tol").get<double>();
  }
};

int cmd_coeffs(CoeffsArgs a) {
  if (!a.from_manifest.empty()) a.from_json(load_manifest_config(a.from_manifest, "coeffs"));
  if (a.n < 3) throw ConfigError("--n must be >= 3");
  if (a.route == "n3" && a.n != 3) throw ConfigError("--route n3 requires --n 3");
  const std::vector<double> kappas = parse_kappa_list(a.kappa_text);

  ManifestWriter manifest{"coeffs", a.to_json(), 0};
  OutStream out(a.out);
  const bool all = a.route == "all";
  *out.os << coefficient_csv_header(all) << "\n";
  for (double kappa : kappas) {
    if (a.route == "weyl") {
      *out.os << coefficient_csv_row(coefficients_weyl(a.n, kappa, a.tol)) << "\n";
    } else if (a.route == "moments") {
      *out.os << coefficient_csv_row(coefficients_trace_moments(a.n, kappa, a.tol)) << "\n";
    } else if (a.route == "n3") {
      *out.os << coefficient_csv_row(closed_form_n3(kappa)) << "\n";
    } else if (all) {
      std::vector<CoefficientTable> tables;
      tables.push_back(coefficients_weyl(a.n, kappa, a.tol));
      tables.push_back(coefficients_trace_moments(a.n, kappa, a.tol));
      if (a.n == 3 && kappa > 0) tables.push_back(closed_form_n3(kappa));
      double disc = 0.0;
      for (std::size_t i = 0; i < tables.size(); ++i) {
        for (std::size_t j = i + 1; j < tables.size(); ++j) {
          disc = std::max(disc, max_route_discrepancy({tables[i], tables[j]}));
        }
      }
      for (const auto& t : tables) *out.os << coefficient_csv_row(t, disc) << "\n";
    } else {
      throw ConfigError("--route must be weyl, moments, n3 or all");
    }
  }
  out.os->flush();
  if (!a.out.empty()) manifest.write(a.out + ".manifest.json", {a.out});
  return 0;
}

// --------------------------------------------------------------------
// simulate

struct SimulateArgs {
  std::string config_path;
  std::string from_manifest;
  std::string out;
  // overrides
  std::optional<std::uint64_t> seed;
  std::optional<double> t_end;
  std::optional<double> snapshot_every;
};

json params_to_json(const SimParams& p) {
  json j{{"N", p.N},           {"n", p.n},
         {"c0", p.c0},         {"nu", p.nu},
         {"kappa", p.kappa},   {"R", p.R},
         {"L", p.L},           {"T_end", p.T_end},
         {"seed", p.seed},     {"snapshot_every", p.snapshot_every}};
  j["kernel"] = p.kernel == SensingKernel::indicator ? "indicator" : "table";
  if (p.kernel == SensingKernel::table) j["kernel_table"] = p.kernel_table;
  j["frame_init"] = p.frame_init == FrameInit::aligned ? "aligned" : "haar";
  j["neighbor"] = p.neighbor == NeighborMode::automatic
                      ? "auto"
                      : (p.neighbor == NeighborMode::brute ? "brute" : "cells");
  j["jump_rule"] = "normalized";
  return j;
}

SimParams params_from_json(const json& j) {
  // round-trip through the TOML loader to share validation
  std::ostringstream toml;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() == "kernel_table") {
      toml << "kernel_table = [";
      bool first = true;
      for (double v : it.value().get<std::vector<double>>()) {
        if (!first) toml << ", ";
        toml << fp17(v);
        first = false;
      }
      toml << "]\n";
    } else if (it.value().is_string()) {
      toml << it.key() << " = \"" << it.value().get<std::string>() << "\"\n";
    } else if (it.value().is_number_integer() || it.value().is_number_unsigned()) {
      toml << it.key() << " = " << it.value() << "\n";
    } else {
      toml << it.key() << " = " << fp17(it.value().get<double>()) << "\n";
    }
  }
  return SimParams::from_toml(TomlTable::parse(toml.str()));
}

int cmd_simulate(const SimulateArgs& a) {
  SimParams params;
  if (!a.from_manifest.empty()) {
    params = params_from_json(load_manifest_config(a.from_manifest, "simulate"));
  } else if (!a.config_path.empty()) {
    params = SimParams::from_toml_file(a.config_path);
  } else {
    throw ConfigError("simulate needs --config or --from-manifest");
  }
  if (a.seed) params.seed = *a.seed;
  if (a.t_end) params.T_end = *a.t_end;
  if (a.snapshot_every) params.snapshot_every = *a.snapshot_every;
  params.validate();

  ManifestWriter manifest{"simulate", params_to_json(params), params.seed};
  OutStream out(a.out);
  NdjsonEventWriter writer(*out.os);
  RunStats stats;
  run(params, &writer, &stats);
  out.os->flush();
  if (!a.out.empty()) manifest.write(a.out + ".manifest.json", {a.out});
  return 0;
}

// --------------------------------------------------------------------
// validate

struct ValidateArgs {
  std::string suite = "all";
  std::vector<int> n_list;
  std::string kappa_text;
  int grid = 24;
  std::uint64_t seed = 20240901;
  std::size_t samples = 0;  // 0 = per-suite default
  std::string out;
  std::string from_manifest;
  std::string dump_fields;

  json to_json() const {
    return json{{"suite", suite},   {"n", n_list}, {"kappa", kappa_text}, {"grid", grid},
                {"seed", seed},     {"samples", samples}};
  }
  void from_json(const json& j) {
    suite = j.at("suite").get<std::string>();
    n_list = j.at("n").get<std::vector<int>>();
    kappa_text = j.at("kappa").get<std::string>();
    grid = j.at("grid").get<int>();
    seed = j.at("seed").get<std::uint64_t>();
    samples = j.at("samples").get<std::size_t>();
  }
};

class CheckCollector {
 public:
  explicit CheckCollector(std::ostream& os) : os_(os) {}

  void add(CheckResult r) {
    all_pass_ = all_pass_ && r.pass;
    os_ << to_ndjson(r) << "\n";
  }

  /// Runs `body` and turns any exception into a failed check.
  template <class F>
  void guarded(const std::string& name, int n, double kappa, F&& body) {
    try {
      body();
    } catch (const std::exception& e) {
      add(CheckResult{name, n, kappa, 0.0, 0.0, false, e.what()});
    }
  }

  bool all_pass() const { return all_pass_; }

 private:
  std::ostream& os_;
  bool all_pass_ = true;
};

/// Entrywise |a - b| <= 3 sigma + floor; returns the worst violation ratio.
bool within_3sigma(const Mat& value, const Mat& oracle, const Mat& sigma,
                   double* worst_abs, double* worst_sigma) {
  bool ok = true;
  *worst_abs = 0.0;
  *worst_sigma = 0.0;
  for (int i = 0; i < value.rows(); ++i) {
    for (int j = 0; j < value.cols(); ++j) {
      const double d = std::abs(value(i, j) - oracle(i, j));
      const double s = sigma(i, j);
      if (d > *worst_abs) {
        *worst_abs = d;
        *worst_sigma = s;
      }
      if (d > 3.0 * s + 1e-12) ok = false;
    }
  }
  return ok;
}

void suite_moments(CheckCollector& out, const std::vector<int>& ns,
                   const std::vector<double>& kappas, std::size_t samples,
                   std::uint64_t seed) {
  const std::size_t n_samples = samples ? samples : 100000;
  std::uint64_t stream = 0;
  for (int n : ns) {
    for (double kappa : kappas) {
      out.guarded("first_moment_identity", n, kappa, [&] {
        RngStream rng = RngStream::substream(seed, stream++);
        const Rotation theta = haar_sample(rng, n);
        const VonMises vm(theta, kappa);
        const auto est = mc_expectation(
            vm, [](const Rotation& a) { return Mat(a.matrix()); }, n_samples, rng);
        const Mat oracle = coefficients_weyl(n, kappa).c1 * theta.matrix();
        double worst = 0, sig = 0;
        const bool ok = within_3sigma(est.value, oracle, est.std_error, &worst, &sig);
        out.add(CheckResult{"first_moment_identity", n, kappa, worst, sig, ok, ""});
      });
      for (int k = 1; k <= 3; ++k) {
        const std::string name = "trace_moment_mc_k" + std::to_string(k);
        out.guarded(name, n, kappa, [&] {
          RngStream rng = RngStream::substream(seed, stream++);
          const VonMises vm(Rotation::identity(n), kappa);
          const auto est = mc_expectation_scalar(
              vm,
              [n, k](const Rotation& a) {
                Mat p = a.matrix();
                for (int i = 1; i < k; ++i) p = Mat(p * a.matrix());
                return p.trace() / n;
              },
              n_samples, rng);
          const double oracle = trace_moment(n, kappa, k);
          const bool ok = std::abs(est.value - oracle) <= 3.0 * est.std_error + 1e-12;
          out.add(CheckResult{name, n, kappa, est.value - oracle, est.std_error, ok, ""});
        });
      }
      out.guarded("self_normalization", n, kappa, [&] {
        RngStream rng = RngStream::substream(seed, stream++);
        const VonMises vm(Rotation::identity(n), kappa);
        const auto est = mc_expectation_scalar(
            vm, [](const Rotation&) { return 1.0; }, 10000, rng);
        const bool ok = std::abs(est.value - 1.0) < 1e-14;
        out.add(CheckResult{"self_normalization", n, kappa, est.value, 0.0, ok, ""});
      });
    }
  }
}

SkewMatrix random_unit_skew(int n, RngStream& rng) {
  Mat s = Mat::Zero(n, n);
  double norm2 = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double v = rng.normal();
      s(i, j) = v;
      norm2 += 2.0 * v * v;
    }
  }
  return SkewMatrix::from_upper(Mat(s / std::sqrt(norm2)));
}

std::size_t operator_samples_for(int n, std::size_t override_samples) {
  if (override_samples) return override_samples;
  if (n <= 3) return 200000;
  if (n == 4) return 400000;
  return 1000000;
}

void suite_operators(CheckCollector& out, const std::vector<int>& ns,
                     const std::vector<double>& kappas, std::size_t samples,
                     std::uint64_t seed) {
  std::uint64_t stream = 1000;
  for (int n : ns) {
    const std::size_t n_samples = operator_samples_for(n, samples);
    for (double kappa : kappas) {
      const CoefficientTable coeff = coefficients_weyl(n, kappa);
      for (int pair = 0; pair < 5; ++pair) {
        RngStream rng = RngStream::substream(seed, stream++);
        const SkewMatrix p = random_unit_skew(n, rng);
        const SkewMatrix q = random_unit_skew(n, rng);
        out.guarded("operator_L", n, kappa, [&] {
          const auto est = operator_l_mc(p, kappa, n_samples, rng);
          double worst = 0, sig = 0;
          const bool ok = within_3sigma(est.value, Mat(coeff.C2 * p.matrix()),
                                        est.std_error, &worst, &sig);
          out.add(CheckResult{"operator_L", n, kappa, worst, sig, ok,
                              "pair " + std::to_string(pair)});
        });
        out.guarded("operator_B", n, kappa, [&] {
          const auto est = operator_b_mc(p, q, kappa, n_samples, rng);
          const Mat oracle = operator_b_closed_form(p, q, coeff.C3, coeff.C4);
          double worst = 0, sig = 0;
          const bool ok = within_3sigma(est.value, oracle, est.std_error, &worst, &sig);
          out.add(CheckResult{"operator_B", n, kappa, worst, sig, ok,
                              "pair " + std::to_string(pair)});
        });
      }
    }
  }
}

MixtureDistribution random_mixture(int n, int n_components, RngStream& rng) {
  std::vector<MixtureComponent> comps;
  for (int i = 0; i < n_components; ++i) {
    const double w = 0.2 + rng.uniform();
    const double kappa = 0.5 + 1.5 * rng.uniform();
    comps.push_back(MixtureComponent{w, VonMises(haar_sample(rng, n), kappa)});
  }
  return MixtureDistribution(std::move(comps));
}

void suite_gci(CheckCollector& out, const std::vector<int>& ns, std::size_t samples,
               std::uint64_t seed) {
  const std::size_t n_samples = samples ? samples : 20000;
  std::uint64_t stream = 2000;
  for (int n : ns) {
    for (int trial = 0; trial < 20; ++trial) {
      out.guarded("gci_residuals", n, 0.0, [&] {
        RngStream rng = RngStream::substream(seed, stream++);
        const MixtureDistribution f = random_mixture(n, 3, rng);
        const double model_kappa = 1.0 + rng.uniform();
        const GciResiduals res = gci_residuals(f, model_kappa, n_samples, rng);
        // norm-level bounds: |r0| and ||r1||_F against 3 aggregated sigmas
        const double r1_norm = res.r1.norm();
        const double r1_sigma = res.r1_std_error.norm();
        const bool ok = std::abs(res.r0) <= 3.0 * res.r0_std_error + 1e-12 &&
                        r1_norm <= 3.0 * r1_sigma + 1e-12;
        out.add(CheckResult{"gci_residuals", n, model_kappa, r1_norm, r1_sigma, ok,
                            "trial " + std::to_string(trial)});
      });
    }
    out.guarded("gci_negative_control", n, 0.0, [&] {
      RngStream rng = RngStream::substream(seed, stream++);
      const MixtureDistribution f = random_mixture(n, 3, rng);
      const double model_kappa = 1.0 + rng.uniform();
      const Rotation wrong = haar_sample(rng, n);
      const GciResiduals res = gci_residuals(f, model_kappa, n_samples, rng, wrong);
      const double ratio = res.r1.norm() / std::max(res.r1_std_error.norm(), 1e-300);
      out.add(CheckResult{"gci_negative_control", n, model_kappa, ratio, 1.0,
                          ratio > 5.0, "wrong-theta residual in sigmas"});
    });
  }
}

void suite_fields(CheckCollector& out, int n, double kappa, int grid,
                  std::uint64_t seed, const std::string& dump_path) {
  SyntheticFields synth;
  synth.n = n;
  synth.seed = seed;
  out.guarded("fields_bundle_invariants", n, kappa, [&] {
    const ScalarField rho = synth.rho(grid);
    const RotationField theta = synth.theta(grid);
    const FieldBundle b = compute_bundle(rho, theta, kappa);
    double delta_asym = 0.0, a_omega1 = 0.0, skewness = 0.0;
    const auto& d = rho.grid().dims;
    for (int i = 0; i < d[0]; ++i) {
      for (int j = 0; j < d[1]; ++j) {
        for (int k = 0; k < d[2]; ++k) {
          for (int a = 0; a < n; ++a) {
            for (int bb = 0; bb < n; ++bb) {
              for (int c = 0; c < n; ++c) {
                const double v = b.delta.at(i, j, k, a, bb, c);
                delta_asym = std::max(delta_asym, std::abs(v + b.delta.at(i, j, k, bb, a, c)));
                delta_asym = std::max(delta_asym, std::abs(v + b.delta.at(i, j, k, a, c, bb)));
              }
            }
          }
          const Mat a_m = b.a.at(i, j, k);
          const Vec om1 = theta.matrices().at(i, j, k).col(0);
          a_omega1 = std::max(a_omega1, (a_m * om1).cwiseAbs().maxCoeff());
          auto asym = [](const Mat& m) {
            return (m + Mat(m.transpose())).cwiseAbs().maxCoeff();
          };
          skewness = std::max({skewness, asym(a_m), asym(b.w.at(i, j, k)),
                               asym(b.w_tilde.at(i, j, k))});
        }
      }
    }
    const double worst = std::max({delta_asym, a_omega1, skewness});
    out.add(CheckResult{"fields_bundle_invariants", n, kappa, worst, 0.0, worst <= 1e-12,
                        "max of delta antisymmetry / A omega1 / skewness violations"});
    if (!dump_path.empty()) {
      std::ofstream fs(dump_path);
      write_matrix_csv(fs, b.w_tilde);
    }
  });
  out.guarded("fields_equivalence_order", n, kappa, [&] {
    const int sizes[2] = {grid / 2, grid};
    const EquivalenceReport rep = check_equivalence(synth, kappa, sizes);
    out.add(CheckResult{"fields_equivalence_order", n, kappa, rep.a_order, 0.0,
                        rep.a_order >= 3.5, "A vs Atilde empirical order"});
    out.add(CheckResult{"fields_orient_forms_order", n, kappa, rep.rhs_order, 0.0,
                        rep.rhs_order >= 3.5, "orient3 vs orient4 empirical order"});
  });
  out.guarded("fields_omega_components", n, kappa, [&] {
    const ScalarField rho_c = synth.rho(grid / 2);
    const RotationField theta_c = synth.theta(grid / 2);
    const OmegaComponentReport coarse = omega_component_check(rho_c, theta_c, kappa);
    const ScalarField rho_f = synth.rho(grid);
    const RotationField theta_f = synth.theta(grid);
    const OmegaComponentReport fine = omega_component_check(rho_f, theta_f, kappa);
    const double order = std::log2(coarse.max_residual / fine.max_residual);
    out.add(CheckResult{"fields_omega_components", n, kappa, order, 0.0, order >= 3.5,
                        "component-equation residual order"});
    const double tangency_order = std::log2(coarse.tangency_error / fine.tangency_error);
    out.add(CheckResult{"fields_tangency", n, kappa, tangency_order, 0.0,
                        tangency_order >= 3.0, "skewness of dtTheta Theta^T order"});
  });
  out.guarded("fields_mass_uniform", n, kappa, [&] {
    // constant rho and Theta: the flux is constant, so the divergence is 0
    const GridShape g = GridShape::cubic(8, synth.box_edge);
    ScalarField rho(g, 1.3);
    MatrixField frames(g, n, n);
    for (int i = 0; i < 8; ++i) {
      for (int j = 0; j < 8; ++j) {
        for (int k = 0; k < 8; ++k) frames.at(i, j, k) = Mat::Identity(n, n);
      }
    }
    const ScalarField dt_rho = mass_rhs(rho, RotationField::checked(std::move(frames)), kappa);
    double worst = 0.0;
    for (double v : dt_rho.data()) worst = std::max(worst, std::abs(v));
    out.add(CheckResult{"fields_mass_uniform", n, kappa, worst, 0.0, worst == 0.0, ""});
  });
}

int cmd_validate(ValidateArgs a) {
  if (!a.from_manifest.empty()) a.from_json(load_manifest_config(a.from_manifest, "validate"));
  if (a.suite != "moments" && a.suite != "operators" && a.suite != "gci" &&
      a.suite != "fields" && a.suite != "all") {
    throw ConfigError("suite must be one of: moments, operators, gci, fields, all");
  }

  ManifestWriter manifest{"validate", json{}, a.seed};
  OutStream out(a.out);
  CheckCollector collector(*out.os);

  if (a.suite == "moments" || a.suite == "all") {
    const auto ns = a.n_list.empty() ? std::vector<int>{3, 4} : a.n_list;
    const auto kappas = parse_kappa_list(a.kappa_text.empty() ? "0.5,2,5" : a.kappa_text);
    suite_moments(collector, ns, kappas, a.samples, a.seed);
  }
  if (a.suite == "operators" || a.suite == "all") {
    const auto ns = a.n_list.empty() ? std::vector<int>{3, 4, 5} : a.n_list;
    const auto kappas = parse_kappa_list(a.kappa_text.empty() ? "1" : a.kappa_text);
    suite_operators(collector, ns, kappas, a.samples, a.seed);
  }
  if (a.suite == "gci" || a.suite == "all") {
    const auto ns = a.n_list.empty() ? std::vector<int>{3, 4} : a.n_list;
    suite_gci(collector, ns, a.samples, a.seed);
  }
  if (a.suite == "fields" || a.suite == "all") {
    const int n = a.n_list.empty() ? 3 : a.n_list.front();
    const auto kappas = parse_kappa_list(a.kappa_text.empty() ? "2" : a.kappa_text);
    suite_fields(collector, n, kappas.front(), a.grid, a.seed, a.dump_fields);
  }

  out.os->flush();
  ValidateArgs resolved = a;
  manifest.config = resolved.to_json();
  if (!a.out.empty()) manifest.write(a.out + ".manifest.json", {a.out});
  return collector.all_pass() ? 0 : 1;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Body-attitude coordination toolkit on SO(n): coefficient tables, "
               "particle simulation and identity validation"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  CoeffsArgs ca;
  auto* coeffs = app.add_subcommand("coeffs", "Hydrodynamic coefficient tables (CSV)");
  coeffs->add_option("--n", ca.n, "Rotation dimension (>= 3)");
  coeffs->add_option("--kappa", ca.kappa_text, "Comma list or start:step:stop range");
  coeffs->add_option("--route", ca.route, "weyl | moments | n3 | all");
  coeffs->add_option("--tol", ca.tol, "Quadrature convergence tolerance");
  coeffs->add_option("--out", ca.out, "Output CSV path (stdout if omitted)");
  coeffs->add_option("--from-manifest", ca.from_manifest, "Reproduce a previous run");

  SimulateArgs sa;
  std::uint64_t seed_override = 0;
  double t_end_override = 0, snap_override = 0;
  auto* simulate = app.add_subcommand("simulate", "Event-driven particle simulation (NDJSON)");
  simulate->add_option("--config", sa.config_path, "TOML config file");
  auto* seed_opt = simulate->add_option("--seed", seed_override, "Override the config seed");
  auto* tend_opt = simulate->add_option("--t-end", t_end_override, "Override the horizon");
  auto* snap_opt =
      simulate->add_option("--snapshot-every", snap_override, "Override the snapshot period");
  simulate->add_option("--out", sa.out, "Output NDJSON path (stdout if omitted)");
  simulate->add_option("--from-manifest", sa.from_manifest, "Reproduce a previous run");

  ValidateArgs va;
  auto* validate = app.add_subcommand("validate", "Identity validation suites (NDJSON report)");
  validate->add_option("suite", va.suite, "moments | operators | gci | fields | all (default)");
  validate->add_option("--n", va.n_list, "Dimensions to test");
  validate->add_option("--kappa", va.kappa_text, "Comma list or range");
  validate->add_option("--grid", va.grid, "Fields suite grid nodes per axis");
  validate->add_option("--seed", va.seed, "Base RNG seed");
  validate->add_option("--samples", va.samples, "MC samples per check (0 = default)");
  validate->add_option("--out", va.out, "Report path (stdout if omitted)");
  validate->add_option("--dump-fields", va.dump_fields, "Dump the Wtilde field as CSV");
  validate->add_option("--from-manifest", va.from_manifest, "Reproduce a previous run");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (coeffs->parsed()) return cmd_coeffs(ca);
    if (simulate->parsed()) {
      if (seed_opt->count()) sa.seed = seed_override;
      if (tend_opt->count()) sa.t_end = t_end_override;
      if (snap_opt->count()) sa.snapshot_every = snap_override;
      return cmd_simulate(sa);
    }
    if (validate->parsed()) return cmd_validate(va);
  } catch (const InternalMismatchError& e) {
    std::cerr << "internal inconsistency: " << e.what() << "\n";
    return 3;
  } catch (const NoConvergenceError& e) {
    std::cerr << "no convergence: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}

int run(const std::vector<std::string>& args) {
  std::vector<std::string> full;
  full.reserve(args.size() + 1);
  full.push_back("sohb");
  full.insert(full.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  argv.reserve(full.size());
  for (const auto& s : full) argv.push_back(s.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace sohb::cli
