#include "sohb/pdmp.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <queue>

#include "sohb/errors.hpp"
#include "sohb/number_format.hpp"
#include "sohb/von_mises.hpp"

namespace sohb {

namespace {

double fold_coord(double x, double box) {
  double y = std::fmod(x, box);
  if (y < 0) y += box;
  if (y >= box) y -= box;  // guards the x = -eps rounding case
  return y;
}

Vec fold(Vec x, double box) {
  for (int i = 0; i < x.size(); ++i) x[i] = fold_coord(x[i], box);
  return x;
}

double periodic_distance(const Vec& a, const Vec& b, double box) {
  double s = 0.0;
  for (int i = 0; i < a.size(); ++i) {
    double d = std::abs(a[i] - b[i]);
    d = std::min(d, box - d);
    s += d * d;
  }
  return std::sqrt(s);
}

/// K(x) = R^-n K~(|x|/R); K~ is the [0,1] indicator by default, or a
/// piecewise-linear table sampled uniformly on [0,1].
double kernel_value(const SimParams& p, double dist) {
  const double u = dist / p.R;
  if (u > 1.0) return 0.0;
  const double scale = std::pow(p.R, -p.n);
  if (p.kernel == SensingKernel::indicator) return scale;
  const auto& tab = p.kernel_table;
  const double pos = u * (tab.size() - 1);
  const std::size_t lo = std::min(static_cast<std::size_t>(pos), tab.size() - 2);
  const double frac = pos - lo;
  return scale * (tab[lo] * (1.0 - frac) + tab[lo + 1] * frac);
}

}  // namespace

bool SimParams::homogeneous() const { return R >= std::sqrt(static_cast<double>(n)) * L; }

void SimParams::validate() const {
  if (N < 1) throw ConfigError("SimParams: N must be >= 1");
  if (n < 3) throw ConfigError("SimParams: n must be >= 3");
  if (!(c0 >= 0)) throw ConfigError("SimParams: c0 must be >= 0");
  if (!(nu >= 0)) throw ConfigError("SimParams: nu must be >= 0");
  if (!(kappa >= 0)) throw ConfigError("SimParams: kappa must be >= 0");
  if (!(R > 0) || !(L > 0)) throw ConfigError("SimParams: R and L must be positive");
  if (!(T_end >= 0)) throw ConfigError("SimParams: T_end must be >= 0");
  if (!(snapshot_every >= 0)) throw ConfigError("SimParams: snapshot_every must be >= 0");
  if (R > L / 2 && !homogeneous()) {
    throw ConfigError(
        "SimParams: R must be <= L/2, or >= sqrt(n)*L for the all-to-all homogeneous mode");
  }
  if (kernel == SensingKernel::table) {
    if (kernel_table.size() < 2) {
      throw ConfigError("SimParams: kernel_table needs at least 2 samples");
    }
    for (double v : kernel_table) {
      if (!(v >= 0)) throw ConfigError("SimParams: kernel_table values must be >= 0");
    }
  }
  if (jump_rule == JumpRule::unnormalized) {
    throw ConfigError("SimParams: jump_rule 'unnormalized' is reserved but unimplemented");
  }
}

SimParams SimParams::from_toml(const TomlTable& t) {
  SimParams p;
  p.N = static_cast<int>(t.get_int("N"));
  p.n = static_cast<int>(t.get_int("n"));
  p.c0 = t.get_double("c0");
  p.nu = t.get_double("nu");
  p.kappa = t.get_double("kappa");
  p.R = t.get_double("R");
  p.L = t.get_double("L");
  p.T_end = t.get_double("T_end");
  p.seed = static_cast<std::uint64_t>(t.get_int("seed", 0));
  const std::string kernel = t.get_string("kernel", "indicator");
  if (kernel == "indicator") {
    p.kernel = SensingKernel::indicator;
  } else if (kernel == "table") {
    p.kernel = SensingKernel::table;
    p.kernel_table = t.get_double_array("kernel_table");
  } else {
    throw ConfigError("SimParams: kernel must be 'indicator' or 'table'");
  }
  const std::string init = t.get_string("frame_init", "aligned");
  if (init == "aligned") {
    p.frame_init = FrameInit::aligned;
  } else if (init == "haar") {
    p.frame_init = FrameInit::haar;
  } else {
    throw ConfigError("SimParams: frame_init must be 'aligned' or 'haar'");
  }
  const std::string nb = t.get_string("neighbor", "auto");
  if (nb == "auto") {
    p.neighbor = NeighborMode::automatic;
  } else if (nb == "brute") {
    p.neighbor = NeighborMode::brute;
  } else if (nb == "cells") {
    p.neighbor = NeighborMode::cells;
  } else {
    throw ConfigError("SimParams: neighbor must be 'auto', 'brute' or 'cells'");
  }
  const std::string rule = t.get_string("jump_rule", "normalized");
  if (rule == "normalized") {
    p.jump_rule = JumpRule::normalized;
  } else if (rule == "unnormalized") {
    p.jump_rule = JumpRule::unnormalized;
  } else {
    throw ConfigError("SimParams: jump_rule must be 'normalized' or 'unnormalized'");
  }
  p.snapshot_every = t.get_double("snapshot_every", 0.0);
  p.validate();
  return p;
}

SimParams SimParams::from_toml_file(const std::string& path) {
  return from_toml(TomlTable::parse_file(path));
}

Vec ParticleEnsemble::position_at(std::size_t k, double t) const {
  const Particle& p = particles_.at(k);
  if (t < p.t_mark - 1e-12) {
    throw std::invalid_argument("position_at: t precedes the particle's last event");
  }
  const Vec dir = p.a.col(0);
  return fold(p.x + params_.c0 * (t - p.t_mark) * dir, params_.L);
}

Mat ParticleEnsemble::neighbor_average(std::size_t k, double t) const {
  const int n = params_.n;
  const Vec xk = position_at(k, t);
  Mat j = Mat::Zero(n, n);
  for (std::size_t l = 0; l < particles_.size(); ++l) {
    const double kv = kernel_value(params_, periodic_distance(xk, position_at(l, t), params_.L));
    if (kv != 0.0) j += kv * particles_[l].a;
  }
  return j / static_cast<double>(particles_.size());
}

double order_parameter(const ParticleEnsemble& ensemble) {
  const int n = ensemble.params().n;
  Mat j = Mat::Zero(n, n);
  for (const auto& p : ensemble.particles()) j += p.a;
  j /= static_cast<double>(ensemble.size());
  const Rotation theta = project_to_rotation(j);
  return matrix_inner(j, theta.matrix()) / n;
}

void NdjsonEventWriter::on_jump(const JumpRecord& r) {
  os_ << "{\"t\":" << fp17(r.t) << ",\"k\":" << r.k << ",\"theta_k\":[";
  for (int i = 0; i < r.theta_k.size(); ++i) {
    if (i) os_ << ',';
    os_ << fp17(r.theta_k.data()[i]);
  }
  os_ << "],\"a_new\":[";
  for (int i = 0; i < r.a_new.size(); ++i) {
    if (i) os_ << ',';
    os_ << fp17(r.a_new.data()[i]);
  }
  os_ << "]}\n";
}

void NdjsonEventWriter::on_snapshot(const SnapshotRecord& r) {
  os_ << "{\"t\":" << fp17(r.t) << ",\"order_parameter\":" << fp17(r.order_parameter)
      << ",\"J_glob\":[";
  for (int i = 0; i < r.j_glob.size(); ++i) {
    if (i) os_ << ',';
    os_ << fp17(r.j_glob.data()[i]);
  }
  os_ << "]}\n";
}

void NdjsonEventWriter::on_warning(double t, std::size_t k, const std::string& what) {
  os_ << "{\"t\":" << fp17(t) << ",\"k\":" << k << ",\"warning\":\"" << what << "\"}\n";
}

namespace {

/// Fixed-radius bins with a motion margin: valid while every particle has
/// drifted less than (cell_edge - R)/2 since the build.
class CellList {
 public:
  CellList(const SimParams& p) : params_(p) {
    cpa_ = static_cast<int>(std::floor(p.L / (1.5 * p.R)));  // edge >= 1.5 R
    cell_edge_ = p.L / cpa_;
    usable_ = cpa_ >= 3 && p.n <= 5;
  }

  bool usable() const { return usable_; }

  void build(const ParticleEnsemble& e, double t) {
    bins_.assign(bin_count(), {});
    for (std::size_t i = 0; i < e.size(); ++i) {
      bins_[bin_of(e.position_at(i, t))].push_back(i);
    }
    t_built_ = t;
  }

  bool stale(double t, double c0) const {
    return 2.0 * c0 * (t - t_built_) > cell_edge_ - params_.R;
  }

  /// Ascending candidate indices from the 3^n block around x.
  void gather(const Vec& x, std::vector<std::size_t>& out) const {
    out.clear();
    std::vector<int> base(params_.n), off(params_.n, -1);
    for (int d = 0; d < params_.n; ++d) {
      base[d] = coord(x[d]);
    }
    for (;;) {
      std::size_t idx = 0;
      for (int d = 0; d < params_.n; ++d) {
        int c = (base[d] + off[d]) % cpa_;
        if (c < 0) c += cpa_;
        idx = idx * cpa_ + c;
      }
      const auto& bin = bins_[idx];
      out.insert(out.end(), bin.begin(), bin.end());
      int d = params_.n - 1;
      for (; d >= 0; --d) {
        if (++off[d] <= 1) break;
        off[d] = -1;
      }
      if (d < 0) break;
    }
    std::sort(out.begin(), out.end());
  }

 private:
  std::size_t bin_count() const {
    std::size_t c = 1;
    for (int d = 0; d < params_.n; ++d) c *= cpa_;
    return c;
  }
  int coord(double x) const {
    int c = static_cast<int>(x / cell_edge_);
    return std::min(std::max(c, 0), cpa_ - 1);
  }
  std::size_t bin_of(const Vec& x) const {
    std::size_t idx = 0;
    for (int d = 0; d < params_.n; ++d) idx = idx * cpa_ + coord(x[d]);
    return idx;
  }

  const SimParams& params_;
  int cpa_ = 0;
  double cell_edge_ = 0;
  bool usable_ = false;
  double t_built_ = -1e300;
  std::vector<std::vector<std::size_t>> bins_;
};

enum class NeighborPlan { brute, homogeneous, cells };

NeighborPlan resolve_neighbor(const SimParams& p, const CellList& cells) {
  // the all-to-all shortcut assumes a constant kernel value; a table kernel
  // still depends on distance
  if (p.homogeneous() && p.kernel == SensingKernel::indicator) {
    return NeighborPlan::homogeneous;
  }
  if (p.homogeneous()) return NeighborPlan::brute;
  switch (p.neighbor) {
    case NeighborMode::brute:
      return NeighborPlan::brute;
    case NeighborMode::cells:
      if (!cells.usable()) {
        throw ConfigError("neighbor='cells' needs n <= 5 and L >= 4.5 R (cell grid too coarse)");
      }
      return NeighborPlan::cells;
    case NeighborMode::automatic:
      return (p.N > 10000 && cells.usable()) ? NeighborPlan::cells : NeighborPlan::brute;
  }
  return NeighborPlan::brute;
}

}  // namespace

ParticleEnsemble run(const SimParams& params, EventSink* sink, RunStats* stats) {
  params.validate();
  const int n = params.n;
  RngStream rng(params.seed);

  // --- initial conditions (uniform positions; aligned or Haar frames)
  std::vector<Particle> particles;
  particles.reserve(params.N);
  for (int i = 0; i < params.N; ++i) {
    Particle p;
    p.x = Vec(n);
    for (int d = 0; d < n; ++d) p.x[d] = params.L * rng.uniform();
    p.a = Mat::Identity(n, n);
    p.t_mark = 0.0;
    p.next_jump = std::numeric_limits<double>::infinity();
    particles.push_back(std::move(p));
  }
  if (params.frame_init == FrameInit::haar) {
    for (auto& p : particles) p.a = haar_sample(rng, n).matrix();
  }
  if (params.nu > 0) {
    for (auto& p : particles) p.next_jump = rng.exponential(params.nu);
  }

  ParticleEnsemble ensemble(params, std::move(particles), 0.0);
  CellList cells(ensemble.params());
  const NeighborPlan plan = resolve_neighbor(params, cells);

  VonMisesSampler frame_sampler{VonMises(Rotation::identity(n), params.kappa)};

  using QEntry = std::pair<double, std::size_t>;  // (time, particle); min-heap
  std::priority_queue<QEntry, std::vector<QEntry>, std::greater<QEntry>> queue;
  for (std::size_t k = 0; k < ensemble.size(); ++k) {
    if (std::isfinite(ensemble.particles()[k].next_jump)) {
      queue.emplace(ensemble.particles()[k].next_jump, k);
    }
  }

  if (stats) {
    stats->total_jumps = 0;
    stats->jumps_per_particle.assign(params.N, 0);
    stats->projection_fallbacks = 0;
  }

  double next_snapshot = params.snapshot_every > 0 ? 0.0 : std::numeric_limits<double>::infinity();
  long snapshot_index = 0;
  bool final_snapshot_done = false;
  auto emit_snapshot = [&](double t) {
    if (!sink) return;
    const int nn = ensemble.params().n;
    Mat j = Mat::Zero(nn, nn);
    for (const auto& p : ensemble.particles()) j += p.a;
    j /= static_cast<double>(ensemble.size());
    SnapshotRecord rec{t, matrix_inner(j, project_to_rotation(j).matrix()) / nn, j};
    sink->on_snapshot(rec);
  };

  std::vector<std::size_t> candidates;
  // every branch mirrors neighbor_average term by term (ascending indices,
  // identical scaling), so the neighbor mode cannot change the bit stream
  auto jump_average = [&](std::size_t k, double t) -> Mat {
    Mat j = Mat::Zero(n, n);
    switch (plan) {
      case NeighborPlan::homogeneous: {
        const double kv = std::pow(params.R, -n);
        for (const auto& p : ensemble.particles()) j += kv * p.a;
        break;
      }
      case NeighborPlan::brute:
        return ensemble.neighbor_average(k, t);
      case NeighborPlan::cells: {
        if (cells.stale(t, params.c0)) cells.build(ensemble, t);
        const Vec xk = ensemble.position_at(k, t);
        cells.gather(xk, candidates);
        for (std::size_t l : candidates) {
          const double kv = kernel_value(
              params, periodic_distance(xk, ensemble.position_at(l, t), params.L));
          if (kv != 0.0) j += kv * ensemble.particles()[l].a;
        }
        break;
      }
    }
    return j / static_cast<double>(ensemble.size());
  };

  for (;;) {
    const double t_jump = queue.empty() ? std::numeric_limits<double>::infinity() : queue.top().first;
    // snapshots interleave with jumps in time order
    while (next_snapshot <= std::min(t_jump, params.T_end) + 0.0) {
      emit_snapshot(next_snapshot);
      ++snapshot_index;
      if (next_snapshot == params.T_end) final_snapshot_done = true;
      next_snapshot = snapshot_index * params.snapshot_every;
      if (next_snapshot > params.T_end) break;
    }
    if (t_jump > params.T_end) break;

    const auto [t, k] = queue.top();
    queue.pop();
    Particle& pk = ensemble.particles()[k];

    // advect the jumping particle; all other state is read-only
    pk.x = ensemble.position_at(k, t);
    pk.t_mark = t;
    ensemble.set_sim_time(t);

    const Mat j = jump_average(k, t);
    try {
      const Rotation theta_k = project_to_rotation(j);
      frame_sampler.set_theta(theta_k);
      const Rotation a_new = frame_sampler.draw(rng);
      pk.a = a_new.matrix();
      if (sink) sink->on_jump(JumpRecord{t, k, theta_k.matrix(), pk.a});
    } catch (const NonUniqueProjectionError&) {
      if (sink) sink->on_warning(t, k, "projection_non_unique");
      if (stats) ++stats->projection_fallbacks;
    } catch (const SingularProjectionError&) {
      if (sink) sink->on_warning(t, k, "projection_singular");
      if (stats) ++stats->projection_fallbacks;
    }

    if (stats) {
      ++stats->total_jumps;
      ++stats->jumps_per_particle[k];
    }
    pk.next_jump = t + rng.exponential(params.nu);
    queue.emplace(pk.next_jump, k);
  }

  // roll everybody forward to the horizon
  for (std::size_t k = 0; k < ensemble.size(); ++k) {
    Particle& p = ensemble.particles()[k];
    p.x = ensemble.position_at(k, params.T_end);
    p.t_mark = params.T_end;
  }
  ensemble.set_sim_time(params.T_end);
  if (params.snapshot_every > 0 && !final_snapshot_done &&
      next_snapshot > params.T_end) {
    emit_snapshot(params.T_end);
  }
  return ensemble;
}

}  // namespace sohb
