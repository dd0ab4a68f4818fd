#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "sohb/son_core.hpp"
#include "sohb/toml_lite.hpp"

namespace sohb {

enum class SensingKernel { indicator, table };
enum class FrameInit { aligned, haar };
enum class NeighborMode { automatic, brute, cells };
enum class JumpRule { normalized, unnormalized };  // unnormalized reserved

/// Simulation parameters. TOML keys mirror the member names exactly:
/// N, n, c0, nu, kappa, R, L, T_end, seed, kernel (+ the optional extras).
struct SimParams {
  int N = 0;            // particle count
  int n = 3;            // rotation dimension (also the spatial dimension)
  double c0 = 1.0;      // self-propulsion speed
  double nu = 1.0;      // jump rate
  double kappa = 1.0;   // von Mises concentration
  double R = 1.0;       // sensing radius
  double L = 10.0;      // periodic box edge
  double T_end = 1.0;   // time horizon
  std::uint64_t seed = 0;
  SensingKernel kernel = SensingKernel::indicator;
  std::vector<double> kernel_table;  // K~ sampled uniformly on [0,1]

  FrameInit frame_init = FrameInit::aligned;
  NeighborMode neighbor = NeighborMode::automatic;
  JumpRule jump_rule = JumpRule::normalized;
  double snapshot_every = 0.0;  // 0 disables snapshots

  /// All-to-all sensing; makes the spatially homogeneous regime exact.
  bool homogeneous() const;

  /// Throws ConfigError on invalid combinations.
  void validate() const;

  static SimParams from_toml(const TomlTable& t);
  static SimParams from_toml_file(const std::string& path);
};

struct Particle {
  Vec x;             // position at the last event
  Mat a;             // body frame
  double t_mark = 0; // time of the last event
  double next_jump = 0;
};

class ParticleEnsemble {
 public:
  ParticleEnsemble(SimParams params, std::vector<Particle> particles, double sim_time)
      : params_(std::move(params)), particles_(std::move(particles)), time_(sim_time) {}

  const SimParams& params() const { return params_; }
  const std::vector<Particle>& particles() const { return particles_; }
  std::vector<Particle>& particles() { return particles_; }
  double sim_time() const { return time_; }
  void set_sim_time(double t) { time_ = t; }
  std::size_t size() const { return particles_.size(); }

  /// Position of particle k advected to time t >= its last event time,
  /// folded into [0, L)^n. Throws std::invalid_argument for t in the past.
  Vec position_at(std::size_t k, double t) const;

  /// J_k = (1/N) sum_l K(X_k - X_l) A_l at time t (self included), with
  /// K(x) = R^-n K~(|x|/R) and periodic distance.
  Mat neighbor_average(std::size_t k, double t) const;

 private:
  SimParams params_;
  std::vector<Particle> particles_;
  double time_ = 0;
};

/// J_glob = mean frame; returns (J_glob . Theta_glob)/n with Theta_glob the
/// projection of J_glob. Equals 1 for perfectly aligned frames and c1(kappa)
/// at von Mises equilibrium.
double order_parameter(const ParticleEnsemble& ensemble);

struct JumpRecord {
  double t;
  std::size_t k;
  Mat theta_k;
  Mat a_new;
};

struct SnapshotRecord {
  double t;
  double order_parameter;
  Mat j_glob;
};

/// Receives the event stream in causal order.
class EventSink {
 public:
  virtual ~EventSink() = default;
  virtual void on_jump(const JumpRecord&) {}
  virtual void on_snapshot(const SnapshotRecord&) {}
  virtual void on_warning(double /*t*/, std::size_t /*k*/, const std::string& /*what*/) {}
};

/// NDJSON writer: one object per line,
///   {"t":..,"k":..,"theta_k":[..],"a_new":[..]}   for jumps,
///   {"t":..,"order_parameter":..,"J_glob":[..]}   for snapshots,
///   {"t":..,"k":..,"warning":".."}                for projection fallbacks;
/// matrices as row-major arrays, floats with 17 significant digits.
class NdjsonEventWriter : public EventSink {
 public:
  explicit NdjsonEventWriter(std::ostream& os) : os_(os) {}
  void on_jump(const JumpRecord& r) override;
  void on_snapshot(const SnapshotRecord& r) override;
  void on_warning(double t, std::size_t k, const std::string& what) override;

 private:
  std::ostream& os_;
};

struct RunStats {
  std::size_t total_jumps = 0;
  std::vector<std::size_t> jumps_per_particle;
  std::size_t projection_fallbacks = 0;
};

/// Exact event-driven simulation: pops the earliest jump, advects that
/// particle analytically, projects the neighborhood average, resamples the
/// frame from the von Mises distribution and schedules the next jump.
/// Identical params+seed give bit-identical event streams.
ParticleEnsemble run(const SimParams& params, EventSink* sink = nullptr,
                     RunStats* stats = nullptr);

}  // namespace sohb
