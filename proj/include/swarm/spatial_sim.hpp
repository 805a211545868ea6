#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "swarm/geometry.hpp"
#include "swarm/params.hpp"
#include "swarm/stats.hpp"

namespace swarm {

enum class InitialState { Empty, FluidPoisson };

struct SimConfig {
  SystemParams params;
  NeighborPolicy policy;  // Range or Degree
  ExtensionParams ext;
  uint64_t seed = 1;
  // End of simulated time. Leave at 0 to derive it from target_departures.
  double horizon = 0.0;
  // Measurement starts here; 0 picks 5x the predicted latency.
  double warmup = 0.0;
  long target_departures = 20000;
  InitialState init = InitialState::FluidPoisson;
  int snapshot_count = 0;
  // > 0 switches to the fixed-step integrator (cross-validation mode).
  double discrete_dt = 0.0;
  // > 0: every audit_every events, recompute all rates from scratch and
  // compare with the incrementally maintained values (testing hook).
  long audit_every = 0;
};

struct SpatialSnapshot {
  double time = 0.0;
  double side = 0.0;
  double range = 0.0;
  struct Entry {
    Vec2 pos;
    bool seeder = false;
    double rate = 0.0;
  };
  std::vector<Entry> peers;
};

struct SimStats {
  double w_f = 0.0;          // fluid latency of the base model
  double n_f = 0.0;
  double w_predicted = 0.0;  // extension-adjusted prediction used for warmup
  double w_emp = 0.0;
  double w_se = 0.0;
  double w_ci_half = 0.0;
  double m_emp = 0.0;
  double m_se = 0.0;
  double m_ci_half = 0.0;
  double beta_emp = 0.0;     // time-averaged leecher density post-warmup
  double little_residual = 0.0;  // |beta_emp - lambda*w_emp| / beta_emp
  long departures = 0;       // counted post-warmup
  long abandonments = 0;
  long arrivals = 0;         // whole run, including warmup
  double measured_time = 0.0;
  double max_rate_audit_error = 0.0;
  std::vector<double> latency_samples;  // departures post-warmup, in order
  std::vector<SpatialSnapshot> snapshots;
};

SimStats run(const SimConfig& cfg);

struct MEstimate {
  double m = 0.0;
  double se = 0.0;
  double ci_half = 0.0;
};

// m = W_emp / W_f with a batch-means interval over the sojourn sequence.
MEstimate estimate_m(std::span<const double> sojourns, double w_f,
                     int batches = 20);

// KS distance of the post-warmup sojourns against an exponential law with
// the empirical mean.
double latency_distribution_check(const SimStats& stats);

}  // namespace swarm
