#pragma once

#include <cstdint>
#include <span>

#include "swarm/params.hpp"
#include "swarm/spatial_sim.hpp"

namespace swarm {

// Underlying transport network: routers with spatial density theta, each
// adjacent link carrying at most link_capacity.
struct NetworkParams {
  double theta = 0.0;
  double link_capacity = 0.0;
};

// Mean peer-to-peer traffic crossing a unit-length line, from lambda*F and
// the ratio of rate moments.
double analytic_flow(const SystemParams& p);

// The same quantity computed from the fluid peer density instead; the two
// must agree, and tests hold them to that.
double analytic_flow_beta_form(const SystemParams& p);

// Transport capacity crossing a unit-length line.
double capacity_per_unit_length(const NetworkParams& n);

struct NetworkFeasibility {
  double psi = 0.0;            // demand per unit length
  double psi_beta_form = 0.0;
  double xi = 0.0;             // capacity per unit length
  bool feasible = false;       // psi < xi
  double headroom = 0.0;       // xi / psi
};

NetworkFeasibility check_network(const SystemParams& p,
                                 const NetworkParams& n);

// Monte Carlo estimate of the crossing flow from simulator snapshots: drops
// random test segments on the torus and adds up the traffic of every
// peer-pair chord that crosses one. Download flows count per direction, so
// a pair of mutually downloading peers contributes twice its link rate.
struct FlowSample {
  double psi_emp = 0.0;
  double se = 0.0;            // spread across snapshots
  long crossings = 0;
  double length_sampled = 0.0;
};

FlowSample empirical_flow(std::span<const SpatialSnapshot> snapshots,
                          const RateFunction& rate, double segment_length,
                          int segments, uint64_t seed);

}  // namespace swarm
