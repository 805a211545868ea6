#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>

#include "swarm/chunk_sim.hpp"
#include "swarm/config.hpp"
#include "swarm/network_load.hpp"
#include "swarm/params.hpp"
#include "swarm/spatial_sim.hpp"

namespace swarm {

// Everything a run needs, as parsed from one config file. Which parts are
// consulted depends on the subcommand.
struct Scenario {
  std::string name = "scenario";
  SystemParams params;
  NeighborPolicy policy = NeighborPolicy::range();
  ExtensionParams ext;
  NetworkParams network;

  int chunks = 16;
  MatchMode chunk_mode = MatchMode::OneToOne;
  double server_chi = 0.01;

  double horizon = 0.0;
  double warmup = 0.0;
  long target_departures = 20000;
  InitialState init = InitialState::FluidPoisson;
  int snapshots = 0;
  double discrete_dt = 0.0;

  int replications = 1;
  uint64_t seed_base = 1;
};

// Consumes the scenario keys; the caller decides when to call cfg.finish().
Scenario scenario_from_config(ConfigMap& cfg);

// Subcommand workers. Replicated runs are replications with seeds
// seed_base .. seed_base+replications-1, executed on up to `jobs` threads,
// with output written in replication order so reruns are byte-identical.
void run_fluid_report(const Scenario& sc, std::ostream& out);
void run_heuristic_report(std::span<const double> n_values, std::ostream& out);
void run_chunk_eta_report(int chunks, std::optional<double> n_f,
                          std::ostream& out);
void run_simulate(const Scenario& sc, int jobs, std::ostream& out);
void run_simulate_chunks(const Scenario& sc, int jobs, std::ostream& out);
void run_netload(const Scenario& sc, int jobs, std::ostream& out);
void run_feasibility_report(const Scenario& sc, std::ostream& out);

// Canned parameter sweeps: "fig2", "eta-sweep", "superscaling".
void run_preset(const std::string& name, int jobs, std::ostream& out);

}  // namespace swarm
