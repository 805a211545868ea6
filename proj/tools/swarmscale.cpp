#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "swarm/config.hpp"
#include "swarm/scenario.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_path;
  std::optional<uint64_t> seed;
  std::optional<int> replications;
  int jobs = 1;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool needs_config) {
  auto* c = cmd->add_option("--config", o.config_path,
                            "scenario file (key = value lines)");
  if (needs_config) c->required();
  cmd->add_option("--out", o.out_path, "write output here instead of stdout");
  cmd->add_option("--seed", o.seed, "override run.seed_base");
  cmd->add_option("--replications", o.replications,
                  "override run.replications");
  cmd->add_option("--jobs", o.jobs, "worker threads for replications")
      ->check(CLI::PositiveNumber);
}

swarm::Scenario load_scenario(const CommonOpts& o) {
  swarm::ConfigMap cfg = swarm::ConfigMap::parse_file(o.config_path);
  swarm::Scenario sc = swarm::scenario_from_config(cfg);
  cfg.finish();
  if (o.seed) sc.seed_base = *o.seed;
  if (o.replications) {
    if (*o.replications < 1) {
      throw swarm::ConfigError("--replications must be >= 1");
    }
    sc.replications = *o.replications;
  }
  return sc;
}

int with_output(const CommonOpts& o,
                const std::function<void(std::ostream&)>& body) {
  if (o.out_path.empty()) {
    body(std::cout);
    return 0;
  }
  std::ofstream out(o.out_path);
  if (!out) {
    std::cerr << "error: cannot open output file: " << o.out_path << "\n";
    return 1;
  }
  body(out);
  out.close();
  if (!out) {
    std::cerr << "error: failed writing " << o.out_path << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fluid predictions and simulators for spatial peer-to-peer swarms"};
  app.require_subcommand(1);

  CommonOpts fluid_o;
  auto* fluid_cmd =
      app.add_subcommand("fluid", "closed-form predictions for a scenario");
  add_common(fluid_cmd, fluid_o, true);

  CommonOpts heur_o;
  std::vector<double> heur_n;
  auto* heur_cmd = app.add_subcommand(
      "heuristic", "finite-density latency correction factor table");
  heur_cmd->add_option("--nf", heur_n,
                       "neighborhood sizes to evaluate (repeatable)");
  add_common(heur_cmd, heur_o, false);

  CommonOpts eta_o;
  int eta_k = 0;
  double eta_nf = 0.0;
  auto* eta_cmd = app.add_subcommand(
      "chunk-eta", "per-class collaboration efficiency profiles");
  eta_cmd->add_option("--k", eta_k, "number of pieces")->required();
  eta_cmd->add_option("--nf", eta_nf,
                      "neighborhood size for the one-to-one bound column");
  add_common(eta_cmd, eta_o, false);

  CommonOpts sim_o;
  auto* sim_cmd =
      app.add_subcommand("simulate", "event-driven peer swarm simulation");
  add_common(sim_cmd, sim_o, true);

  CommonOpts chunk_o;
  auto* chunk_cmd = app.add_subcommand("simulate-chunks",
                                       "piece-level swarm simulation");
  add_common(chunk_cmd, chunk_o, true);

  CommonOpts net_o;
  auto* net_cmd = app.add_subcommand(
      "netload", "transport network load, analytic and from snapshots");
  add_common(net_cmd, net_o, true);

  CommonOpts fea_o;
  auto* fea_cmd = app.add_subcommand("feasibility",
                                     "deployment sanity checklist");
  add_common(fea_cmd, fea_o, true);

  CommonOpts sweep_o;
  std::string preset;
  auto* sweep_cmd = app.add_subcommand("sweep", "canned parameter sweeps");
  sweep_cmd->add_option("--preset", preset, "fig2 | eta-sweep | superscaling")
      ->required();
  add_common(sweep_cmd, sweep_o, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (fluid_cmd->parsed()) {
      swarm::Scenario sc = load_scenario(fluid_o);
      return with_output(fluid_o,
                         [&](std::ostream& o) { swarm::run_fluid_report(sc, o); });
    }
    if (heur_cmd->parsed()) {
      if (heur_n.empty()) {
        heur_n = {0.001, 0.01, 0.1, 0.5, 1, 2, 5, 10, 40, 100, 1000, 10000};
      }
      return with_output(heur_o, [&](std::ostream& o) {
        swarm::run_heuristic_report(heur_n, o);
      });
    }
    if (eta_cmd->parsed()) {
      std::optional<double> nf;
      if (eta_nf > 0.0) nf = eta_nf;
      return with_output(eta_o, [&](std::ostream& o) {
        swarm::run_chunk_eta_report(eta_k, nf, o);
      });
    }
    if (sim_cmd->parsed()) {
      swarm::Scenario sc = load_scenario(sim_o);
      return with_output(sim_o, [&](std::ostream& o) {
        swarm::run_simulate(sc, sim_o.jobs, o);
      });
    }
    if (chunk_cmd->parsed()) {
      swarm::Scenario sc = load_scenario(chunk_o);
      return with_output(chunk_o, [&](std::ostream& o) {
        swarm::run_simulate_chunks(sc, chunk_o.jobs, o);
      });
    }
    if (net_cmd->parsed()) {
      swarm::Scenario sc = load_scenario(net_o);
      return with_output(net_o, [&](std::ostream& o) {
        swarm::run_netload(sc, net_o.jobs, o);
      });
    }
    if (fea_cmd->parsed()) {
      swarm::Scenario sc = load_scenario(fea_o);
      return with_output(fea_o, [&](std::ostream& o) {
        swarm::run_feasibility_report(sc, o);
      });
    }
    if (sweep_cmd->parsed()) {
      return with_output(sweep_o, [&](std::ostream& o) {
        swarm::run_preset(preset, sweep_o.jobs, o);
      });
    }
  } catch (const swarm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
