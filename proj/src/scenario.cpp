#include "swarm/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <ostream>
#include <thread>
#include <vector>

#include "swarm/chunk_analytics.hpp"
#include "swarm/fluid.hpp"

namespace swarm {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// Runs fn(0..n-1) across up to `jobs` threads with a static round-robin
// split; results land by index so output order never depends on timing.
template <class T>
std::vector<T> replicate(int n, int jobs,
                         const std::function<T(int)>& fn) {
  std::vector<T> out(static_cast<size_t>(n));
  if (jobs <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  int workers = std::min(jobs, n);
  std::vector<std::exception_ptr> errors(static_cast<size_t>(workers));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = w; i < n; i += workers) out[i] = fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

SimConfig to_sim_config(const Scenario& sc, uint64_t seed) {
  SimConfig c;
  c.params = sc.params;
  c.policy = sc.policy;
  c.ext = sc.ext;
  c.seed = seed;
  c.horizon = sc.horizon;
  c.warmup = sc.warmup;
  c.target_departures = sc.target_departures;
  c.init = sc.init;
  c.snapshot_count = sc.snapshots;
  c.discrete_dt = sc.discrete_dt;
  return c;
}

ChunkSimConfig to_chunk_config(const Scenario& sc, uint64_t seed) {
  ChunkSimConfig c;
  c.params = sc.params;
  c.chunks = sc.chunks;
  c.mode = sc.chunk_mode;
  c.server_chi = sc.server_chi;
  c.seed = seed;
  c.horizon = sc.horizon;
  c.warmup = sc.warmup;
  c.target_departures = sc.target_departures;
  c.init = sc.init;
  return c;
}

// Same tcp-style reference system the sweeps use: R = C = F = 1, with the
// arrival rate chosen to hit a wanted neighborhood size n = pi R^2 beta_f.
SystemParams reference_params(double n_f, SizeDist dist) {
  double lambda = 2.0 * n_f * n_f / kPi;
  return SystemParams::make(lambda, 1.0, RateFunction{TcpLike{1.0}}, 1.0,
                            std::nullopt, dist);
}

}  // namespace

Scenario scenario_from_config(ConfigMap& cfg) {
  Scenario sc;
  sc.name = cfg.get_string("name", "scenario");

  double lambda = cfg.get_double("params.lambda");
  double file_size = cfg.get_double("params.file_size");
  std::string dist_s = cfg.get_string("params.file_size_dist", "exponential");
  SizeDist dist;
  if (dist_s == "constant") {
    dist = SizeDist::Constant;
  } else if (dist_s == "exponential") {
    dist = SizeDist::Exponential;
  } else {
    cfg.fail("params.file_size_dist", "expected 'constant' or 'exponential'");
  }

  std::string kind = cfg.get_string("params.rate", "tcp");
  RateFunction rate;
  if (kind == "tcp") {
    rate = RateFunction{TcpLike{cfg.get_double("params.rate.c", 1.0)}};
  } else if (kind == "constant") {
    rate = RateFunction{ConstantRate{cfg.get_double("params.rate.u", 1.0)}};
  } else if (kind == "tcp-capped") {
    rate = RateFunction{TcpCapped{cfg.get_double("params.rate.c", 1.0),
                                  cfg.get_double("params.rate.u", 1.0)}};
  } else if (kind == "tcp-offset") {
    rate = RateFunction{TcpOffset{cfg.get_double("params.rate.c", 1.0),
                                  cfg.get_double("params.rate.q")}};
  } else if (kind == "tcp-overhead") {
    rate = RateFunction{TcpOverhead{cfg.get_double("params.rate.c", 1.0),
                                    cfg.get_double("params.rate.o")}};
  } else if (kind == "wireless") {
    rate = RateFunction{WirelessSnr{cfg.get_double("params.rate.c", 1.0),
                                    cfg.get_double("params.rate.alpha", 4.0),
                                    cfg.get_double("params.rate.scale", 1.0)}};
  } else {
    cfg.fail("params.rate", "unknown rate kind '" + kind + "'");
  }

  std::optional<double> range = cfg.maybe_double("params.range");
  std::optional<double> torus = cfg.maybe_double("params.torus_side");
  try {
    sc.params =
        SystemParams::make(lambda, file_size, rate, range, torus, dist);
    if (auto md = cfg.maybe_double("params.min_distance")) {
      sc.params.rate.set_min_distance(*md);
    }
  } catch (const std::exception& e) {
    throw ConfigError(cfg.origin() + ": " + e.what());
  }

  std::string pol = cfg.get_string("policy", "range");
  if (pol == "range") {
    sc.policy = NeighborPolicy::range();
  } else if (pol == "degree") {
    sc.policy =
        NeighborPolicy::k_nearest(static_cast<int>(cfg.get_long("policy.degree")));
  } else {
    cfg.fail("policy", "expected 'range' or 'degree'");
  }

  sc.ext.server_rate_density = cfg.get_double("ext.server_rate_density", 0.0);
  sc.ext.abandonment_rate = cfg.get_double("ext.abandonment_rate", 0.0);
  sc.ext.seed_time = cfg.get_double("ext.seed_time", 0.0);
  sc.ext.access_upload_cap = cfg.get_double("ext.upload_cap", 0.0);

  sc.network.theta = cfg.get_double("network.theta", 0.0);
  sc.network.link_capacity = cfg.get_double("network.link_capacity", 0.0);

  sc.chunks = static_cast<int>(cfg.get_long("chunks.k", 16));
  std::string mode = cfg.get_string("chunks.mode", "one-to-one");
  if (mode == "one-to-one") {
    sc.chunk_mode = MatchMode::OneToOne;
  } else if (mode == "many-to-one") {
    sc.chunk_mode = MatchMode::ManyToOne;
  } else {
    cfg.fail("chunks.mode", "expected 'one-to-one' or 'many-to-one'");
  }
  sc.server_chi = cfg.get_double("chunks.server_chi", 0.01);

  sc.horizon = cfg.get_double("sim.horizon", 0.0);
  sc.warmup = cfg.get_double("sim.warmup", 0.0);
  sc.target_departures = cfg.get_long("sim.target_departures", 20000);
  std::string init = cfg.get_string("sim.initial_state", "fluid");
  if (init == "empty") {
    sc.init = InitialState::Empty;
  } else if (init == "fluid") {
    sc.init = InitialState::FluidPoisson;
  } else {
    cfg.fail("sim.initial_state", "expected 'empty' or 'fluid'");
  }
  sc.snapshots = static_cast<int>(cfg.get_long("sim.snapshots", 0));
  sc.discrete_dt = cfg.get_double("sim.discrete_dt", 0.0);

  sc.replications = static_cast<int>(cfg.get_long("run.replications", 1));
  if (sc.replications < 1) cfg.fail("run.replications", "must be >= 1");
  sc.seed_base = static_cast<uint64_t>(cfg.get_long("run.seed_base", 1));
  return sc;
}

void run_fluid_report(const Scenario& sc, std::ostream& out) {
  out << "name = " << sc.name << "\n";
  if (sc.policy.kind == NeighborPolicy::Kind::Degree) {
    DegreeSolution d = degree_limited(sc.params, sc.policy.degree);
    out << "policy = degree(" << sc.policy.degree << ")\n";
    out << "beta = " << fmt(d.beta) << "\n";
    out << "w = " << fmt(d.w) << "\n";
    out << "effective_range = " << fmt(d.effective_range) << "\n";
    out << "gamma = " << fmt(d.gamma) << "\n";
    return;
  }
  LatencyPrediction pred = latency_prediction(sc.params);
  const FluidSolution& f = pred.fluid;
  out << "gamma = " << fmt(f.gamma) << "\n";
  out << "beta_f = " << fmt(f.beta_f) << "\n";
  out << "mu_f = " << fmt(f.mu_f) << "\n";
  out << "w_f = " << fmt(f.w_f) << "\n";
  out << "n_f = " << fmt(f.n_f) << "\n";
  DimensionlessState dim = dimensionless(sc.params);
  if (dim.rho) out << "rho = " << fmt(*dim.rho) << "\n";
  if (pred.m_hat) {
    out << "m_hat = " << fmt(*pred.m_hat) << "\n";
    out << "w_predicted = " << fmt(*pred.w) << "\n";
    out << "beta_predicted = " << fmt(*pred.beta) << "\n";
  }
  if (sc.ext.server_rate_density > 0.0) {
    ServersLatency s = servers_latency(sc.params, sc.ext.server_rate_density);
    out << "servers.chi = " << fmt(s.chi) << "\n";
    if (s.w_peer) out << "servers.w_peer = " << fmt(*s.w_peer) << "\n";
    out << "servers.w_server = " << fmt(s.w_server) << "\n";
    const char* regime = s.regime == ServerRegime::PeerDominated
                             ? "peer-dominated"
                             : (s.regime == ServerRegime::ServerDominated
                                    ? "server-dominated"
                                    : "ambiguous");
    out << "servers.regime = " << regime << "\n";
  }
  if (sc.ext.abandonment_rate > 0.0) {
    AbandonmentSolution a = abandonment(sc.params, sc.ext.abandonment_rate);
    out << "abandonment.mu = " << fmt(a.mu) << "\n";
    out << "abandonment.w = " << fmt(a.w) << "\n";
    out << "abandonment.fraction = " << fmt(a.abandon_fraction) << "\n";
  }
  if (sc.ext.seed_time > 0.0) {
    SeederSolution s = seeder_latency(sc.params, sc.ext.seed_time);
    out << "seeders.w = " << fmt(s.w) << "\n";
    out << "seeders.density = " << fmt(s.seeder_density) << "\n";
  }
  if (sc.ext.access_upload_cap > 0.0) {
    AccessCheck a = access_check(sc.params, sc.ext.access_upload_cap);
    out << "access.feasible = " << (a.feasible ? 1 : 0) << "\n";
    out << "access.mu_f = " << fmt(a.mu_f) << "\n";
    if (a.max_range) out << "access.max_range = " << fmt(*a.max_range) << "\n";
  }
}

void run_heuristic_report(std::span<const double> n_values,
                          std::ostream& out) {
  out << "n_f,m_hat,m_hat_constant_rate\n";
  for (double n : n_values) {
    out << fmt(n) << "," << fmt(heuristic_m(n)) << ","
        << fmt(heuristic_m_constant_rate(n)) << "\n";
  }
}

void run_chunk_eta_report(int chunks, std::optional<double> n_f,
                          std::ostream& out) {
  EfficiencyProfile many = eta_many_to_one(chunks);
  std::optional<EfficiencyProfile> bound;
  if (n_f) bound = eta_one_to_one_bound(chunks, *n_f);
  out << "class,eta_many" << (bound ? ",eta_one_bound" : "") << "\n";
  for (int k = 0; k < chunks; ++k) {
    out << k << "," << fmt(many.eta[static_cast<size_t>(k)]);
    if (bound) out << "," << fmt(bound->eta[static_cast<size_t>(k)]);
    out << "\n";
  }
  out << "# harmonic_many = " << fmt(many.harmonic_mean) << "\n";
  if (bound) {
    out << "# harmonic_one_bound = " << fmt(bound->harmonic_mean) << "\n";
  }
}

void run_simulate(const Scenario& sc, int jobs, std::ostream& out) {
  std::function<SimStats(int)> one = [&sc](int i) {
    return run(to_sim_config(sc, sc.seed_base + static_cast<uint64_t>(i)));
  };
  std::vector<SimStats> rows = replicate<SimStats>(sc.replications, jobs, one);
  out << "seed,n_f,lambda,w_f,w_emp,w_ci_half,beta_emp,m_emp,m_ci_half,"
         "departures,ks,abandonments,little_residual\n";
  for (int i = 0; i < sc.replications; ++i) {
    const SimStats& s = rows[static_cast<size_t>(i)];
    double ks = s.latency_samples.empty() ? 0.0
                                          : latency_distribution_check(s);
    out << (sc.seed_base + static_cast<uint64_t>(i)) << "," << fmt(s.n_f)
        << "," << fmt(sc.params.lambda) << "," << fmt(s.w_f) << ","
        << fmt(s.w_emp) << "," << fmt(s.w_ci_half) << "," << fmt(s.beta_emp)
        << "," << fmt(s.m_emp) << "," << fmt(s.m_ci_half) << ","
        << s.departures << "," << fmt(ks) << "," << s.abandonments << ","
        << fmt(s.little_residual) << "\n";
  }
}

void run_simulate_chunks(const Scenario& sc, int jobs, std::ostream& out) {
  std::function<ChunkSimStats(int)> one = [&sc](int i) {
    return run_chunks(
        to_chunk_config(sc, sc.seed_base + static_cast<uint64_t>(i)));
  };
  std::vector<ChunkSimStats> rows =
      replicate<ChunkSimStats>(sc.replications, jobs, one);
  out << "seed,n_f,k,mode,eta_emp,possessed_mean,missing_mean,w_emp,"
         "chi_servers,eta_se,w_ci_half,departures,server_bytes_fraction\n";
  const char* mode =
      sc.chunk_mode == MatchMode::OneToOne ? "one-to-one" : "many-to-one";
  for (int i = 0; i < sc.replications; ++i) {
    const ChunkSimStats& s = rows[static_cast<size_t>(i)];
    out << (sc.seed_base + static_cast<uint64_t>(i)) << "," << fmt(s.n_f)
        << "," << sc.chunks << "," << mode << "," << fmt(s.eta_emp) << ","
        << fmt(s.possessed_mean_copies) << "," << fmt(s.missing_mean_copies)
        << "," << fmt(s.w_emp) << "," << fmt(s.chi) << "," << fmt(s.eta_se)
        << "," << fmt(s.w_ci_half) << "," << s.departures << ","
        << fmt(s.server_bytes_fraction) << "\n";
  }
}

void run_netload(const Scenario& sc, int jobs, std::ostream& out) {
  const int snapshots = sc.snapshots > 0 ? sc.snapshots : 50;
  const int segments = 20;
  struct Row {
    NetworkFeasibility fea;
    FlowSample emp;
  };
  std::function<Row(int)> one = [&sc, snapshots, segments](int i) {
    uint64_t seed = sc.seed_base + static_cast<uint64_t>(i);
    SimConfig c = to_sim_config(sc, seed);
    c.snapshot_count = snapshots;
    SimStats s = run(c);
    Row r;
    r.fea = check_network(sc.params, sc.network);
    double seg_len = sc.params.range ? *sc.params.range : 1.0;
    r.emp = empirical_flow(s.snapshots, sc.params.rate, seg_len, segments,
                           seed);
    return r;
  };
  std::vector<Row> rows = replicate<Row>(sc.replications, jobs, one);
  out << "seed,lambda,psi_analytic,psi_beta_form,psi_emp,psi_emp_se,"
         "crossings,xi,feasible,headroom\n";
  for (int i = 0; i < sc.replications; ++i) {
    const Row& r = rows[static_cast<size_t>(i)];
    out << (sc.seed_base + static_cast<uint64_t>(i)) << ","
        << fmt(sc.params.lambda) << "," << fmt(r.fea.psi) << ","
        << fmt(r.fea.psi_beta_form) << "," << fmt(r.emp.psi_emp) << ","
        << fmt(r.emp.se) << "," << r.emp.crossings << "," << fmt(r.fea.xi)
        << "," << (r.fea.feasible ? 1 : 0) << "," << fmt(r.fea.headroom)
        << "\n";
  }
}

void run_feasibility_report(const Scenario& sc, std::ostream& out) {
  bool all_ok = true;
  auto line = [&](const std::string& label, bool ok,
                  const std::string& detail) {
    out << (ok ? "[ok]   " : "[FAIL] ") << label << ": " << detail << "\n";
    all_ok = all_ok && ok;
  };

  FluidSolution f = fluid_solution(sc.params);
  line("neighborhood", f.n_f >= 10.0,
       "n_f = " + fmt(f.n_f) + " (want >= 10 for the fluid regime)");

  EfficiencyProfile many = eta_many_to_one(sc.chunks);
  line("chunking", sc.chunks >= 50,
       "k = " + std::to_string(sc.chunks) +
           " pieces, collaboration efficiency " + fmt(many.harmonic_mean) +
           " (want k >= 50)");

  if (sc.network.theta > 0.0 && sc.network.link_capacity > 0.0) {
    NetworkFeasibility nf = check_network(sc.params, sc.network);
    line("transport", nf.feasible,
         "psi = " + fmt(nf.psi) + " vs xi = " + fmt(nf.xi) + " (headroom " +
             fmt(nf.headroom) + "x)");
  } else {
    out << "[skip] transport: no network parameters\n";
  }

  if (sc.ext.access_upload_cap > 0.0) {
    AccessCheck a = access_check(sc.params, sc.ext.access_upload_cap);
    std::string detail = "mu_f = " + fmt(a.mu_f) + " vs cap " + fmt(a.cap);
    if (a.max_range) detail += " (max range " + fmt(*a.max_range) + ")";
    line("access", a.feasible, detail);
  } else {
    out << "[skip] access: no upload cap\n";
  }

  out << "verdict: " << (all_ok ? "scalable" : "constrained") << "\n";
}

namespace {

void preset_fig2(int jobs, std::ostream& out) {
  const double grid[] = {0.1, 0.4, 1.6, 6.4, 25.6, 40.0};
  const int n = static_cast<int>(std::size(grid));
  std::function<SimStats(int)> one = [&grid](int i) {
    Scenario sc;
    sc.params = reference_params(grid[i], SizeDist::Exponential);
    sc.target_departures = 20000;
    return run(to_sim_config(sc, 1 + static_cast<uint64_t>(i)));
  };
  std::vector<SimStats> rows = replicate<SimStats>(n, jobs, one);
  out << "n_f,lambda,m_emp,m_ci_half,m_hat,inv_n_f\n";
  for (int i = 0; i < n; ++i) {
    const SimStats& s = rows[static_cast<size_t>(i)];
    out << fmt(grid[i]) << "," << fmt(2.0 * grid[i] * grid[i] / kPi) << ","
        << fmt(s.m_emp) << "," << fmt(s.m_ci_half) << ","
        << fmt(heuristic_m(grid[i])) << "," << fmt(1.0 / grid[i]) << "\n";
  }
}

void preset_eta_sweep(int jobs, std::ostream& out) {
  const int ks[] = {10, 50, 200};
  const double n_f = 40.0;
  const int n = static_cast<int>(std::size(ks));
  std::function<ChunkSimStats(int)> one = [&ks, n_f](int i) {
    Scenario sc;
    sc.params = reference_params(n_f, SizeDist::Constant);
    sc.chunks = ks[i];
    sc.chunk_mode = MatchMode::OneToOne;
    sc.target_departures = 10000;
    return run_chunks(to_chunk_config(sc, 1 + static_cast<uint64_t>(i)));
  };
  std::vector<ChunkSimStats> rows = replicate<ChunkSimStats>(n, jobs, one);
  out << "k,eta_emp,eta_se,eta_one_bound,eta_many\n";
  for (int i = 0; i < n; ++i) {
    out << ks[i] << "," << fmt(rows[static_cast<size_t>(i)].eta_emp) << ","
        << fmt(rows[static_cast<size_t>(i)].eta_se) << ","
        << fmt(eta_one_to_one_bound(ks[i], n_f).harmonic_mean) << ","
        << fmt(eta_many_to_one(ks[i]).harmonic_mean) << "\n";
  }
}

void preset_superscaling(int jobs, std::ostream& out) {
  const double n_fs[] = {20.0, 40.0};  // quadrupling lambda doubles n_f^2
  const int n = static_cast<int>(std::size(n_fs));
  std::function<SimStats(int)> one = [&n_fs](int i) {
    Scenario sc;
    sc.params = reference_params(n_fs[i], SizeDist::Exponential);
    sc.target_departures = 20000;
    return run(to_sim_config(sc, 1 + static_cast<uint64_t>(i)));
  };
  std::vector<SimStats> rows = replicate<SimStats>(n, jobs, one);
  out << "lambda,n_f,w_f,w_emp,w_ci_half,w_over_first\n";
  for (int i = 0; i < n; ++i) {
    const SimStats& s = rows[static_cast<size_t>(i)];
    double ratio = rows[0].w_emp > 0.0 ? s.w_emp / rows[0].w_emp : 0.0;
    out << fmt(2.0 * n_fs[i] * n_fs[i] / kPi) << "," << fmt(n_fs[i]) << ","
        << fmt(s.w_f) << "," << fmt(s.w_emp) << "," << fmt(s.w_ci_half)
        << "," << fmt(ratio) << "\n";
  }
}

}  // namespace

void run_preset(const std::string& name, int jobs, std::ostream& out) {
  if (name == "fig2") {
    preset_fig2(jobs, out);
  } else if (name == "eta-sweep") {
    preset_eta_sweep(jobs, out);
  } else if (name == "superscaling") {
    preset_superscaling(jobs, out);
  } else {
    throw ConfigError("unknown preset '" + name +
                      "' (expected fig2, eta-sweep, or superscaling)");
  }
}

}  // namespace swarm
