#pragma once

#include <optional>

#include "swarm/params.hpp"

namespace swarm {

// Single-server reference model: closed M/M-like queue with one fixed
// upload source of rate `upload`.
struct ToyModel {
  double n_exact = 0.0;
  double w_exact = 0.0;
  double n_approx = 0.0;  // sqrt(lambda*F/U)
  double w_approx = 0.0;  // sqrt(F/(lambda*U))
};

ToyModel toy_model(double lambda, double file_size, double upload);

// Stationary point of the spatial fluid limit.
struct FluidSolution {
  double gamma = 0.0;   // interaction strength
  double beta_f = 0.0;  // peer density
  double mu_f = 0.0;    // per-peer download rate
  double w_f = 0.0;     // latency
  double n_f = 0.0;     // mean neighborhood size pi R^2 beta_f
};

FluidSolution fluid_solution(const SystemParams& p);

// Finite-density latency correction factor: the unique root M >= 1 of
// M^2 (1 - (M/2n) ln(1 + 2n/M)) = 1.
double heuristic_m(double n_f);
// Closed form for the distance-independent rate: sqrt(1+(1/2n)^2) + 1/2n.
double heuristic_m_constant_rate(double n_f);

struct LatencyPrediction {
  FluidSolution fluid;
  std::optional<double> m_hat;  // absent when no heuristic applies
  std::optional<double> w;      // m_hat * w_f
  std::optional<double> beta;   // m_hat * beta_f
};

LatencyPrediction latency_prediction(const SystemParams& p);

enum class ServerRegime { PeerDominated, ServerDominated, Ambiguous };

struct ServersLatency {
  double chi = 0.0;  // U_C/(lambda F)
  // peer-assisted fluid value, defined for chi < 1
  std::optional<double> w_peer;
  // pure client/server value F/(pi R^2 U_C), the other bracket
  double w_server = 0.0;
  ServerRegime regime = ServerRegime::PeerDominated;
  double server_threshold = 10.0;
};

ServersLatency servers_latency(const SystemParams& p,
                               double server_rate_density,
                               double server_threshold = 10.0);

struct AbandonmentSolution {
  double mu = 0.0;               // adjusted download rate
  double w = 0.0;                // latency of peers that complete
  double abandon_fraction = 0.0; // aF/(mu + aF)
};

AbandonmentSolution abandonment(const SystemParams& p, double rate);

struct SeederSolution {
  double w = 0.0;
  double seeder_density = 0.0;  // lambda * T_S
};

SeederSolution seeder_latency(const SystemParams& p, double seed_time);

struct AccessCheck {
  bool feasible = false;
  double mu_f = 0.0;  // demanded per-peer rate sqrt(lambda F gamma)
  double cap = 0.0;
  // largest admissible peering range for the tcp rate, U^2/(2 pi C lambda F)
  std::optional<double> max_range;
};

AccessCheck access_check(const SystemParams& p, double upload_cap);

// Stationary point when each peer holds `degree` connections and the
// effective range shrinks with density: solves beta^2 gamma(R(beta)) =
// lambda F with R(beta) = sqrt(degree/(pi beta)).
struct DegreeSolution {
  double beta = 0.0;
  double w = 0.0;
  double effective_range = 0.0;
  double gamma = 0.0;
};

DegreeSolution degree_limited(const SystemParams& p, int degree);

// Strength of a thinned overlay: 2 pi Integral r f(r) accept(r, beta) dr
// over (0, support), numeric.
double overlay_gamma(const RateFunction& f,
                     const std::function<double(double, double)>& accept,
                     double beta, double support);

}  // namespace swarm
