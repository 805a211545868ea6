#include "swarm/fluid.hpp"

#include <cmath>
#include <stdexcept>

#include "swarm/quadrature.hpp"

namespace swarm {

namespace {
constexpr double kPi = 3.14159265358979323846;

// h(x) = 1 - ln(1+x)/x, the fraction of a neighbor's time a finite swarm
// wastes relative to the fluid rate. Series below 1e-4 to avoid the
// cancellation in the direct form.
double waste_fraction(double x) {
  if (x < 1e-4) {
    return x * (0.5 + x * (-1.0 / 3.0 + x * (0.25 - x / 5.0)));
  }
  return 1.0 - std::log1p(x) / x;
}

double m_residual(double m, double n_f) {
  return m * m * waste_fraction(2.0 * n_f / m) - 1.0;
}

}  // namespace

ToyModel toy_model(double lambda, double file_size, double upload) {
  if (!(lambda > 0.0) || !(file_size > 0.0) || !(upload > 0.0)) {
    throw std::invalid_argument("toy_model: all inputs must be positive");
  }
  ToyModel t;
  double x = lambda * file_size / upload;
  t.n_exact = std::sqrt(x + 0.25) + 0.5;
  t.w_exact = t.n_exact / lambda;
  t.n_approx = std::sqrt(x);
  t.w_approx = t.n_approx / lambda;
  return t;
}

FluidSolution fluid_solution(const SystemParams& p) {
  if (!p.range) {
    throw std::invalid_argument("fluid_solution needs a peering range");
  }
  if (!(p.lambda > 0.0)) {
    throw std::invalid_argument("fluid_solution needs lambda > 0");
  }
  FluidSolution s;
  s.gamma = strength(p.rate, *p.range);
  double lf = p.lambda * p.file_size;
  s.beta_f = std::sqrt(lf / s.gamma);
  s.mu_f = std::sqrt(lf * s.gamma);
  s.w_f = std::sqrt(p.file_size / (p.lambda * s.gamma));
  double reff = *p.range;
  if (std::isinf(reff)) reff = typical_range(p.rate, *p.range);
  s.n_f = kPi * reff * reff * s.beta_f;
  return s;
}

double heuristic_m(double n_f) {
  if (!(n_f > 0.0)) throw std::invalid_argument("heuristic_m: n_f <= 0");
  double lo = 1.0;
  double f_lo = m_residual(lo, n_f);
  if (f_lo >= 0.0) return lo;  // only at n_f -> inf in the limit
  double hi = 1.0 + 20.0 / n_f;
  while (m_residual(hi, n_f) < 0.0) {
    hi *= 2.0;
    if (hi > 1e300) throw std::runtime_error("heuristic_m: no bracket");
  }
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (m_residual(mid, n_f) < 0.0)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-12 * hi) break;
  }
  return 0.5 * (lo + hi);
}

double heuristic_m_constant_rate(double n_f) {
  if (!(n_f > 0.0)) throw std::invalid_argument("heuristic_m: n_f <= 0");
  double inv = 0.5 / n_f;
  return std::sqrt(1.0 + inv * inv) + inv;
}

LatencyPrediction latency_prediction(const SystemParams& p) {
  LatencyPrediction out;
  out.fluid = fluid_solution(p);
  if (std::holds_alternative<TcpLike>(p.rate.variant())) {
    out.m_hat = heuristic_m(out.fluid.n_f);
  } else if (std::holds_alternative<ConstantRate>(p.rate.variant())) {
    out.m_hat = heuristic_m_constant_rate(out.fluid.n_f);
  }
  if (out.m_hat) {
    out.w = *out.m_hat * out.fluid.w_f;
    out.beta = *out.m_hat * out.fluid.beta_f;
  }
  return out;
}

ServersLatency servers_latency(const SystemParams& p,
                               double server_rate_density,
                               double server_threshold) {
  if (!(server_rate_density > 0.0)) {
    throw std::invalid_argument("servers_latency: U_C must be positive");
  }
  if (!p.range || std::isinf(*p.range)) {
    throw std::invalid_argument("servers_latency needs a finite range");
  }
  ServersLatency out;
  out.server_threshold = server_threshold;
  out.chi = server_rate_density / (p.lambda * p.file_size);
  out.w_server =
      p.file_size / (kPi * *p.range * *p.range * server_rate_density);
  if (out.chi < 1.0) {
    FluidSolution f = fluid_solution(p);
    out.w_peer = f.w_f * std::sqrt(1.0 - out.chi);
    out.regime = ServerRegime::PeerDominated;
  } else if (out.chi >= server_threshold) {
    out.regime = ServerRegime::ServerDominated;
  } else {
    // servers alone already absorb the arrival load but are not yet
    // dominant; report both bracketing values
    out.regime = ServerRegime::Ambiguous;
  }
  return out;
}

AbandonmentSolution abandonment(const SystemParams& p, double rate) {
  if (!(rate > 0.0)) {
    throw std::invalid_argument("abandonment: rate must be positive");
  }
  if (!p.range) throw std::invalid_argument("abandonment needs a range");
  AbandonmentSolution out;
  double gamma = strength(p.rate, *p.range);
  double af = rate * p.file_size;
  out.mu = std::sqrt(p.lambda * p.file_size * gamma + 0.25 * af * af) -
           0.5 * af;
  out.w = p.file_size / out.mu;
  out.abandon_fraction = af / (out.mu + af);
  return out;
}

SeederSolution seeder_latency(const SystemParams& p, double seed_time) {
  if (!(seed_time > 0.0)) {
    throw std::invalid_argument("seeder_latency: seed time must be positive");
  }
  SeederSolution out;
  FluidSolution f = fluid_solution(p);
  double half = 0.5 * seed_time;
  out.w = std::sqrt(f.w_f * f.w_f + half * half) - half;
  out.seeder_density = p.lambda * seed_time;
  return out;
}

AccessCheck access_check(const SystemParams& p, double upload_cap) {
  if (!(upload_cap > 0.0)) {
    throw std::invalid_argument("access_check: cap must be positive");
  }
  if (!p.range) throw std::invalid_argument("access_check needs a range");
  AccessCheck out;
  out.cap = upload_cap;
  double gamma = strength(p.rate, *p.range);
  out.mu_f = std::sqrt(p.lambda * p.file_size * gamma);
  out.feasible = out.mu_f <= upload_cap;
  if (const auto* tcp = std::get_if<TcpLike>(&p.rate.variant())) {
    out.max_range = upload_cap * upload_cap /
                    (2.0 * kPi * tcp->c * p.lambda * p.file_size);
  }
  return out;
}

DegreeSolution degree_limited(const SystemParams& p, int degree) {
  if (degree < 1) throw std::invalid_argument("degree must be >= 1");
  if (!(p.lambda > 0.0)) {
    throw std::invalid_argument("degree_limited needs lambda > 0");
  }
  const double target = p.lambda * p.file_size;
  const double l = static_cast<double>(degree);
  auto load = [&](double beta) {
    double r = std::sqrt(l / (kPi * beta));
    return beta * beta * strength(p.rate, r);
  };
  // load(beta) is strictly increasing: shrinking the range never removes
  // more strength than the beta^2 factor adds. Bracket by doubling.
  double lo = 1.0, hi = 1.0;
  if (load(1.0) < target) {
    while (load(hi) < target) {
      hi *= 2.0;
      if (hi > 1e300) throw std::runtime_error("degree_limited: no bracket");
    }
    lo = hi / 2.0;
  } else {
    while (load(lo) > target) {
      lo /= 2.0;
      if (lo < 1e-300) throw std::runtime_error("degree_limited: no bracket");
    }
    hi = lo * 2.0;
  }
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (load(mid) < target)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-10 * hi) break;
  }
  DegreeSolution out;
  out.beta = 0.5 * (lo + hi);
  out.w = out.beta / p.lambda;
  out.effective_range = std::sqrt(l / (kPi * out.beta));
  out.gamma = strength(p.rate, out.effective_range);
  return out;
}

double overlay_gamma(const RateFunction& f,
                     const std::function<double(double, double)>& accept,
                     double beta, double support) {
  if (!accept) throw std::invalid_argument("overlay_gamma: no function");
  if (!(support > 0.0) || std::isinf(support)) {
    throw std::invalid_argument("overlay_gamma: support must be finite");
  }
  auto integrand = [&](double r) { return r * f(r) * accept(r, beta); };
  // acceptance profiles are allowed to be discontinuous (indicators), so
  // ask for a little less than the smooth-case tolerance
  return 2.0 * kPi * integrate(integrand, 0.0, support, 1e-10, 1e-13);
}

}  // namespace swarm
