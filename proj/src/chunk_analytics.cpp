#include "swarm/chunk_analytics.hpp"

#include <cmath>
#include <stdexcept>

namespace swarm {

double useful_probability(int k, int j, int total) {
  if (total < 1) throw std::invalid_argument("useful_probability: total < 1");
  if (k < 0 || k >= total || j < 0 || j >= total) {
    throw std::invalid_argument("useful_probability: class out of range");
  }
  if (j > k) return 1.0;
  // running product of (k-i)/(total-i), i = 0..j-1; stays in [0,1]
  double p = 1.0;
  for (int i = 0; i < j; ++i) {
    p *= static_cast<double>(k - i) / static_cast<double>(total - i);
  }
  return 1.0 - p;
}

EfficiencyProfile eta_many_to_one(int total, double tol, int max_iter) {
  if (total < 2) {
    throw std::invalid_argument(
        "eta_many_to_one: a single chunk is the whole file; need total >= 2");
  }
  const int k = total;
  // z as a dense matrix; row a is the receiver class, column j the helper
  // class. Column 0 is identically 0: an empty peer helps nobody.
  std::vector<double> z(static_cast<size_t>(k) * k);
  for (int a = 0; a < k; ++a) {
    double p = 1.0;
    z[static_cast<size_t>(a) * k + 0] = 0.0;
    for (int j = 1; j < k; ++j) {
      p *= j - 1 <= a ? static_cast<double>(a - (j - 1)) /
                            static_cast<double>(k - (j - 1))
                      : 0.0;
      z[static_cast<size_t>(a) * k + j] = 1.0 - p;
    }
  }
  EfficiencyProfile out;
  out.eta.assign(k, 1.0);
  std::vector<double> inv(k), next(k);
  int it = 0;
  for (; it < max_iter; ++it) {
    for (int j = 0; j < k; ++j) inv[j] = 1.0 / out.eta[j];
    double delta = 0.0;
    for (int a = 0; a < k; ++a) {
      double s = 0.0;
      const double* row = &z[static_cast<size_t>(a) * k];
      for (int j = 0; j < k; ++j) s += row[j] * inv[j];
      double t = s / k;
      double v = 0.5 * out.eta[a] + 0.5 * t;
      delta = std::max(delta, std::abs(v - out.eta[a]));
      next[a] = v;
    }
    out.eta.swap(next);
    if (delta < tol) break;
  }
  out.iterations = it + 1;
  // residual of the undamped equation
  for (int j = 0; j < k; ++j) inv[j] = 1.0 / out.eta[j];
  double resid = 0.0, inv_sum = 0.0;
  for (int a = 0; a < k; ++a) {
    double s = 0.0;
    const double* row = &z[static_cast<size_t>(a) * k];
    for (int j = 0; j < k; ++j) s += row[j] * inv[j];
    resid = std::max(resid, std::abs(out.eta[a] - s / k));
    inv_sum += inv[a];
  }
  out.residual = resid;
  out.harmonic_mean = k / inv_sum;
  out.lower_bound = false;
  return out;
}

EfficiencyProfile eta_one_to_one_bound(int total, double n_f) {
  if (total < 2) {
    throw std::invalid_argument("eta_one_to_one_bound: need total >= 2");
  }
  if (!(n_f > 0.0)) {
    throw std::invalid_argument("eta_one_to_one_bound: n_f must be positive");
  }
  EfficiencyProfile out;
  out.eta.resize(total);
  double inv_sum = 0.0;
  for (int k = 0; k < total; ++k) {
    double m = static_cast<double>(total - k);  // missing chunks
    double e = (m / n_f) * (1.0 - std::pow(1.0 - 1.0 / m, n_f));
    e = std::min(e, 1.0);
    out.eta[k] = e;
    inv_sum += 1.0 / e;
  }
  out.harmonic_mean = total / inv_sum;
  out.lower_bound = true;
  return out;
}

ChunkLatency chunk_latency(double w_f, const EfficiencyProfile& profile) {
  if (!(w_f > 0.0)) throw std::invalid_argument("chunk_latency: w_f <= 0");
  ChunkLatency out;
  out.eta_harmonic = profile.harmonic_mean;
  if (profile.harmonic_mean > 0.0) {
    out.w = w_f / profile.harmonic_mean;
  }
  return out;
}

}  // namespace swarm
