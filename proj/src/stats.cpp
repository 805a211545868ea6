#include "swarm/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace swarm {

double mean_of(std::span<const double> samples) {
  if (samples.empty()) return 0.0;
  double s = 0.0;
  for (double v : samples) s += v;
  return s / static_cast<double>(samples.size());
}

static double t_critical_975(int dof) {
  // the batch counts actually used; anything larger is close to normal
  if (dof <= 9) return 2.262;
  if (dof <= 19) return 2.093;
  if (dof <= 29) return 2.045;
  return 1.960;
}

BatchCI batch_means_ci(std::span<const double> samples, int batches) {
  if (batches < 2) throw std::invalid_argument("need at least 2 batches");
  BatchCI out;
  size_t n = samples.size();
  if (n < static_cast<size_t>(2 * batches)) {
    // too little data for batching; fall back to the plain mean with a
    // degenerate interval so callers can still report something
    out.mean = mean_of(samples);
    out.se = 0.0;
    out.half_width = 0.0;
    out.batches = 0;
    return out;
  }
  size_t per = n / batches;  // trailing remainder is dropped
  std::vector<double> bm(batches);
  for (int b = 0; b < batches; ++b) {
    double s = 0.0;
    for (size_t i = b * per; i < (b + 1) * per; ++i) s += samples[i];
    bm[b] = s / static_cast<double>(per);
  }
  double m = mean_of(bm);
  double var = 0.0;
  for (double v : bm) var += (v - m) * (v - m);
  var /= static_cast<double>(batches - 1);
  out.mean = m;
  out.se = std::sqrt(var / batches);
  out.half_width = t_critical_975(batches - 1) * out.se;
  out.batches = batches;
  return out;
}

double ks_exponential(std::span<const double> samples, double mean) {
  if (samples.empty()) throw std::invalid_argument("ks: no samples");
  if (!(mean > 0.0)) throw std::invalid_argument("ks: mean must be positive");
  std::vector<double> x(samples.begin(), samples.end());
  std::sort(x.begin(), x.end());
  double n = static_cast<double>(x.size());
  double d = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    double cdf = -std::expm1(-x[i] / mean);
    double lo = cdf - static_cast<double>(i) / n;
    double hi = static_cast<double>(i + 1) / n - cdf;
    d = std::max({d, lo, hi});
  }
  return d;
}

}  // namespace swarm
