#pragma once

#include <optional>
#include <vector>

namespace swarm {

// Probability that a peer holding k of total chunks can serve at least one
// chunk to a peer holding j, under uniformly random collections:
// 1 - binom(k, j)/binom(total, j), with binom(k, j) = 0 when j > k.
double useful_probability(int k, int j, int total);

struct EfficiencyProfile {
  std::vector<double> eta;  // per class k = 0 .. total-1
  double harmonic_mean = 0.0;
  bool lower_bound = false;
  int iterations = 0;      // 0 for closed forms
  double residual = 0.0;   // fixed-point residual, where applicable
};

// Per-class efficiency when a downloader can pool every neighbor holding a
// useful chunk: solves eta_k = (1/K) sum_j z(k,j)/eta_j by damped iteration
// (factor 0.5) from eta = 1.
EfficiencyProfile eta_many_to_one(int total, double tol = 1e-12,
                                  int max_iter = 100000);

// Closed-form lower bound for single-uploader-per-chunk collaboration:
// eta_k = min(1, ((K-k)/n_f)(1 - (1 - 1/(K-k))^n_f)).
EfficiencyProfile eta_one_to_one_bound(int total, double n_f);

struct ChunkLatency {
  std::optional<double> w;  // absent when the efficiency vanishes
  double eta_harmonic = 0.0;
};

ChunkLatency chunk_latency(double w_f, const EfficiencyProfile& profile);

}  // namespace swarm
