#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace swarm {

struct BatchCI {
  double mean = 0.0;
  double se = 0.0;         // standard error of the mean from batch means
  double half_width = 0.0; // 95% half width
  int batches = 0;
};

// Mean with a batch-means confidence interval: samples are split in order
// into `batches` equal groups so serial correlation is absorbed into the
// batch-mean variance. Needs at least 2 samples per batch.
BatchCI batch_means_ci(std::span<const double> samples, int batches = 20);

// One-sample Kolmogorov-Smirnov distance between the samples and an
// exponential law with the given mean.
double ks_exponential(std::span<const double> samples, double mean);

double mean_of(std::span<const double> samples);

}  // namespace swarm
