#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "swarm/chunk_analytics.hpp"

using namespace swarm;

namespace {
// Independent route to the usefulness probability through log-binomials.
double useful_by_lgamma(int k, int j, int total) {
  if (j > k) return 1.0;
  if (j == 0) return 0.0;
  auto lbinom = [](int n, int r) {
    return std::lgamma(n + 1.0) - std::lgamma(r + 1.0) -
           std::lgamma(n - r + 1.0);
  };
  return 1.0 - std::exp(lbinom(k, j) - lbinom(total, j));
}
}  // namespace

TEST_CASE("usefulness boundaries") {
  // an empty collection never helps anyone
  for (int j : {0, 1, 5, 15}) CHECK(useful_probability(0, j, 16) == (j > 0 ? 1.0 : 0.0));
  // nobody can help a peer that wants nothing new from equals
  for (int k = 0; k < 16; ++k) {
    CHECK(useful_probability(k, 0, 16) == 0.0);
    // a strictly larger collection always has something new
    if (k < 15) CHECK(useful_probability(k, k + 1, 16) == 1.0);
  }
  // full mirror: binom(k,j)/binom(K,j) = 1 when k = K... but k is capped at
  // K-1 for leechers; k = j is the self-similar case
  CHECK(useful_probability(8, 8, 16) == doctest::Approx(1.0 - 1.0 / 12870.0));
}

TEST_CASE("usefulness matches the log-gamma oracle") {
  for (int total : {2, 3, 8, 64, 300, 1024}) {
    for (int k = 0; k < total; k += std::max(1, total / 7)) {
      for (int j = 0; j < total; j += std::max(1, total / 9)) {
        double got = useful_probability(k, j, total);
        double want = useful_by_lgamma(k, j, total);
        CHECK(got == doctest::Approx(want).epsilon(1e-9));
        CHECK(got >= 0.0);
        CHECK(got <= 1.0);
      }
    }
  }
}

TEST_CASE("usefulness rejects bad classes") {
  CHECK_THROWS_AS((void)useful_probability(-1, 0, 4), std::invalid_argument);
  CHECK_THROWS_AS((void)useful_probability(0, 4, 4), std::invalid_argument);
  CHECK_THROWS_AS((void)useful_probability(4, 0, 4), std::invalid_argument);
  CHECK_THROWS_AS((void)useful_probability(0, 0, 0), std::invalid_argument);
  CHECK_THROWS_AS((void)useful_probability(0, -1, 4), std::invalid_argument);
}

TEST_CASE("two-chunk pooled efficiency is exact") {
  EfficiencyProfile p = eta_many_to_one(2);
  REQUIRE(p.eta.size() == 2);
  CHECK(p.eta[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p.eta[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(p.harmonic_mean == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK_FALSE(p.lower_bound);
  CHECK(p.iterations > 0);
}

TEST_CASE("pooled efficiency frozen values") {
  CHECK(eta_many_to_one(3).harmonic_mean == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(eta_many_to_one(4).harmonic_mean ==
        doctest::Approx(0.792974465420035).epsilon(1e-12));
  CHECK(eta_many_to_one(16).harmonic_mean ==
        doctest::Approx(0.913031172650211).epsilon(1e-12));
  // the demand-weighted mean can locally exceed one for the lowest class
  CHECK(eta_many_to_one(4).eta[0] > 1.0);
}

TEST_CASE("pooled fixed point satisfies its equation everywhere") {
  for (int total : {2, 5, 37, 128, 1024}) {
    EfficiencyProfile p = eta_many_to_one(total);
    CHECK(p.residual < 1e-10);
    // direct residual recomputation, independent of the solver's bookkeeping
    double worst = 0.0;
    for (int k = 0; k < total; ++k) {
      double sum = 0.0;
      for (int j = 0; j < total; ++j) {
        sum += useful_probability(k, j, total) / p.eta[j];
      }
      worst = std::max(worst, std::abs(p.eta[k] - sum / total));
    }
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("pooled fixed point is reached from a far-away start") {
  // independent solver: start at 0.1 instead of 1, different damping, and the
  // usefulness matrix recomputed through the public scalar function
  const int total = 20;
  std::vector<double> eta(total, 0.1), next(total);
  for (int it = 0; it < 400000; ++it) {
    double delta = 0.0;
    for (int a = 0; a < total; ++a) {
      double s = 0.0;
      for (int j = 0; j < total; ++j) {
        s += useful_probability(a, j, total) / eta[j];
      }
      next[a] = 0.7 * eta[a] + 0.3 * (s / total);
      delta = std::max(delta, std::abs(next[a] - eta[a]));
    }
    eta.swap(next);
    if (delta < 1e-14) break;
  }
  double inv_sum = 0.0;
  for (double e : eta) inv_sum += 1.0 / e;
  CHECK(total / inv_sum ==
        doctest::Approx(eta_many_to_one(total).harmonic_mean).epsilon(1e-10));
}

TEST_CASE("pooled harmonic mean grows with chunk count toward one") {
  double prev = 0.0;
  for (int total : {2, 4, 8, 16, 32, 64, 128, 256, 512, 1024}) {
    double h = eta_many_to_one(total).harmonic_mean;
    CHECK(h > prev);
    CHECK(h <= 1.0);
    prev = h;
  }
  CHECK(prev > 0.95);
  // threshold scan: 37 pieces is the first count at or above 0.95
  CHECK(eta_many_to_one(36).harmonic_mean < 0.95);
  CHECK(eta_many_to_one(37).harmonic_mean ==
        doctest::Approx(0.9501867930643317).epsilon(1e-12));
}

TEST_CASE("single-uploader lower bound") {
  EfficiencyProfile b = eta_one_to_one_bound(10, 40.0);
  CHECK(b.lower_bound);
  REQUIRE(b.eta.size() == 10);
  for (int k = 0; k < 10; ++k) {
    double left = 10.0 - k;
    double want = std::min(
        1.0, left / 40.0 * (1.0 - std::pow(1.0 - 1.0 / left, 40.0)));
    CHECK(b.eta[static_cast<size_t>(k)] == doctest::Approx(want).epsilon(1e-12));
  }
  // frozen harmonics at forty neighbors
  CHECK(eta_one_to_one_bound(10, 40.0).harmonic_mean ==
        doctest::Approx(0.0852508644961).epsilon(1e-10));
  CHECK(eta_one_to_one_bound(50, 40.0).harmonic_mean ==
        doctest::Approx(0.25337332065).epsilon(1e-10));
  CHECK(eta_one_to_one_bound(200, 40.0).harmonic_mean ==
        doctest::Approx(0.5316300158).epsilon(1e-10));
}

TEST_CASE("chunk counts below two are rejected") {
  CHECK_THROWS_AS((void)eta_many_to_one(1), std::invalid_argument);
  CHECK_THROWS_AS((void)eta_many_to_one(0), std::invalid_argument);
  CHECK_THROWS_AS((void)eta_one_to_one_bound(1, 40.0), std::invalid_argument);
  CHECK_THROWS_AS((void)eta_one_to_one_bound(4, 0.0), std::invalid_argument);
}

TEST_CASE("latency scales by the harmonic efficiency") {
  EfficiencyProfile p = eta_many_to_one(2);
  ChunkLatency lat = chunk_latency(2.0, p);
  REQUIRE(lat.w.has_value());
  CHECK(*lat.w == doctest::Approx(3.0).epsilon(1e-12));  // w_f / (2/3)
  CHECK(lat.eta_harmonic == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  EfficiencyProfile dead;
  dead.eta = {0.0, 0.0};
  dead.harmonic_mean = 0.0;
  CHECK_FALSE(chunk_latency(2.0, dead).w.has_value());
}
