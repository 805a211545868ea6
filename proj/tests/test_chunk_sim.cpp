#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "swarm/chunk_sim.hpp"
#include "swarm/rate_function.hpp"

using namespace swarm;

namespace {

ChunkSimConfig quick_config(uint64_t seed, MatchMode mode, int chunks) {
  ChunkSimConfig cfg;
  cfg.params = SystemParams::make(
      50.0, 1.0, RateFunction{RateFunction::Variant{TcpLike{1.0}}}, 1.0,
      std::nullopt, SizeDist::Constant);
  cfg.chunks = chunks;
  cfg.mode = mode;
  cfg.seed = seed;
  cfg.target_departures = 1500;
  return cfg;
}

// bitset helper for handcrafted snapshots
std::vector<uint64_t> have_bits(int chunks, std::initializer_list<int> owned) {
  std::vector<uint64_t> w((chunks + 63) / 64, 0);
  for (int c : owned) w[c / 64] |= uint64_t{1} << (c % 64);
  return w;
}

std::vector<uint64_t> have_all(int chunks) {
  std::vector<uint64_t> w((chunks + 63) / 64, 0);
  for (int c = 0; c < chunks; ++c) w[c / 64] |= uint64_t{1} << (c % 64);
  return w;
}

}  // namespace

TEST_CASE("rarest piece choice is uniform over the tied minimum") {
  // piece 0 is wanted but nobody nearby has it; piece 3 is plentiful but
  // already owned; the tie at count 1 is between pieces 2 and 5
  std::vector<uint16_t> counts = {0, 3, 1, 1, 2, 1};
  std::vector<uint8_t> wanted = {1, 1, 1, 0, 1, 1};
  std::mt19937_64 rng(2024);
  std::vector<int> hits(6, 0);
  for (int i = 0; i < 10000; ++i) {
    int c = rarest_first_choice(counts, wanted, rng);
    REQUIRE(c >= 0);
    ++hits[c];
  }
  CHECK(hits[0] == 0);
  CHECK(hits[1] == 0);
  CHECK(hits[3] == 0);
  CHECK(hits[4] == 0);
  CHECK(hits[2] + hits[5] == 10000);
  // a fair split: 3.5 sigma around 5000 is about +-175
  CHECK(std::abs(hits[2] - 5000) < 180);
}

TEST_CASE("rarest piece choice reports when nothing is available") {
  std::vector<uint16_t> counts = {0, 0, 7};
  std::vector<uint8_t> wanted = {1, 1, 0};
  std::mt19937_64 rng(1);
  CHECK(rarest_first_choice(counts, wanted, rng) == -1);

  std::vector<uint8_t> none(3, 0);
  CHECK(rarest_first_choice(counts, none, rng) == -1);

  std::vector<uint16_t> bad = {1, 2};
  CHECK_THROWS_AS((void)rarest_first_choice(bad, wanted, rng),
                  std::invalid_argument);
}

TEST_CASE("copy counts on handcrafted populations") {
  ChunkSnapshot snap;
  snap.side = 10.0;
  snap.range = 1.0;
  snap.chunks = 2;

  SUBCASE("a peer alone has no pairs to average") {
    snap.peers.push_back({{5.0, 5.0}, have_bits(2, {0})});
    CopyCountStats s = copy_count_stats(snap);
    CHECK(!s.possessed_mean.has_value());
    CHECK(!s.missing_mean.has_value());
  }

  SUBCASE("complementary owners see each other's piece") {
    snap.peers.push_back({{5.0, 5.0}, have_bits(2, {0})});
    snap.peers.push_back({{5.5, 5.0}, have_bits(2, {1})});
    CopyCountStats s = copy_count_stats(snap);
    REQUIRE(s.possessed_mean.has_value());
    REQUIRE(s.missing_mean.has_value());
    CHECK(*s.possessed_mean == 0.0);
    CHECK(*s.missing_mean == 1.0);
  }

  SUBCASE("a chain of full owners averages its degree") {
    snap.peers.push_back({{0.0, 0.0}, have_all(2)});
    snap.peers.push_back({{0.6, 0.0}, have_all(2)});
    snap.peers.push_back({{1.2, 0.0}, have_all(2)});
    CopyCountStats s = copy_count_stats(snap);
    REQUIRE(s.possessed_mean.has_value());
    CHECK(!s.missing_mean.has_value());
    CHECK(*s.possessed_mean == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  }

  SUBCASE("neighbors across the wrap are seen") {
    snap.peers.push_back({{0.2, 0.0}, have_all(2)});
    snap.peers.push_back({{9.8, 0.0}, have_all(2)});
    CopyCountStats s = copy_count_stats(snap);
    REQUIRE(s.possessed_mean.has_value());
    CHECK(*s.possessed_mean == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("replicated poisson population recovers the mean neighborhood size") {
  const int n = 2000, chunks = 16;
  const double side = 10.0;
  ChunkSnapshot snap;
  snap.side = side;
  snap.range = 1.0;
  snap.chunks = chunks;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, side);
  for (int i = 0; i < n; ++i) {
    snap.peers.push_back({{u(rng), u(rng)}, have_all(chunks)});
  }
  CopyCountStats s = copy_count_stats(snap);
  REQUIRE(s.possessed_mean.has_value());
  CHECK(!s.missing_mean.has_value());
  // every piece is everywhere, so the copy count is just the degree, whose
  // population mean is (n-1) * pi R^2 / side^2
  double expect = (n - 1) * M_PI / (side * side);
  CHECK(*s.possessed_mean == doctest::Approx(expect).epsilon(0.05));
}

TEST_CASE("chunk runs are reproducible and seed-sensitive") {
  ChunkSimConfig cfg = quick_config(77, MatchMode::OneToOne, 8);
  ChunkSimStats a = run_chunks(cfg);
  ChunkSimStats b = run_chunks(cfg);
  CHECK(a.w_emp == b.w_emp);
  CHECK(a.eta_emp == b.eta_emp);
  CHECK(a.departures == b.departures);
  CHECK(a.arrivals == b.arrivals);
  CHECK(a.possessed_mean_copies == b.possessed_mean_copies);
  CHECK(a.missing_mean_copies == b.missing_mean_copies);
  REQUIRE(a.latency_samples.size() == b.latency_samples.size());
  CHECK(std::equal(a.latency_samples.begin(), a.latency_samples.end(),
                   b.latency_samples.begin()));

  cfg.seed = 78;
  ChunkSimStats c = run_chunks(cfg);
  CHECK(a.w_emp != c.w_emp);
}

TEST_CASE("pooled uploads dominate paired uploads") {
  ChunkSimConfig one = quick_config(13, MatchMode::OneToOne, 16);
  one.target_departures = 4000;
  ChunkSimConfig many = quick_config(13, MatchMode::ManyToOne, 16);
  many.target_departures = 4000;
  ChunkSimStats a = run_chunks(one);
  ChunkSimStats b = run_chunks(many);
  CHECK(b.eta_emp + 2.0 * b.eta_se >= a.eta_emp - 2.0 * a.eta_se);
  CHECK(b.eta_emp > a.eta_emp);  // the gap is far wider than the noise here
}

TEST_CASE("incremental copy counts survive a brute-force audit") {
  for (MatchMode mode : {MatchMode::OneToOne, MatchMode::ManyToOne}) {
    ChunkSimConfig cfg = quick_config(21, mode, 8);
    cfg.target_departures = 600;
    cfg.audit_every = 1;
    ChunkSimStats s = run_chunks(cfg);
    CHECK(s.max_count_audit_error == 0.0);
    CHECK(s.departures > 200);
  }
}

TEST_CASE("run statistics are internally consistent") {
  ChunkSimConfig cfg = quick_config(31, MatchMode::ManyToOne, 8);
  cfg.keep_final_snapshot = true;
  ChunkSimStats s = run_chunks(cfg);

  CHECK(s.dt ==
        doctest::Approx((1.0 / 8.0) /
                        (10.0 * cfg.params.rate(
                                    typical_range(cfg.params.rate, 1.0)))));
  CHECK(s.w_f == doctest::Approx(std::sqrt(1.0 / (50.0 * 2.0 * M_PI))));
  CHECK(s.eta_emp == doctest::Approx(s.w_f / s.w_emp).epsilon(1e-12));
  CHECK(s.eta_emp > 0.0);
  CHECK(s.eta_emp < 1.2);
  CHECK(s.steps > 0);
  CHECK(s.beta_emp > 0.0);

  // bins 0..chunks; the last one only catches peers sampled between
  // finishing and leaving, so it stays near zero
  REQUIRE(s.class_density.size() == 9);
  double total = 0.0;
  for (double d : s.class_density) {
    CHECK(d >= 0.0);
    total += d;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(s.class_density.back() < 0.05);

  CHECK(s.server_bytes_fraction >= 0.0);
  CHECK(s.server_bytes_fraction < 0.2);

  CHECK(s.final_snapshot.chunks == 8);
  CHECK(s.final_snapshot.side == cfg.params.side());
  CHECK(!s.final_snapshot.peers.empty());
}

TEST_CASE("degenerate configurations are refused") {
  ChunkSimConfig cfg = quick_config(1, MatchMode::OneToOne, 8);

  ChunkSimConfig bad = cfg;
  bad.chunks = 1;  // a single piece is the whole file; the piece picture
                   // degenerates to the plain latency model
  CHECK_THROWS_AS((void)run_chunks(bad), std::invalid_argument);

  bad = cfg;
  bad.chunks = 0;
  CHECK_THROWS_AS((void)run_chunks(bad), std::invalid_argument);

  bad = cfg;
  bad.params.size_dist = SizeDist::Exponential;
  CHECK_THROWS_AS((void)run_chunks(bad), std::invalid_argument);

  bad = cfg;
  bad.server_chi = -0.5;
  CHECK_THROWS_AS((void)run_chunks(bad), std::invalid_argument);

  bad = cfg;
  bad.params.range.reset();
  CHECK_THROWS_AS((void)run_chunks(bad), std::invalid_argument);
}
