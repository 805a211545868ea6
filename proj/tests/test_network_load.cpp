#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "swarm/network_load.hpp"

using namespace swarm;

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;

SystemParams tcp_params(double lambda, double c, double range) {
  return SystemParams::make(lambda, 1.0,
                            RateFunction{RateFunction::Variant{TcpLike{c}}},
                            range);
}

SpatialSnapshot pair_snapshot(Vec2 a, Vec2 b, bool b_seeds) {
  SpatialSnapshot s;
  s.side = 10.0;
  s.range = 1.0;
  s.peers.push_back({a, false, 0.0});
  s.peers.push_back({b, b_seeds, 0.0});
  return s;
}
}  // namespace

TEST_CASE("the two analytic flow routes agree across rate shapes") {
  std::vector<SystemParams> cases;
  cases.push_back(tcp_params(3.0, 2.0, 1.5));
  cases.push_back(SystemParams::make(
      1.0, 2.0, RateFunction{RateFunction::Variant{ConstantRate{0.7}}}, 2.0));
  cases.push_back(SystemParams::make(
      5.0, 1.0, RateFunction{RateFunction::Variant{TcpOffset{1.0, 0.3}}},
      1.0));
  cases.push_back(SystemParams::make(
      2.0, 1.0, RateFunction{RateFunction::Variant{WirelessSnr{1.0, 4.0}}},
      1.0));
  for (const auto& p : cases) {
    CHECK(analytic_flow(p) ==
          doctest::Approx(analytic_flow_beta_form(p)).epsilon(1e-9));
  }
}

TEST_CASE("inverse-distance demand depends on the range, not the rate scale") {
  double lambda = 4.0, range = 2.0;
  SystemParams p1 = tcp_params(lambda, 1.0, range);
  // moments of c/r are exactly polynomial, so this is tight
  CHECK(analytic_flow(p1) ==
        doctest::Approx(lambda * 1.0 * range / kPi).epsilon(1e-12));
  SystemParams p7 = tcp_params(lambda, 7.0, range);
  CHECK(analytic_flow(p1) == doctest::Approx(analytic_flow(p7)).epsilon(1e-12));
}

TEST_CASE("demand with a diverging second moment is refused") {
  double inf = std::numeric_limits<double>::infinity();
  SystemParams p = SystemParams::make(
      1.0, 1.0, RateFunction{RateFunction::Variant{WirelessSnr{1.0, 2.5}}},
      inf, 100.0);
  CHECK_THROWS_AS((void)analytic_flow(p), std::domain_error);
  // a faster falloff converges fine
  SystemParams ok = SystemParams::make(
      1.0, 1.0, RateFunction{RateFunction::Variant{WirelessSnr{1.0, 4.0}}},
      inf, 100.0);
  CHECK(analytic_flow(ok) > 0.0);

  SystemParams no_range = tcp_params(1.0, 1.0, 1.0);
  no_range.range.reset();
  CHECK_THROWS_AS((void)analytic_flow(no_range), std::invalid_argument);
}

TEST_CASE("feasibility compares demand against transport capacity") {
  SystemParams p = tcp_params(4.0, 1.0, 2.0);
  double psi = analytic_flow(p);  // = 8/pi

  NetworkParams roomy{1.0, psi};  // xi = 2 psi
  NetworkFeasibility f = check_network(p, roomy);
  CHECK(f.feasible);
  CHECK(f.psi == doctest::Approx(psi));
  CHECK(f.psi_beta_form == doctest::Approx(psi).epsilon(1e-9));
  CHECK(f.xi == doctest::Approx(2.0 * psi).epsilon(1e-12));
  CHECK(f.headroom == doctest::Approx(2.0).epsilon(1e-12));

  NetworkParams tight{0.25, 0.9 * psi};  // xi = 0.9 psi
  f = check_network(p, tight);
  CHECK(!f.feasible);
  CHECK(f.headroom == doctest::Approx(0.9).epsilon(1e-12));

  CHECK_THROWS_AS((void)capacity_per_unit_length(NetworkParams{-1.0, 1.0}),
                  std::invalid_argument);
}

TEST_CASE("a single chord is hit as often as integral geometry says") {
  // two leechers 0.5 apart; a random probe of length L crosses a chord of
  // length d with probability 2 L d / (pi A), so the flow estimate must
  // average directions * f(d) * 2 d / (pi A)
  RateFunction rate{RateFunction::Variant{TcpLike{1.0}}};
  std::vector<SpatialSnapshot> snaps{
      pair_snapshot({5.0, 5.0}, {5.5, 5.0}, false)};
  FlowSample fs = empirical_flow(snaps, rate, 2.0, 200000, 99);
  double expect = 2.0 * rate(0.5) * 2.0 * 0.5 / (kPi * 100.0);
  CHECK(fs.crossings > 1000);
  CHECK(fs.psi_emp == doctest::Approx(expect).epsilon(0.10));

  // the same chord laid across the wrap is seen identically
  std::vector<SpatialSnapshot> wrapped{
      pair_snapshot({9.75, 5.0}, {0.25, 5.0}, false)};
  FlowSample fw = empirical_flow(wrapped, rate, 2.0, 200000, 99);
  CHECK(fw.psi_emp == doctest::Approx(expect).epsilon(0.10));
}

TEST_CASE("a seeding endpoint halves the counted flow exactly") {
  RateFunction rate{RateFunction::Variant{TcpLike{1.0}}};
  std::vector<SpatialSnapshot> both{
      pair_snapshot({5.0, 5.0}, {5.6, 5.3}, false)};
  std::vector<SpatialSnapshot> one{
      pair_snapshot({5.0, 5.0}, {5.6, 5.3}, true)};
  // identical probes through the same seed, so the ratio is exact
  FlowSample fb = empirical_flow(both, rate, 2.0, 50000, 7);
  FlowSample fo = empirical_flow(one, rate, 2.0, 50000, 7);
  REQUIRE(fb.crossings > 100);
  CHECK(fb.crossings == fo.crossings);
  CHECK(fb.psi_emp == doctest::Approx(2.0 * fo.psi_emp).epsilon(1e-12));
}

TEST_CASE("poisson fields reproduce the analytic demand") {
  // E[flow per unit length] over a density-beta poisson swarm is
  // 4 beta^2 m2, the same expression the fluid route uses
  const double beta = 1.0, side = 10.0, range = 1.0;
  RateFunction rate{RateFunction::Variant{TcpLike{1.0}}};
  std::mt19937_64 rng(404);
  std::poisson_distribution<int> pn(beta * side * side);
  std::uniform_real_distribution<double> u(0.0, side);
  std::vector<SpatialSnapshot> snaps(60);
  for (auto& s : snaps) {
    s.side = side;
    s.range = range;
    int n = pn(rng);
    for (int i = 0; i < n; ++i) {
      s.peers.push_back({{u(rng), u(rng)}, false, 0.0});
    }
  }
  FlowSample fs = empirical_flow(snaps, rate, 2.0, 400, 11);
  double m2 = rate_moment(rate, range, 2);
  double expect = 4.0 * beta * beta * m2;
  CHECK(fs.psi_emp == doctest::Approx(expect).epsilon(0.10));
  CHECK(std::abs(fs.psi_emp - expect) < 4.0 * fs.se);
}

TEST_CASE("probe bookkeeping rejects abuse and survives emptiness") {
  RateFunction rate{RateFunction::Variant{TcpLike{1.0}}};
  std::vector<SpatialSnapshot> none;
  FlowSample empty = empirical_flow(none, rate, 1.0, 10, 1);
  CHECK(empty.psi_emp == 0.0);
  CHECK(empty.crossings == 0);

  std::vector<SpatialSnapshot> snaps{
      pair_snapshot({5.0, 5.0}, {5.5, 5.0}, false)};
  CHECK_THROWS_AS((void)empirical_flow(snaps, rate, 0.0, 10, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)empirical_flow(snaps, rate, 1.0, 0, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)empirical_flow(snaps, rate, 25.0, 10, 1),
                  std::invalid_argument);

  std::vector<SpatialSnapshot> mixed = snaps;
  mixed.push_back(snaps[0]);
  mixed.back().side = 20.0;
  CHECK_THROWS_AS((void)empirical_flow(mixed, rate, 1.0, 10, 1),
                  std::invalid_argument);
}
