#pragma once

#include <string>
#include <variant>

namespace swarm {

// Per-link transfer rate as a function of the distance r between two
// connected peers, in bits per second. Every variant is nonincreasing in r.

struct TcpLike {
  double c = 1.0;  // bits*m/s; rate c/r
};

struct ConstantRate {
  double u = 1.0;  // bits/s, distance-independent
};

struct TcpCapped {
  double c = 1.0;
  double u = 1.0;  // rate min(c/r, u)
};

struct TcpOffset {
  double c = 1.0;
  double q = 1.0;  // meters; rate c/(r+q)
};

struct TcpOverhead {
  double c = 1.0;
  double o = 0.0;  // bits/s subtracted; rate max(c/r - o, 0)
};

struct WirelessSnr {
  double c = 1.0;      // m^alpha
  double alpha = 4.0;  // path-loss exponent, > 2
  // bits/s carried by the log term; 1.0 reproduces (1/2)ln(1+c/r^alpha).
  double scale = 1.0;
};

class RateFunction {
 public:
  using Variant = std::variant<TcpLike, ConstantRate, TcpCapped, TcpOffset,
                               TcpOverhead, WirelessSnr>;

  RateFunction() : v_(TcpLike{}) {}
  explicit RateFunction(Variant v);  // validates parameters

  // Rate at distance r >= 0. Distances below the configured minimum are
  // clamped up to it, which defines the value at r = 0 for the singular
  // variants.
  double operator()(double r) const;

  double min_distance() const { return min_r_; }
  void set_min_distance(double eps);

  const Variant& variant() const { return v_; }
  std::string kind_name() const;

  bool has_singularity_at_zero() const;

 private:
  Variant v_;
  double min_r_ = 0.0;
};

// Interaction strength gamma = 2*pi*Integral_0^R r f(r) dr via the known
// closed forms (quadrature only for the finite-range wireless case with
// alpha != 4, which has none). `range` may be infinity where the integral
// converges (wireless with alpha > 2, overhead); otherwise throws
// std::domain_error.
double strength(const RateFunction& f, double range);

// Raw moment Integral_0^R r^k f(r) dr, numeric. The overhead variant
// truncates at its own root c/o; infinite range requires convergence.
double rate_moment(const RateFunction& f, double range, int k,
                   double rel_tol = 1e-12);

// Typical transfer distance: Integral r^2 f / Integral r f over (0, R).
double typical_range(const RateFunction& f, double range);

}  // namespace swarm
