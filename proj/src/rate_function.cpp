#include "swarm/rate_function.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "swarm/quadrature.hpp"

namespace swarm {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

RateFunction::RateFunction(Variant v) : v_(std::move(v)) {
  std::visit(
      [](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, TcpLike>) {
          require(r.c > 0.0, "TcpLike: c must be positive");
        } else if constexpr (std::is_same_v<T, ConstantRate>) {
          require(r.u > 0.0, "ConstantRate: u must be positive");
        } else if constexpr (std::is_same_v<T, TcpCapped>) {
          require(r.c > 0.0 && r.u > 0.0, "TcpCapped: c, u must be positive");
        } else if constexpr (std::is_same_v<T, TcpOffset>) {
          require(r.c > 0.0 && r.q > 0.0, "TcpOffset: c, q must be positive");
        } else if constexpr (std::is_same_v<T, TcpOverhead>) {
          require(r.c > 0.0 && r.o >= 0.0,
                  "TcpOverhead: c must be positive, o nonnegative");
        } else if constexpr (std::is_same_v<T, WirelessSnr>) {
          require(r.c > 0.0 && r.alpha > 2.0 && r.scale > 0.0,
                  "WirelessSnr: need c > 0, alpha > 2, scale > 0");
        }
      },
      v_);
}

void RateFunction::set_min_distance(double eps) {
  require(eps >= 0.0, "min distance must be nonnegative");
  min_r_ = eps;
}

bool RateFunction::has_singularity_at_zero() const {
  return std::holds_alternative<TcpLike>(v_) ||
         std::holds_alternative<TcpOverhead>(v_) ||
         std::holds_alternative<WirelessSnr>(v_);
}

double RateFunction::operator()(double r) const {
  if (r < 0.0) throw std::invalid_argument("eval: negative distance");
  double d = std::max(r, min_r_);
  return std::visit(
      [d](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, TcpLike>) {
          return v.c / d;
        } else if constexpr (std::is_same_v<T, ConstantRate>) {
          return v.u;
        } else if constexpr (std::is_same_v<T, TcpCapped>) {
          // min(c/d, u) without dividing by zero at d = 0
          return d * v.u <= v.c ? v.u : v.c / d;
        } else if constexpr (std::is_same_v<T, TcpOffset>) {
          return v.c / (d + v.q);
        } else if constexpr (std::is_same_v<T, TcpOverhead>) {
          return std::max(v.c / d - v.o, 0.0);
        } else {
          return 0.5 * v.scale * std::log1p(v.c * std::pow(d, -v.alpha));
        }
      },
      v_);
}

std::string RateFunction::kind_name() const {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, TcpLike>) return "tcp";
        if constexpr (std::is_same_v<T, ConstantRate>) return "constant";
        if constexpr (std::is_same_v<T, TcpCapped>) return "tcp-capped";
        if constexpr (std::is_same_v<T, TcpOffset>) return "tcp-offset";
        if constexpr (std::is_same_v<T, TcpOverhead>) return "tcp-overhead";
        return "wireless";
      },
      v_);
}

namespace {

double wireless_strength_finite(const WirelessSnr& w, double range) {
  if (w.alpha == 4.0) {
    // (pi/2) R^2 ln(1 + c/R^4) + pi sqrt(c) arctan(R^2/sqrt(c)), times scale
    double r2 = range * range;
    double sc = std::sqrt(w.c);
    return w.scale * (0.5 * kPi * r2 * std::log1p(w.c / (r2 * r2)) +
                      kPi * sc * std::atan(r2 / sc));
  }
  // no closed form for general alpha at finite range
  RateFunction f{RateFunction::Variant{w}};
  return 2.0 * kPi *
         integrate([&f](double r) { return r * f(r); }, 0.0, range, 1e-13);
}

}  // namespace

double strength(const RateFunction& f, double range) {
  if (!(range > 0.0)) throw std::invalid_argument("strength: range <= 0");
  const bool infinite = std::isinf(range);
  return std::visit(
      [&](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, TcpLike>) {
          if (infinite)
            throw std::domain_error("strength diverges at infinite range");
          return 2.0 * kPi * v.c * range;
        } else if constexpr (std::is_same_v<T, ConstantRate>) {
          if (infinite)
            throw std::domain_error("strength diverges at infinite range");
          return kPi * v.u * range * range;
        } else if constexpr (std::is_same_v<T, TcpCapped>) {
          if (infinite)
            throw std::domain_error("strength diverges at infinite range");
          if (v.c >= v.u * range) {
            // cap binds on all of [0, R]: the constant case
            return kPi * v.u * range * range;
          }
          return kPi * (2.0 * v.c * range - v.c * v.c / v.u);
        } else if constexpr (std::is_same_v<T, TcpOffset>) {
          if (infinite)
            throw std::domain_error("strength diverges at infinite range");
          return 2.0 * kPi * v.c * (range - v.q * std::log1p(range / v.q));
        } else if constexpr (std::is_same_v<T, TcpOverhead>) {
          double reff = range;
          if (v.o > 0.0) reff = std::min(range, v.c / v.o);
          if (std::isinf(reff))
            throw std::domain_error("strength diverges at infinite range");
          return kPi * reff * (2.0 * v.c - v.o * reff);
        } else {
          if (infinite) {
            // pi^2 c^(2/alpha) / (2 sin(2 pi/alpha)), alpha > 2
            return v.scale * kPi * kPi * std::pow(v.c, 2.0 / v.alpha) /
                   (2.0 * std::sin(2.0 * kPi / v.alpha));
          }
          return wireless_strength_finite(v, range);
        }
      },
      f.variant());
}

double rate_moment(const RateFunction& f, double range, int k,
                   double rel_tol) {
  if (!(range > 0.0)) throw std::invalid_argument("rate_moment: range <= 0");
  if (k < 1 || k > 2) throw std::invalid_argument("rate_moment: k in {1,2}");
  double upper = range;
  if (const auto* ov = std::get_if<TcpOverhead>(&f.variant())) {
    if (ov->o > 0.0) upper = std::min(upper, ov->c / ov->o);
  }
  auto integrand = [&f, k](double r) { return std::pow(r, k) * f(r); };
  if (std::isinf(upper)) {
    const auto* w = std::get_if<WirelessSnr>(&f.variant());
    if (w == nullptr || w->alpha <= k + 1.0) {
      throw std::domain_error("rate_moment diverges at infinite range");
    }
    // split at the knee c^(1/alpha); beyond it substitute u = 1/r so the
    // slow power tail becomes a one-sided singularity the subdivision
    // handles well
    double knee = std::pow(w->c, 1.0 / w->alpha);
    double head = integrate(integrand, 0.0, knee, rel_tol);
    auto tail_integrand = [&f, k](double u) {
      double r = 1.0 / u;
      return std::pow(r, k + 2) * f(r);
    };
    double tail =
        integrate(tail_integrand, 0.0, 1.0 / knee, rel_tol, 1e-14 * head);
    return head + tail;
  }
  return integrate(integrand, 0.0, upper, rel_tol);
}

double typical_range(const RateFunction& f, double range) {
  double m1 = rate_moment(f, range, 1);
  double m2 = rate_moment(f, range, 2);
  return m2 / m1;
}

}  // namespace swarm
