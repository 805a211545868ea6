#include "swarm/params.hpp"

#include <cmath>
#include <stdexcept>

namespace swarm {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

NeighborPolicy NeighborPolicy::k_nearest(int l) {
  if (l < 1) throw std::invalid_argument("degree policy needs degree >= 1");
  NeighborPolicy p;
  p.kind = Kind::Degree;
  p.degree = l;
  return p;
}

NeighborPolicy NeighborPolicy::generic(
    std::function<double(double, double)> accept, double support) {
  if (!accept) throw std::invalid_argument("generic policy needs a function");
  if (!(support > 0.0))
    throw std::invalid_argument("generic policy needs a positive support");
  NeighborPolicy p;
  p.kind = Kind::Generic;
  p.accept = std::move(accept);
  p.support = support;
  return p;
}

SystemParams SystemParams::make(double lambda, double file_size,
                                RateFunction rate,
                                std::optional<double> range,
                                std::optional<double> torus_side,
                                SizeDist dist) {
  SystemParams p;
  p.lambda = lambda;
  p.file_size = file_size;
  p.size_dist = dist;
  p.rate = std::move(rate);
  p.range = range;
  p.torus_side = torus_side;
  if (p.range && std::isfinite(*p.range)) {
    if (!p.torus_side) p.torus_side = 10.0 * *p.range;
    if (p.rate.has_singularity_at_zero() && p.rate.min_distance() == 0.0) {
      p.rate.set_min_distance(1e-6 * *p.range);
    }
    // footnote normalization: a cap that binds on all of [0, R] is the
    // constant-rate model
    if (const auto* cap = std::get_if<TcpCapped>(&p.rate.variant())) {
      if (cap->c >= cap->u * *p.range) {
        double eps = p.rate.min_distance();
        p.rate = RateFunction{RateFunction::Variant{ConstantRate{cap->u}}};
        p.rate.set_min_distance(eps);
      }
    }
  }
  p.validate();
  return p;
}

void SystemParams::validate() const {
  if (!(lambda >= 0.0) || std::isinf(lambda))
    throw std::invalid_argument("lambda must be finite and nonnegative");
  if (!(file_size > 0.0) || std::isinf(file_size))
    throw std::invalid_argument("file_size must be positive and finite");
  if (range) {
    if (!(*range > 0.0)) throw std::invalid_argument("range must be positive");
    if (std::isinf(*range) &&
        !std::holds_alternative<WirelessSnr>(rate.variant())) {
      throw std::invalid_argument(
          "infinite range is only meaningful for the wireless rate");
    }
  }
  if (torus_side) {
    if (!(*torus_side > 0.0) || std::isinf(*torus_side))
      throw std::invalid_argument("torus_side must be positive and finite");
    if (range && std::isfinite(*range) && *torus_side < 10.0 * *range) {
      throw std::invalid_argument("torus_side must be at least 10*range");
    }
  }
}

double SystemParams::side() const {
  if (!torus_side) throw std::logic_error("torus side not set");
  return *torus_side;
}

DimensionlessState dimensionless(const SystemParams& p) {
  if (!p.range) {
    throw std::invalid_argument("dimensionless state needs a peering range");
  }
  DimensionlessState out;
  double reff = *p.range;
  if (std::isinf(reff)) reff = typical_range(p.rate, *p.range);
  double gamma = strength(p.rate, *p.range);
  double beta_f = std::sqrt(p.lambda * p.file_size / gamma);
  out.n_f = kPi * reff * reff * beta_f;
  if (const auto* tcp = std::get_if<TcpLike>(&p.rate.variant())) {
    out.rho = p.lambda * p.file_size * reff * reff * reff / tcp->c;
  }
  return out;
}

SystemParams rescale_units(const SystemParams& p, double meter_factor,
                           double bit_factor, double second_factor) {
  if (!(meter_factor > 0.0 && bit_factor > 0.0 && second_factor > 0.0)) {
    throw std::invalid_argument("rescale factors must be positive");
  }
  const double m = meter_factor, b = bit_factor, s = second_factor;
  SystemParams out = p;
  out.lambda = p.lambda / (m * m * s);
  out.file_size = p.file_size * b;
  if (p.range) out.range = *p.range * m;
  if (p.torus_side) out.torus_side = *p.torus_side * m;

  RateFunction::Variant v = p.rate.variant();
  std::visit(
      [&](auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, TcpLike>) {
          r.c *= b * m / s;
        } else if constexpr (std::is_same_v<T, ConstantRate>) {
          r.u *= b / s;
        } else if constexpr (std::is_same_v<T, TcpCapped>) {
          r.c *= b * m / s;
          r.u *= b / s;
        } else if constexpr (std::is_same_v<T, TcpOffset>) {
          r.c *= b * m / s;
          r.q *= m;
        } else if constexpr (std::is_same_v<T, TcpOverhead>) {
          r.c *= b * m / s;
          r.o *= b / s;
        } else if constexpr (std::is_same_v<T, WirelessSnr>) {
          r.c *= std::pow(m, r.alpha);
          r.scale *= b / s;
        }
      },
      v);
  out.rate = RateFunction{v};
  out.rate.set_min_distance(p.rate.min_distance() * m);
  return out;
}

}  // namespace swarm
