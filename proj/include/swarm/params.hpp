#pragma once

#include <functional>
#include <optional>

#include "swarm/rate_function.hpp"

namespace swarm {

enum class SizeDist { Constant, Exponential };

// How a peer picks who it exchanges with.
struct NeighborPolicy {
  enum class Kind { Range, Degree, Generic };
  Kind kind = Kind::Range;
  int degree = 0;  // Degree: connect to this many nearest peers
  // Generic: probability of keeping a link at distance r given density beta,
  // integrated over (0, support).
  std::function<double(double, double)> accept;
  double support = 0.0;

  static NeighborPolicy range() { return {}; }
  static NeighborPolicy k_nearest(int l);
  static NeighborPolicy generic(std::function<double(double, double)> accept,
                                double support);
};

struct ExtensionParams {
  double server_rate_density = 0.0;  // U_C, bits/s per m^2
  double abandonment_rate = 0.0;     // a, 1/s
  double seed_time = 0.0;            // T_S, seconds of post-completion seeding
  double access_upload_cap = 0.0;    // U, bits/s per peer; 0 = uncapped
};

struct SystemParams {
  double lambda = 1.0;     // arrivals per m^2 per s
  double file_size = 1.0;  // mean, bits
  SizeDist size_dist = SizeDist::Exponential;
  RateFunction rate;
  std::optional<double> range;       // peering radius (absent: degree policy)
  std::optional<double> torus_side;  // defaults to 10*range when needed

  // Validates and fills derived defaults (torus side, the minimum-distance
  // clamp of 1e-6*range for rate functions singular at r = 0).
  static SystemParams make(double lambda, double file_size, RateFunction rate,
                           std::optional<double> range,
                           std::optional<double> torus_side = std::nullopt,
                           SizeDist dist = SizeDist::Exponential);
  void validate() const;

  double side() const;  // torus side or throws if unresolved
};

struct DimensionlessState {
  std::optional<double> rho;  // lambda*F*R^3/c, defined for the tcp variant
  double n_f = 0.0;           // pi R^2 beta_f
};

DimensionlessState dimensionless(const SystemParams& p);

// Multiplies every field by the factors implied by its units. rho and n_f
// are invariant under any combination.
SystemParams rescale_units(const SystemParams& p, double meter_factor,
                           double bit_factor, double second_factor);

}  // namespace swarm
