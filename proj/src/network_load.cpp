#include "swarm/network_load.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "swarm/fluid.hpp"
#include "swarm/geometry.hpp"

namespace swarm {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double analytic_flow(const SystemParams& p) {
  if (!p.range) {
    throw std::invalid_argument("analytic_flow: range required");
  }
  if (p.lambda == 0.0) return 0.0;
  double m1 = rate_moment(p.rate, *p.range, 1);
  double m2 = rate_moment(p.rate, *p.range, 2);
  return (2.0 / kPi) * p.lambda * p.file_size * m2 / m1;
}

double analytic_flow_beta_form(const SystemParams& p) {
  if (!p.range) {
    throw std::invalid_argument("analytic_flow: range required");
  }
  if (p.lambda == 0.0) return 0.0;
  FluidSolution f = fluid_solution(p);
  double m2 = rate_moment(p.rate, *p.range, 2);
  return 4.0 * f.beta_f * f.beta_f * m2;
}

double capacity_per_unit_length(const NetworkParams& n) {
  if (n.theta < 0.0 || n.link_capacity < 0.0) {
    throw std::invalid_argument("capacity_per_unit_length: negative input");
  }
  return 2.0 * std::sqrt(n.theta) * n.link_capacity;
}

NetworkFeasibility check_network(const SystemParams& p,
                                 const NetworkParams& n) {
  NetworkFeasibility out;
  out.psi = analytic_flow(p);
  out.psi_beta_form = analytic_flow_beta_form(p);
  out.xi = capacity_per_unit_length(n);
  out.feasible = out.psi < out.xi;
  out.headroom = out.psi > 0.0
                     ? out.xi / out.psi
                     : std::numeric_limits<double>::infinity();
  return out;
}

namespace {

struct Seg {
  Vec2 a, b;
  double xmin, xmax, ymin, ymax;
};

Seg make_seg(Vec2 a, Vec2 b) {
  return {a,
          b,
          std::min(a.x, b.x),
          std::max(a.x, b.x),
          std::min(a.y, b.y),
          std::max(a.y, b.y)};
}

bool bbox_overlap(const Seg& s, double xmin, double xmax, double ymin,
                  double ymax) {
  return s.xmax >= xmin && xmax >= s.xmin && s.ymax >= ymin &&
         ymax >= s.ymin;
}

}  // namespace

FlowSample empirical_flow(std::span<const SpatialSnapshot> snapshots,
                          const RateFunction& rate, double segment_length,
                          int segments, uint64_t seed) {
  FlowSample out;
  if (snapshots.empty()) return out;
  if (segments < 1 || segment_length <= 0.0) {
    throw std::invalid_argument("empirical_flow: bad segment spec");
  }
  const double side = snapshots[0].side;
  const double range = snapshots[0].range;
  for (const auto& s : snapshots) {
    if (s.side != side || s.range != range) {
      throw std::invalid_argument("empirical_flow: mixed snapshot geometry");
    }
  }
  if (segment_length >= side) {
    throw std::invalid_argument("empirical_flow: segment longer than torus");
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> upos(0.0, side);
  std::uniform_real_distribution<double> uang(0.0, 2.0 * kPi);
  std::vector<Seg> probes;
  probes.reserve(static_cast<size_t>(segments));
  for (int i = 0; i < segments; ++i) {
    double cx = upos(rng);
    double cy = upos(rng);
    double ang = uang(rng);
    Vec2 h{0.5 * segment_length * std::cos(ang),
           0.5 * segment_length * std::sin(ang)};
    probes.push_back(make_seg({cx - h.x, cy - h.y}, {cx + h.x, cy + h.y}));
  }

  std::vector<double> per_snapshot;
  per_snapshot.reserve(snapshots.size());
  const double total_len = segment_length * segments;
  long crossings = 0;

  for (const auto& snap : snapshots) {
    double flow = 0.0;
    const auto& peers = snap.peers;
    for (size_t i = 0; i < peers.size(); ++i) {
      for (size_t j = i + 1; j < peers.size(); ++j) {
        Vec2 delta = torus_delta(peers[i].pos, peers[j].pos, side);
        double d = std::hypot(delta.x, delta.y);
        if (d > range || d == 0.0) continue;
        int directions =
            (peers[i].seeder ? 0 : 1) + (peers[j].seeder ? 0 : 1);
        if (directions == 0) continue;
        Vec2 a = peers[i].pos;
        Vec2 b{a.x + delta.x, a.y + delta.y};
        double xmin = std::min(a.x, b.x), xmax = std::max(a.x, b.x);
        double ymin = std::min(a.y, b.y), ymax = std::max(a.y, b.y);
        // the chord may stick out of the box; test it shifted back in
        double xs[3] = {0.0, 0.0, 0.0};
        double ys[3] = {0.0, 0.0, 0.0};
        int nx = 1, ny = 1;
        if (xmax > side) xs[nx++] = -side;
        if (xmin < 0.0) xs[nx++] = side;
        if (ymax > side) ys[ny++] = -side;
        if (ymin < 0.0) ys[ny++] = side;
        for (int ix = 0; ix < nx; ++ix) {
          for (int iy = 0; iy < ny; ++iy) {
            Vec2 a2{a.x + xs[ix], a.y + ys[iy]};
            Vec2 b2{b.x + xs[ix], b.y + ys[iy]};
            for (const Seg& s : probes) {
              if (!bbox_overlap(s, xmin + xs[ix], xmax + xs[ix],
                                ymin + ys[iy], ymax + ys[iy])) {
                continue;
              }
              if (segments_cross(a2, b2, s.a, s.b)) {
                flow += directions * rate(d);
                ++crossings;
              }
            }
          }
        }
      }
    }
    per_snapshot.push_back(flow / total_len);
  }

  double sum = 0.0;
  for (double v : per_snapshot) sum += v;
  out.psi_emp = sum / static_cast<double>(per_snapshot.size());
  if (per_snapshot.size() > 1) {
    double ss = 0.0;
    for (double v : per_snapshot) {
      ss += (v - out.psi_emp) * (v - out.psi_emp);
    }
    out.se = std::sqrt(ss / (static_cast<double>(per_snapshot.size()) *
                             (static_cast<double>(per_snapshot.size()) - 1)));
  }
  out.crossings = crossings;
  out.length_sampled = total_len * static_cast<double>(snapshots.size());
  return out;
}

}  // namespace swarm
