#include "swarm/spatial_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <random>
#include <set>
#include <stdexcept>

#include "swarm/fluid.hpp"
#include "swarm/stats.hpp"

namespace swarm {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();

enum class EventKind : uint8_t { Departure = 0, SeederExpiry = 1, Abandon = 2 };

struct HeapEntry {
  double time;
  uint32_t id;
  uint32_t epoch;
  EventKind kind;
};

struct HeapLater {
  bool operator()(const HeapEntry& a, const HeapEntry& b) const {
    if (a.time != b.time) return a.time > b.time;
    if (a.kind != b.kind) return a.kind > b.kind;
    return a.id > b.id;
  }
};

struct DegEdge {
  uint32_t id;
  double dist;
  uint8_t flags;  // bit0: we selected them, bit1: they selected us
};

struct Peer {
  Vec2 pos;
  double remaining = 0.0;
  double rate = 0.0;
  double synced_at = 0.0;
  double arrival = 0.0;
  double abandon_at = kInf;
  uint32_t id = 0;
  uint32_t epoch = 0;
  int32_t cell = -1;
  bool seeder = false;
  bool from_init = false;
  bool alive = false;
  // degree mode
  std::vector<std::pair<double, uint32_t>> lnn;  // (dist, id), ascending
  std::vector<DegEdge> edges;                    // sorted by id
};

// Uniform bucket grid over the torus. Cell size is at least one interaction
// radius so a 3x3 block covers a range query.
class Grid {
 public:
  void reset(double side, double cell_target) {
    side_ = side;
    n_ = std::max(1, static_cast<int>(std::floor(side / cell_target)));
    cells_.assign(static_cast<size_t>(n_) * n_, {});
  }
  int cell_of(Vec2 p) const {
    int cx = static_cast<int>(p.x / side_ * n_);
    int cy = static_cast<int>(p.y / side_ * n_);
    cx = std::clamp(cx, 0, n_ - 1);
    cy = std::clamp(cy, 0, n_ - 1);
    return cy * n_ + cx;
  }
  void insert(uint32_t slot, int cell) { cells_[cell].push_back(slot); }
  void remove(uint32_t slot, int cell) {
    auto& v = cells_[cell];
    v.erase(std::find(v.begin(), v.end(), slot));
  }
  int n() const { return n_; }
  double cell_size() const { return side_ / n_; }
  const std::vector<uint32_t>& cell(int idx) const { return cells_[idx]; }

  // Visits cells in a (2r+1)^2 block around `center` exactly once, in a
  // fixed row-major order; wraps on the torus.
  template <class F>
  void visit_block(int center, int radius, F&& f) const {
    int cx = center % n_, cy = center / n_;
    if (2 * radius + 1 >= n_) {
      for (const auto& c : cells_)
        for (uint32_t s : c) f(s);
      return;
    }
    for (int dy = -radius; dy <= radius; ++dy) {
      int y = cy + dy;
      if (y < 0) y += n_;
      if (y >= n_) y -= n_;
      for (int dx = -radius; dx <= radius; ++dx) {
        int x = cx + dx;
        if (x < 0) x += n_;
        if (x >= n_) x -= n_;
        for (uint32_t s : cells_[static_cast<size_t>(y) * n_ + x]) f(s);
      }
    }
  }

  // Visits only the ring at Chebyshev cell distance `radius`.
  template <class F>
  bool visit_ring(int center, int radius, F&& f) const {
    if (2 * radius + 1 >= n_) return false;  // caller should do a full scan
    int cx = center % n_, cy = center / n_;
    auto visit_cell = [&](int x, int y) {
      if (x < 0) x += n_;
      if (x >= n_) x -= n_;
      if (y < 0) y += n_;
      if (y >= n_) y -= n_;
      for (uint32_t s : cells_[static_cast<size_t>(y) * n_ + x]) f(s);
    };
    if (radius == 0) {
      visit_cell(cx, cy);
      return true;
    }
    for (int dx = -radius; dx <= radius; ++dx) {
      visit_cell(cx + dx, cy - radius);
      visit_cell(cx + dx, cy + radius);
    }
    for (int dy = -radius + 1; dy <= radius - 1; ++dy) {
      visit_cell(cx - radius, cy + dy);
      visit_cell(cx + radius, cy + dy);
    }
    return true;
  }

 private:
  double side_ = 1.0;
  int n_ = 1;
  std::vector<std::vector<uint32_t>> cells_;
};

class Engine {
 public:
  explicit Engine(const SimConfig& cfg) : cfg_(cfg) {
    validate();
    side_ = cfg_.params.side();
    area_ = side_ * side_;
    lambda_total_ = cfg_.params.lambda * area_;
    degree_mode_ = cfg_.policy.kind == NeighborPolicy::Kind::Degree;
    rng_.seed(cfg_.seed);
    predict();
    double cell_target = degree_mode_ ? pred_degree_range_ : *cfg_.params.range;
    grid_.reset(side_, std::min(cell_target, side_ / 3.0));
  }

  SimStats execute() {
    seed_initial_state();
    if (cfg_.discrete_dt > 0.0) {
      run_discrete();
    } else {
      run_event_driven();
    }
    return finish();
  }

 private:
  // ---- setup -----------------------------------------------------------

  void validate() const {
    cfg_.params.validate();
    if (cfg_.policy.kind == NeighborPolicy::Kind::Generic) {
      throw std::invalid_argument("simulation: generic policy not supported");
    }
    if (cfg_.policy.kind == NeighborPolicy::Kind::Range) {
      if (!cfg_.params.range || std::isinf(*cfg_.params.range)) {
        throw std::invalid_argument("simulation: needs a finite range");
      }
    }
    if (!cfg_.params.torus_side) {
      throw std::invalid_argument("simulation: needs a torus side");
    }
    if (cfg_.ext.server_rate_density > 0.0) {
      throw std::invalid_argument(
          "simulation: the server extension is handled analytically and by "
          "the chunk simulator, not here");
    }
    if (cfg_.ext.access_upload_cap > 0.0) {
      throw std::invalid_argument(
          "simulation: the access cap is an analytic check, not a dynamic");
    }
    if (degree_conflict()) {
      throw std::invalid_argument(
          "simulation: seeding is not supported under the degree policy");
    }
    if (cfg_.discrete_dt > 0.0 &&
        cfg_.policy.kind != NeighborPolicy::Kind::Range) {
      throw std::invalid_argument(
          "simulation: fixed-step mode supports the range policy only");
    }
    if (cfg_.discrete_dt < 0.0 || cfg_.ext.seed_time < 0.0 ||
        cfg_.ext.abandonment_rate < 0.0) {
      throw std::invalid_argument("simulation: negative extension parameter");
    }
  }

  bool degree_conflict() const {
    return cfg_.policy.kind == NeighborPolicy::Kind::Degree &&
           cfg_.ext.seed_time > 0.0;
  }

  // Fills the predictions that size the run: w_f, n_f, the warmup target
  // and the initial density.
  void predict() {
    stats_.w_f = 0.0;
    beta_init_ = 0.0;
    w_pred_ = 0.0;
    if (cfg_.params.lambda <= 0.0) {
      warmup_ = cfg_.warmup;
      horizon_ = cfg_.horizon;
      return;
    }
    if (degree_mode_) {
      DegreeSolution d = degree_limited(cfg_.params, cfg_.policy.degree);
      stats_.w_f = d.w;
      stats_.n_f = static_cast<double>(cfg_.policy.degree);
      pred_degree_range_ = d.effective_range;
      beta_init_ = d.beta;
      w_pred_ = d.w * heuristic_m(stats_.n_f);
    } else {
      FluidSolution f = fluid_solution(cfg_.params);
      stats_.w_f = f.w_f;
      stats_.n_f = f.n_f;
      double m_factor = 1.0;
      if (std::holds_alternative<TcpLike>(cfg_.params.rate.variant())) {
        m_factor = heuristic_m(f.n_f);
      } else if (std::holds_alternative<ConstantRate>(
                     cfg_.params.rate.variant())) {
        m_factor = heuristic_m_constant_rate(f.n_f);
      }
      double w_base = f.w_f;
      if (cfg_.ext.seed_time > 0.0) {
        w_base = seeder_latency(cfg_.params, cfg_.ext.seed_time).w;
      }
      if (cfg_.ext.abandonment_rate > 0.0) {
        AbandonmentSolution a =
            abandonment(cfg_.params, cfg_.ext.abandonment_rate);
        w_base = a.w;
        abandon_frac_pred_ = a.abandon_fraction;
        beta_init_ = cfg_.params.lambda * cfg_.params.file_size /
                     (a.mu + cfg_.ext.abandonment_rate * cfg_.params.file_size);
      } else {
        beta_init_ = cfg_.params.lambda * w_base;
      }
      w_pred_ = m_factor * w_base;
    }
    stats_.w_predicted = w_pred_;
    warmup_ = cfg_.warmup > 0.0 ? cfg_.warmup : 5.0 * w_pred_;
    if (cfg_.horizon > 0.0) {
      horizon_ = cfg_.horizon;
    } else {
      double completion_rate =
          lambda_total_ * (1.0 - abandon_frac_pred_);
      horizon_ = warmup_ +
                 1.15 * static_cast<double>(cfg_.target_departures) /
                     completion_rate +
                 2.0 * w_pred_;
    }
    if (horizon_ < warmup_) horizon_ = warmup_;
  }

  double draw_size() {
    if (cfg_.params.size_dist == SizeDist::Constant) {
      return cfg_.params.file_size;
    }
    std::exponential_distribution<double> d(1.0 / cfg_.params.file_size);
    return d(rng_);
  }

  Vec2 draw_pos() {
    std::uniform_real_distribution<double> u(0.0, side_);
    double x = u(rng_);
    double y = u(rng_);
    return {x, y};
  }

  void seed_initial_state() {
    if (cfg_.init != InitialState::FluidPoisson || beta_init_ <= 0.0) return;
    std::poisson_distribution<long> pn(beta_init_ * area_);
    long n0 = pn(rng_);
    std::uniform_real_distribution<double> ufrac(0.0, 1.0);
    for (long i = 0; i < n0; ++i) {
      Vec2 pos = draw_pos();
      double size = draw_size();
      double rem = ufrac(rng_) * size;
      uint32_t slot = alloc_peer(pos, rem, /*from_init=*/true);
      if (cfg_.ext.abandonment_rate > 0.0) {
        std::exponential_distribution<double> e(cfg_.ext.abandonment_rate);
        peers_[slot].abandon_at = e(rng_);
      }
    }
    if (cfg_.ext.seed_time > 0.0) {
      std::poisson_distribution<long> ps(cfg_.params.lambda *
                                         cfg_.ext.seed_time * area_);
      long ns = ps(rng_);
      for (long i = 0; i < ns; ++i) {
        Vec2 pos = draw_pos();
        double expiry = ufrac(rng_) * cfg_.ext.seed_time;
        uint32_t slot = alloc_peer(pos, 0.0, true);
        peers_[slot].seeder = true;
        peers_[slot].abandon_at = expiry;  // doubles as expiry for seeders
        --leechers_;  // alloc counts it as a leecher
        events_.push({expiry, peers_[slot].id, 0, EventKind::SeederExpiry});
      }
    }
    // wire everything up in one pass
    if (degree_mode_) {
      for (uint32_t s = 0; s < peers_.size(); ++s) {
        if (peers_[s].alive) rebuild_lnn(s);
      }
      for (uint32_t s = 0; s < peers_.size(); ++s) {
        if (peers_[s].alive) refresh_degree_rate(s, 0.0);
      }
    } else {
      for (uint32_t s = 0; s < peers_.size(); ++s) {
        Peer& p = peers_[s];
        if (!p.alive || p.seeder) continue;
        double sum = 0.0;
        for_each_in_range(p.pos, [&](uint32_t q) {
          if (q == s) return;
          double d = torus_distance(p.pos, peers_[q].pos, side_);
          if (d <= *cfg_.params.range) sum += cfg_.params.rate(d);
        });
        p.rate = sum;
        schedule_departure(s, 0.0);
      }
    }
    for (uint32_t s = 0; s < peers_.size(); ++s) {
      Peer& p = peers_[s];
      if (p.alive && !p.seeder && p.abandon_at < kInf) {
        events_.push({p.abandon_at, p.id, 0, EventKind::Abandon});
      }
    }
  }

  // ---- peer bookkeeping -------------------------------------------------

  uint32_t alloc_peer(Vec2 pos, double remaining, bool from_init,
                      double arrival = 0.0) {
    uint32_t slot;
    if (!free_slots_.empty()) {
      slot = free_slots_.back();
      free_slots_.pop_back();
    } else {
      slot = static_cast<uint32_t>(peers_.size());
      peers_.emplace_back();
    }
    Peer& p = peers_[slot];
    p = Peer{};
    p.pos = pos;
    p.remaining = remaining;
    p.arrival = arrival;
    p.synced_at = arrival;
    p.id = next_id_++;
    p.alive = true;
    p.from_init = from_init;
    slot_of_.push_back(static_cast<int32_t>(slot));
    p.cell = grid_.cell_of(pos);
    grid_.insert(slot, p.cell);
    ++leechers_;
    if (degree_mode_) ++unfilled_;  // balanced by the first rebuild_lnn
    return slot;
  }

  void release_peer(uint32_t slot) {
    Peer& p = peers_[slot];
    grid_.remove(slot, p.cell);
    slot_of_[p.id] = -1;
    if (!p.seeder) --leechers_;
    p.alive = false;
    p.lnn.clear();
    p.edges.clear();
    free_slots_.push_back(slot);
  }

  void sync(uint32_t slot, double t) {
    Peer& p = peers_[slot];
    if (p.seeder) return;
    p.remaining -= p.rate * (t - p.synced_at);
    p.synced_at = t;
  }

  void schedule_departure(uint32_t slot, double now) {
    Peer& p = peers_[slot];
    ++p.epoch;
    if (p.seeder) return;
    if (cfg_.discrete_dt > 0.0) return;  // fixed-step mode polls instead
    if (p.rate <= rate_floor_) return;  // waits for a neighbor
    double when = now + std::max(p.remaining, 0.0) / p.rate;
    events_.push({when, p.id, p.epoch, EventKind::Departure});
  }

  template <class F>
  void for_each_in_range(Vec2 pos, F&& f) const {
    grid_.visit_block(grid_.cell_of(pos), 1, f);
  }

  // ---- range-policy rate maintenance -------------------------------------

  void connect_arrival_range(uint32_t slot, double t) {
    Peer& p = peers_[slot];
    double sum = 0.0;
    for_each_in_range(p.pos, [&](uint32_t q) {
      if (q == slot) return;
      Peer& other = peers_[q];
      double d = torus_distance(p.pos, other.pos, side_);
      if (d > *cfg_.params.range) return;
      double f = cfg_.params.rate(d);
      sum += f;
      if (!other.seeder) {
        sync(q, t);
        other.rate += f;
        schedule_departure(q, t);
      }
    });
    p.rate = sum;
    schedule_departure(slot, t);
  }

  void disconnect_range(uint32_t slot, double t) {
    Peer& p = peers_[slot];
    for_each_in_range(p.pos, [&](uint32_t q) {
      if (q == slot) return;
      Peer& other = peers_[q];
      if (other.seeder) return;
      double d = torus_distance(p.pos, other.pos, side_);
      if (d > *cfg_.params.range) return;
      sync(q, t);
      other.rate -= cfg_.params.rate(d);
      if (other.rate < 0.0) other.rate = 0.0;
      schedule_departure(q, t);
    });
  }

  // ---- degree-policy neighbor maintenance --------------------------------

  // Full L-nearest search around a peer via expanding grid rings.
  void compute_lnn(uint32_t slot,
                   std::vector<std::pair<double, uint32_t>>& out) const {
    const Peer& p = peers_[slot];
    out.clear();
    const int l = cfg_.policy.degree;
    int center = grid_.cell_of(p.pos);
    int max_ring = grid_.n();  // visit_ring reports when it cannot ring-scan
    auto consider = [&](uint32_t q) {
      if (q == slot) return;
      double d = torus_distance(p.pos, peers_[q].pos, side_);
      out.emplace_back(d, peers_[q].id);
    };
    bool ringable = true;
    for (int ring = 0; ring <= max_ring && ringable; ++ring) {
      ringable = grid_.visit_ring(center, ring, consider);
      if (!ringable) break;
      if (static_cast<int>(out.size()) >= l && ring >= 1) {
        // the l-th best so far cannot be beaten once the next ring's
        // closest possible point is farther away
        std::nth_element(out.begin(), out.begin() + (l - 1), out.end());
        double worst = out[l - 1].first;
        if ((ring)*grid_.cell_size() > worst) break;
      }
    }
    if (!ringable) {
      out.clear();
      for (uint32_t q = 0; q < peers_.size(); ++q) {
        if (peers_[q].alive) consider(q);
      }
    }
    std::sort(out.begin(), out.end());
    if (static_cast<int>(out.size()) > l) out.resize(l);
  }

  static std::vector<DegEdge>::iterator edge_slot(std::vector<DegEdge>& v,
                                                  uint32_t id) {
    return std::lower_bound(
        v.begin(), v.end(), id,
        [](const DegEdge& e, uint32_t i) { return e.id < i; });
  }

  void set_edge_flag(uint32_t slot, uint32_t other_id, double dist,
                     uint8_t bit) {
    auto& v = peers_[slot].edges;
    auto it = edge_slot(v, other_id);
    if (it == v.end() || it->id != other_id) {
      v.insert(it, DegEdge{other_id, dist, bit});
    } else {
      it->flags |= bit;
    }
  }

  void clear_edge_flag(uint32_t slot, uint32_t other_id, uint8_t bit) {
    auto& v = peers_[slot].edges;
    auto it = edge_slot(v, other_id);
    if (it == v.end() || it->id != other_id) return;
    it->flags &= static_cast<uint8_t>(~bit);
    if (it->flags == 0) v.erase(it);
  }

  // Records that `slot` selects `target` as one of its L nearest.
  void add_selection(uint32_t slot, uint32_t target_slot, double dist) {
    set_edge_flag(slot, peers_[target_slot].id, dist, 1);
    set_edge_flag(target_slot, peers_[slot].id, dist, 2);
  }

  void drop_selection(uint32_t slot, uint32_t target_slot) {
    clear_edge_flag(slot, peers_[target_slot].id, 1);
    clear_edge_flag(target_slot, peers_[slot].id, 2);
  }

  void lnn_radius_insert(const Peer& p) {
    if (static_cast<int>(p.lnn.size()) == cfg_.policy.degree) {
      lnn_radii_.insert(p.lnn.back().first);
    } else {
      ++unfilled_;
    }
  }

  void lnn_radius_erase(const Peer& p) {
    if (static_cast<int>(p.lnn.size()) == cfg_.policy.degree) {
      auto it = lnn_radii_.find(p.lnn.back().first);
      lnn_radii_.erase(it);
    } else {
      --unfilled_;
    }
  }

  // Replaces the stored lnn of `slot` with a fresh search and reconciles
  // selection edges; touched counterparties are appended to affected_.
  void rebuild_lnn(uint32_t slot) {
    Peer& p = peers_[slot];
    lnn_radius_erase(p);
    std::vector<std::pair<double, uint32_t>> fresh;
    compute_lnn(slot, fresh);
    // drop selections that disappeared, add the new ones
    for (const auto& [d, id] : p.lnn) {
      bool still = false;
      for (const auto& [nd, nid] : fresh) {
        if (nid == id) {
          still = true;
          break;
        }
      }
      if (!still && slot_of_[id] >= 0) {
        drop_selection(slot, static_cast<uint32_t>(slot_of_[id]));
        affected_.push_back(static_cast<uint32_t>(slot_of_[id]));
      }
    }
    for (const auto& [d, id] : fresh) {
      bool had = false;
      for (const auto& [od, oid] : p.lnn) {
        if (oid == id) {
          had = true;
          break;
        }
      }
      if (!had) {
        add_selection(slot, static_cast<uint32_t>(slot_of_[id]), d);
        affected_.push_back(static_cast<uint32_t>(slot_of_[id]));
      }
    }
    p.lnn = std::move(fresh);
    lnn_radius_insert(p);
    affected_.push_back(slot);
  }

  // Download rate from the symmetric edge set (either side selected the
  // other), recomputed from scratch for drift-free determinism.
  void refresh_degree_rate(uint32_t slot, double t) {
    Peer& p = peers_[slot];
    if (!p.alive) return;
    sync(slot, t);
    double sum = 0.0;
    for (const DegEdge& e : p.edges) sum += cfg_.params.rate(e.dist);
    p.rate = sum;
    schedule_departure(slot, t);
  }

  void degree_arrival(uint32_t slot, double t) {
    Peer& p = peers_[slot];
    affected_.clear();
    rebuild_lnn(slot);
    // peers that may now prefer the newcomer
    double reach = unfilled_ > 0
                       ? kInf
                       : (lnn_radii_.empty() ? 0.0 : *lnn_radii_.rbegin());
    auto maybe_adopt = [&](uint32_t y) {
      if (y == slot) return;
      Peer& q = peers_[y];
      double d = torus_distance(p.pos, q.pos, side_);
      if (std::binary_search(q.lnn.begin(), q.lnn.end(),
                             std::make_pair(d, p.id))) {
        return;  // already adopted (ring fallback can revisit)
      }
      bool qualifies = static_cast<int>(q.lnn.size()) < cfg_.policy.degree;
      if (!qualifies && !q.lnn.empty()) {
        auto worst = q.lnn.back();
        qualifies = std::make_pair(d, p.id) < worst;
      }
      if (!qualifies) return;
      lnn_radius_erase(q);
      q.lnn.insert(std::upper_bound(q.lnn.begin(), q.lnn.end(),
                                    std::make_pair(d, p.id)),
                   {d, p.id});
      if (static_cast<int>(q.lnn.size()) > cfg_.policy.degree) {
        auto evicted = q.lnn.back();
        q.lnn.pop_back();
        if (slot_of_[evicted.second] >= 0) {
          drop_selection(y, static_cast<uint32_t>(slot_of_[evicted.second]));
          affected_.push_back(
              static_cast<uint32_t>(slot_of_[evicted.second]));
        }
      }
      lnn_radius_insert(q);
      add_selection(y, slot, d);
      affected_.push_back(y);
      affected_.push_back(slot);
    };
    if (std::isinf(reach)) {
      for (uint32_t y = 0; y < peers_.size(); ++y) {
        if (peers_[y].alive) maybe_adopt(y);
      }
    } else {
      int rings = static_cast<int>(reach / grid_.cell_size()) + 2;
      bool ringable = true;
      for (int ring = 0; ring <= rings && ringable; ++ring) {
        ringable = grid_.visit_ring(grid_.cell_of(p.pos), ring, maybe_adopt);
      }
      if (!ringable) {
        for (uint32_t y = 0; y < peers_.size(); ++y) {
          if (peers_[y].alive && y != slot) maybe_adopt(y);
        }
      }
    }
    finish_affected(t);
  }

  void degree_departure_cleanup(uint32_t slot, double t) {
    Peer& p = peers_[slot];
    affected_.clear();
    lnn_radius_erase(p);
    // counterparties: anyone sharing an edge with p
    std::vector<std::pair<uint32_t, uint8_t>> partners;
    partners.reserve(p.edges.size());
    for (const DegEdge& e : p.edges) {
      if (slot_of_[e.id] >= 0) {
        partners.emplace_back(static_cast<uint32_t>(slot_of_[e.id]), e.flags);
      }
    }
    // detach p entirely before rebuilding anyone
    for (auto [y, flags] : partners) {
      clear_edge_flag(y, p.id, 1);
      clear_edge_flag(y, p.id, 2);
    }
    p.edges.clear();
    grid_.remove(slot, p.cell);
    slot_of_[p.id] = -1;
    if (!p.seeder) --leechers_;
    p.alive = false;
    for (auto [y, flags] : partners) {
      if (flags & 2) {
        // they selected p; their lnn needs a replacement member
        Peer& q = peers_[y];
        lnn_radius_erase(q);
        for (size_t i = 0; i < q.lnn.size(); ++i) {
          if (q.lnn[i].second == p.id) {
            q.lnn.erase(q.lnn.begin() + i);
            break;
          }
        }
        lnn_radius_insert(q);
        rebuild_lnn(y);
      } else {
        affected_.push_back(y);
      }
    }
    p.lnn.clear();
    free_slots_.push_back(slot);
    finish_affected(t);
  }

  void finish_affected(double t) {
    std::sort(affected_.begin(), affected_.end());
    affected_.erase(std::unique(affected_.begin(), affected_.end()),
                    affected_.end());
    for (uint32_t s : affected_) refresh_degree_rate(s, t);
    affected_.clear();
  }

  // ---- event loop ---------------------------------------------------------

  void process_arrival(double t) {
    Vec2 pos = draw_pos();
    double size = draw_size();
    uint32_t slot = alloc_peer(pos, size, /*from_init=*/false, t);
    Peer& p = peers_[slot];
    if (cfg_.ext.abandonment_rate > 0.0) {
      std::exponential_distribution<double> e(cfg_.ext.abandonment_rate);
      p.abandon_at = t + e(rng_);
      events_.push({p.abandon_at, p.id, 0, EventKind::Abandon});
    }
    ++stats_.arrivals;
    if (degree_mode_) {
      degree_arrival(slot, t);
    } else {
      connect_arrival_range(slot, t);
    }
  }

  void complete_download(uint32_t slot, double t) {
    Peer& p = peers_[slot];
    sync(slot, t);
    if (t >= warmup_ && !p.from_init) {
      ++stats_.departures;
      stats_.latency_samples.push_back(t - p.arrival);
    }
    if (cfg_.ext.seed_time > 0.0) {
      // keeps uploading in place; neighbors notice nothing
      p.seeder = true;
      ++p.epoch;
      --leechers_;
      p.abandon_at = t + cfg_.ext.seed_time;  // doubles as expiry
      events_.push({p.abandon_at, p.id, 0, EventKind::SeederExpiry});
      return;
    }
    if (degree_mode_) {
      degree_departure_cleanup(slot, t);
    } else {
      disconnect_range(slot, t);
      release_peer(slot);
    }
  }

  void remove_abandoner(uint32_t slot, double t) {
    if (t >= warmup_) ++stats_.abandonments;
    if (degree_mode_) {
      degree_departure_cleanup(slot, t);
    } else {
      disconnect_range(slot, t);
      release_peer(slot);
    }
  }

  void expire_seeder(uint32_t slot, double t) {
    if (degree_mode_) return;  // unreachable; validated out
    disconnect_range(slot, t);
    release_peer(slot);
  }

  void accumulate_beta(double upto) {
    if (upto <= warmup_ || clock_ >= horizon_) {
      clock_ = std::min(upto, horizon_);
      return;
    }
    double from = std::max(clock_, warmup_);
    double to = std::min(upto, horizon_);
    if (to > from) beta_time_ += leechers_ * (to - from);
    clock_ = upto;
  }

  void maybe_snapshot(double next_event_time) {
    while (snapshots_taken_ < cfg_.snapshot_count &&
           next_snapshot_time() <= next_event_time &&
           next_snapshot_time() <= horizon_) {
      SpatialSnapshot s;
      s.time = next_snapshot_time();
      s.side = side_;
      s.range = cfg_.params.range ? *cfg_.params.range : pred_degree_range_;
      for (const Peer& p : peers_) {
        if (p.alive) s.peers.push_back({p.pos, p.seeder, p.rate});
      }
      stats_.snapshots.push_back(std::move(s));
      ++snapshots_taken_;
    }
  }

  double next_snapshot_time() const {
    double span = horizon_ - warmup_;
    return warmup_ +
           (snapshots_taken_ + 0.5) * span / std::max(cfg_.snapshot_count, 1);
  }

  void run_event_driven() {
    double next_arrival = kInf;
    if (lambda_total_ > 0.0) {
      std::exponential_distribution<double> e(lambda_total_);
      next_arrival = e(rng_);
    }
    long processed = 0;
    while (true) {
      // discard stale heap entries
      while (!events_.empty()) {
        const HeapEntry& top = events_.top();
        int32_t slot = top.id < slot_of_.size() ? slot_of_[top.id] : -1;
        bool stale = slot < 0;
        if (!stale) {
          const Peer& p = peers_[static_cast<uint32_t>(slot)];
          switch (top.kind) {
            case EventKind::Departure:
              stale = p.seeder || top.epoch != p.epoch;
              break;
            case EventKind::SeederExpiry:
              stale = !p.seeder;
              break;
            case EventKind::Abandon:
              stale = p.seeder;
              break;
          }
        }
        if (stale) {
          events_.pop();
        } else {
          break;
        }
      }
      double te = events_.empty() ? kInf : events_.top().time;
      double tnext = std::min(te, next_arrival);
      if (tnext > horizon_) {
        maybe_snapshot(horizon_);
        accumulate_beta(horizon_);
        break;
      }
      maybe_snapshot(tnext);
      accumulate_beta(tnext);
      if (next_arrival <= te) {
        double t = next_arrival;
        process_arrival(t);
        std::exponential_distribution<double> e(lambda_total_);
        next_arrival = t + e(rng_);
      } else {
        HeapEntry ev = events_.top();
        events_.pop();
        uint32_t slot = static_cast<uint32_t>(slot_of_[ev.id]);
        switch (ev.kind) {
          case EventKind::Departure:
            complete_download(slot, ev.time);
            break;
          case EventKind::SeederExpiry:
            expire_seeder(slot, ev.time);
            break;
          case EventKind::Abandon:
            remove_abandoner(slot, ev.time);
            break;
        }
      }
      ++processed;
      if (cfg_.audit_every > 0 && processed % cfg_.audit_every == 0) {
        audit_rates();
      }
    }
  }

  void run_discrete() {
    const double dt = cfg_.discrete_dt;
    double next_arrival = kInf;
    if (lambda_total_ > 0.0) {
      std::exponential_distribution<double> e(lambda_total_);
      next_arrival = e(rng_);
    }
    double t = 0.0;
    std::vector<uint32_t> done;
    while (t < horizon_) {
      double t_end = std::min(t + dt, horizon_);
      while (next_arrival <= t_end) {
        process_arrival(next_arrival);
        std::exponential_distribution<double> e(lambda_total_);
        next_arrival += e(rng_);
      }
      accumulate_beta(t_end);
      // integrate this step
      for (uint32_t s = 0; s < peers_.size(); ++s) {
        Peer& p = peers_[s];
        if (!p.alive || p.seeder) continue;
        p.remaining -= p.rate * (t_end - std::max(p.synced_at, t));
        p.synced_at = t_end;
      }
      done.clear();
      for (uint32_t s = 0; s < peers_.size(); ++s) {
        Peer& p = peers_[s];
        if (p.alive && !p.seeder && p.remaining <= 0.0) done.push_back(s);
      }
      for (uint32_t s : done) complete_download(s, t_end);
      done.clear();
      for (uint32_t s = 0; s < peers_.size(); ++s) {
        Peer& p = peers_[s];
        if (p.alive && !p.seeder && p.abandon_at <= t_end) done.push_back(s);
      }
      for (uint32_t s : done) remove_abandoner(s, t_end);
      done.clear();
      for (uint32_t s = 0; s < peers_.size(); ++s) {
        Peer& p = peers_[s];
        if (p.alive && p.seeder) {
          // expiry entries carry the time in the heap for the event mode;
          // here the deadline lives in abandon_at when seeding
          if (p.abandon_at <= t_end) done.push_back(s);
        }
      }
      for (uint32_t s : done) expire_seeder(s, t_end);
      maybe_snapshot(t_end);
      t = t_end;
    }
  }

  void audit_rates() {
    // first pass: recompute from scratch and find the rate scale, so an idle
    // peer whose maintained sum carries a few ulps of cancellation residue is
    // not judged against an arbitrary absolute floor
    std::vector<std::pair<uint32_t, double>> brutes;
    double rmax = 0.0;
    for (uint32_t s = 0; s < peers_.size(); ++s) {
      const Peer& p = peers_[s];
      if (!p.alive || p.seeder) continue;
      double brute = 0.0;
      if (degree_mode_) {
        for (const DegEdge& e : p.edges) brute += cfg_.params.rate(e.dist);
      } else {
        for (uint32_t q = 0; q < peers_.size(); ++q) {
          if (q == s || !peers_[q].alive) continue;
          double d = torus_distance(p.pos, peers_[q].pos, side_);
          if (d <= *cfg_.params.range) brute += cfg_.params.rate(d);
        }
      }
      brutes.emplace_back(s, brute);
      rmax = std::max({rmax, brute, peers_[s].rate});
    }
    for (const auto& [s, brute] : brutes) {
      double scale = std::max({brute, peers_[s].rate, 1e-9 * rmax, 1e-300});
      stats_.max_rate_audit_error =
          std::max(stats_.max_rate_audit_error,
                   std::abs(brute - peers_[s].rate) / scale);
    }
    if (degree_mode_) audit_degree_edges();
  }

  // Checks the maintained L-nearest sets against a brute-force pass.
  void audit_degree_edges() {
    const int l = cfg_.policy.degree;
    for (uint32_t s = 0; s < peers_.size(); ++s) {
      const Peer& p = peers_[s];
      if (!p.alive) continue;
      std::vector<std::pair<double, uint32_t>> all;
      for (uint32_t q = 0; q < peers_.size(); ++q) {
        if (q == s || !peers_[q].alive) continue;
        all.emplace_back(torus_distance(p.pos, peers_[q].pos, side_),
                         peers_[q].id);
      }
      std::sort(all.begin(), all.end());
      if (static_cast<int>(all.size()) > l) all.resize(l);
      if (all != p.lnn) stats_.max_rate_audit_error = 1.0;
    }
  }

  // ---- wrap-up ------------------------------------------------------------

  SimStats finish() {
    stats_.measured_time = std::max(horizon_ - warmup_, 0.0);
    if (!stats_.latency_samples.empty()) {
      stats_.w_emp = mean_of(stats_.latency_samples);
      BatchCI ci = batch_means_ci(stats_.latency_samples, 20);
      stats_.w_se = ci.se;
      stats_.w_ci_half = ci.half_width;
      if (stats_.w_f > 0.0) {
        stats_.m_emp = stats_.w_emp / stats_.w_f;
        stats_.m_se = stats_.w_se / stats_.w_f;
        stats_.m_ci_half = stats_.w_ci_half / stats_.w_f;
      }
    }
    if (stats_.measured_time > 0.0) {
      stats_.beta_emp = beta_time_ / (stats_.measured_time * area_);
    }
    if (stats_.beta_emp > 0.0 && stats_.w_emp > 0.0) {
      stats_.little_residual =
          std::abs(stats_.beta_emp - cfg_.params.lambda * stats_.w_emp) /
          stats_.beta_emp;
    }
    return std::move(stats_);
  }

  SimConfig cfg_;
  double side_ = 0.0, area_ = 0.0, lambda_total_ = 0.0;
  bool degree_mode_ = false;
  double pred_degree_range_ = 1.0;
  double beta_init_ = 0.0;
  double w_pred_ = 0.0;
  double abandon_frac_pred_ = 0.0;
  double warmup_ = 0.0, horizon_ = 0.0;
  double rate_floor_ = 0.0;

  std::vector<Peer> peers_;
  std::vector<int32_t> slot_of_;
  std::vector<uint32_t> free_slots_;
  uint32_t next_id_ = 0;
  long leechers_ = 0;
  Grid grid_;
  std::priority_queue<HeapEntry, std::vector<HeapEntry>, HeapLater> events_;
  std::mt19937_64 rng_;
  std::multiset<double> lnn_radii_;
  long unfilled_ = 0;
  std::vector<uint32_t> affected_;

  double clock_ = 0.0;
  double beta_time_ = 0.0;
  int snapshots_taken_ = 0;
  SimStats stats_;
};

}  // namespace

SimStats run(const SimConfig& cfg) { return Engine(cfg).execute(); }

MEstimate estimate_m(std::span<const double> sojourns, double w_f,
                     int batches) {
  if (!(w_f > 0.0)) throw std::invalid_argument("estimate_m: w_f <= 0");
  MEstimate out;
  if (sojourns.empty()) return out;
  BatchCI ci = batch_means_ci(sojourns, batches);
  out.m = mean_of(sojourns) / w_f;
  out.se = ci.se / w_f;
  out.ci_half = ci.half_width / w_f;
  return out;
}

double latency_distribution_check(const SimStats& stats) {
  return ks_exponential(stats.latency_samples, stats.w_emp);
}

}  // namespace swarm
