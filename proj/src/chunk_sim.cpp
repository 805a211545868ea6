#include "swarm/chunk_sim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "swarm/chunk_analytics.hpp"
#include "swarm/fluid.hpp"
#include "swarm/stats.hpp"

namespace swarm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// A live transfer. The uploader never moves and never loses pieces, so the
// cached rate stays valid for the life of the entry; the id catches slot
// reuse after the uploader departs.
struct ActiveDl {
  uint32_t uploader_slot = 0;
  uint32_t uploader_id = 0;
  int chunk = -1;
  double rate = 0.0;
};

struct CPeer {
  Vec2 pos;
  double arrival = 0.0;
  uint32_t id = 0;
  int cell = -1;
  int owned = 0;
  bool alive = false;
  bool from_init = false;
  std::vector<uint64_t> have;
  std::vector<uint64_t> flight;   // bit per piece with a transfer underway
  std::vector<double> progress;   // bytes accrued toward each piece
  std::vector<uint16_t> count;    // copies of each piece among neighbors
  std::vector<uint32_t> nbrs;     // peer slots within range
  std::vector<ActiveDl> active;   // one-to-one: one uploader per piece
};

bool has_piece(const CPeer& p, int c) {
  return (p.have[static_cast<size_t>(c) >> 6] >> (c & 63)) & 1u;
}

void set_piece(CPeer& p, int c) {
  p.have[static_cast<size_t>(c) >> 6] |= uint64_t{1} << (c & 63);
}

bool in_flight(const CPeer& p, int c) {
  return (p.flight[static_cast<size_t>(c) >> 6] >> (c & 63)) & 1u;
}

void set_flight(CPeer& p, int c) {
  p.flight[static_cast<size_t>(c) >> 6] |= uint64_t{1} << (c & 63);
}

void clear_flight(CPeer& p, int c) {
  p.flight[static_cast<size_t>(c) >> 6] &= ~(uint64_t{1} << (c & 63));
}

template <class F>
void for_each_piece(const std::vector<uint64_t>& have, F&& f) {
  for (size_t w = 0; w < have.size(); ++w) {
    uint64_t bits = have[w];
    while (bits) {
      int c = static_cast<int>(w * 64) + std::countr_zero(bits);
      bits &= bits - 1;
      f(c);
    }
  }
}

class ChunkEngine {
 public:
  explicit ChunkEngine(const ChunkSimConfig& cfg) : cfg_(cfg) {
    validate();
    k_ = cfg_.chunks;
    words_ = (static_cast<size_t>(k_) + 63) / 64;
    side_ = cfg_.params.side();
    area_ = side_ * side_;
    range_ = *cfg_.params.range;
    lambda_total_ = cfg_.params.lambda * area_;
    piece_size_ = cfg_.params.file_size / k_;
    rng_.seed(cfg_.seed);
    double typical = typical_range(cfg_.params.rate, range_);
    dt_ = piece_size_ / (10.0 * cfg_.params.rate(typical));
    ncell_ = std::max(3, static_cast<int>(std::floor(side_ / range_)));
    cells_.assign(static_cast<size_t>(ncell_) * ncell_, {});
    predict();
  }

  ChunkSimStats execute() {
    seed_initial_state();
    run_loop();
    return finish();
  }

 private:
  void validate() const {
    cfg_.params.validate();
    if (cfg_.chunks < 2) {
      throw std::invalid_argument("chunk simulation: needs at least 2 pieces");
    }
    if (cfg_.params.size_dist != SizeDist::Constant) {
      throw std::invalid_argument(
          "chunk simulation: the file size must be constant");
    }
    if (!cfg_.params.range || std::isinf(*cfg_.params.range)) {
      throw std::invalid_argument("chunk simulation: needs a finite range");
    }
    if (cfg_.server_chi < 0.0 || !std::isfinite(cfg_.server_chi)) {
      throw std::invalid_argument("chunk simulation: bad server_chi");
    }
  }

  void predict() {
    stats_.chi = cfg_.server_chi;
    stats_.dt = dt_;
    if (cfg_.params.lambda <= 0.0) {
      warmup_ = cfg_.warmup;
      horizon_ = cfg_.horizon;
      return;
    }
    FluidSolution f = fluid_solution(cfg_.params);
    stats_.w_f = f.w_f;
    stats_.n_f = f.n_f;
    double eta_pred;
    if (cfg_.mode == MatchMode::OneToOne) {
      eta_pred = eta_one_to_one_bound(k_, f.n_f).harmonic_mean;
    } else {
      eta_pred = eta_many_to_one(k_).harmonic_mean;
    }
    eta_pred = std::clamp(eta_pred, 0.1, 1.0);
    double w_pred = f.w_f / eta_pred;
    beta_init_ = cfg_.params.lambda * w_pred;
    warmup_ = cfg_.warmup > 0.0 ? cfg_.warmup : 5.0 * w_pred;
    if (cfg_.horizon > 0.0) {
      horizon_ = cfg_.horizon;
    } else {
      horizon_ = warmup_ +
                 1.15 * static_cast<double>(cfg_.target_departures) /
                     lambda_total_ +
                 2.0 * w_pred;
    }
    if (horizon_ < warmup_) horizon_ = warmup_;
  }

  int cell_of(Vec2 p) const {
    int cx = std::clamp(static_cast<int>(p.x / side_ * ncell_), 0, ncell_ - 1);
    int cy = std::clamp(static_cast<int>(p.y / side_ * ncell_), 0, ncell_ - 1);
    return cy * ncell_ + cx;
  }

  template <class F>
  void for_each_near(Vec2 pos, F&& f) const {
    int center = cell_of(pos);
    int cx = center % ncell_, cy = center / ncell_;
    for (int dy = -1; dy <= 1; ++dy) {
      int y = (cy + dy + ncell_) % ncell_;
      for (int dx = -1; dx <= 1; ++dx) {
        int x = (cx + dx + ncell_) % ncell_;
        for (uint32_t s : cells_[static_cast<size_t>(y) * ncell_ + x]) f(s);
      }
    }
  }

  uint32_t alloc(Vec2 pos, double when, bool from_init) {
    uint32_t slot;
    if (!free_slots_.empty()) {
      slot = free_slots_.back();
      free_slots_.pop_back();
    } else {
      slot = static_cast<uint32_t>(peers_.size());
      peers_.emplace_back();
    }
    CPeer& p = peers_[slot];
    p = CPeer{};
    p.pos = pos;
    p.arrival = when;
    p.id = next_id_++;
    p.alive = true;
    p.from_init = from_init;
    p.have.assign(words_, 0);
    p.flight.assign(words_, 0);
    p.progress.assign(static_cast<size_t>(k_), 0.0);
    p.count.assign(static_cast<size_t>(k_), 0);
    p.cell = cell_of(pos);
    cells_[p.cell].push_back(slot);
    ++alive_count_;
    return slot;
  }

  // Creates the peer and exchanges neighbor bookkeeping in both directions.
  uint32_t admit(Vec2 pos, double when, bool from_init) {
    uint32_t slot = alloc(pos, when, from_init);
    CPeer& p = peers_[slot];
    for_each_near(pos, [&](uint32_t q) {
      if (q == slot || !peers_[q].alive) return;
      CPeer& other = peers_[q];
      if (torus_distance(pos, other.pos, side_) > range_) return;
      p.nbrs.push_back(q);
      other.nbrs.push_back(slot);
      for_each_piece(other.have, [&](int c) { ++p.count[c]; });
      for_each_piece(p.have, [&](int c) { ++other.count[c]; });
    });
    return slot;
  }

  void remove(uint32_t slot) {
    CPeer& p = peers_[slot];
    for (uint32_t q : p.nbrs) {
      CPeer& other = peers_[q];
      auto it = std::find(other.nbrs.begin(), other.nbrs.end(), slot);
      *it = other.nbrs.back();
      other.nbrs.pop_back();
      for_each_piece(p.have, [&](int c) { --other.count[c]; });
    }
    auto& cell = cells_[p.cell];
    cell.erase(std::find(cell.begin(), cell.end(), slot));
    p.alive = false;
    p.nbrs.clear();
    p.have.clear();
    p.flight.clear();
    p.progress.clear();
    p.count.clear();
    p.active.clear();
    --alive_count_;
    free_slots_.push_back(slot);
  }

  void seed_initial_state() {
    if (lambda_total_ > 0.0) {
      std::exponential_distribution<double> e(lambda_total_);
      next_arrival_ = e(rng_);
    }
    if (cfg_.init != InitialState::FluidPoisson || beta_init_ <= 0.0) return;
    std::poisson_distribution<long> pn(beta_init_ * area_);
    long n0 = pn(rng_);
    std::uniform_real_distribution<double> u(0.0, side_);
    std::uniform_int_distribution<int> uclass(0, k_ - 1);
    std::vector<int> perm(static_cast<size_t>(k_));
    for (int c = 0; c < k_; ++c) perm[c] = c;
    for (long i = 0; i < n0; ++i) {
      Vec2 pos{u(rng_), u(rng_)};
      int cls = uclass(rng_);
      // uniform subset of `cls` pieces
      for (int j = 0; j < cls; ++j) {
        std::uniform_int_distribution<int> pick(j, k_ - 1);
        std::swap(perm[j], perm[pick(rng_)]);
      }
      uint32_t slot = admit(pos, 0.0, true);
      CPeer& p = peers_[slot];
      for (int j = 0; j < cls; ++j) set_piece(p, perm[j]);
      p.owned = cls;
      for (uint32_t q : p.nbrs) {
        for (int j = 0; j < cls; ++j) ++peers_[q].count[perm[j]];
      }
    }
  }

  void run_loop() {
    const double f_dt = dt_;
    long sample_every = cfg_.sample_every > 0 ? cfg_.sample_every : 0;
    if (sample_every == 0) {
      long total_steps =
          static_cast<long>(std::ceil((horizon_ - warmup_) / f_dt));
      sample_every = std::max<long>(1, total_steps / 256);
    }
    double t = 0.0;
    std::vector<uint32_t> order;
    std::vector<std::pair<uint32_t, int>> completions;
    std::vector<int> candidates;
    std::vector<uint32_t> unused;
    while (t < horizon_) {
      double t_end = std::min(t + f_dt, horizon_);
      while (next_arrival_ <= t) {
        std::uniform_real_distribution<double> u(0.0, side_);
        double x = u(rng_);
        double y = u(rng_);
        admit({x, y}, t, false);
        ++stats_.arrivals;
        std::exponential_distribution<double> e(lambda_total_);
        next_arrival_ += e(rng_);
      }
      order.clear();
      for (uint32_t s = 0; s < peers_.size(); ++s) {
        if (peers_[s].alive) order.push_back(s);
      }
      std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
        return peers_[a].id < peers_[b].id;
      });
      completions.clear();
      double server_rate =
          alive_count_ > 0
              ? cfg_.server_chi * cfg_.params.lambda * cfg_.params.file_size *
                    area_ / static_cast<double>(alive_count_)
              : 0.0;

      if (mark_.size() < peers_.size()) mark_.resize(peers_.size(), 0);

      for (uint32_t s : order) {
        CPeer& p = peers_[s];
        bool assigned_any = false;
        if (cfg_.mode == MatchMode::OneToOne) {
          // Established transfers persist until the uploader departs; only
          // the spare neighbors take on new pieces below.
          for (size_t i = 0; i < p.active.size();) {
            const ActiveDl& a = p.active[i];
            const CPeer& up = peers_[a.uploader_slot];
            if (!up.alive || up.id != a.uploader_id) {
              clear_flight(p, a.chunk);
              p.active[i] = p.active.back();
              p.active.pop_back();
              continue;
            }
            accrue(s, a.chunk, a.rate * (t_end - t), completions);
            ++i;
          }
          if (p.active.size() < p.nbrs.size()) {
            candidates.clear();
            for (int c = 0; c < k_; ++c) {
              if (!has_piece(p, c) && !in_flight(p, c) && p.count[c] > 0) {
                candidates.push_back(c);
              }
            }
            if (!candidates.empty()) {
              ++mark_stamp_;
              for (const ActiveDl& a : p.active) {
                mark_[a.uploader_slot] = mark_stamp_;
              }
              unused.clear();
              for (uint32_t q : p.nbrs) {
                if (mark_[q] != mark_stamp_) unused.push_back(q);
              }
              std::shuffle(candidates.begin(), candidates.end(), rng_);
              std::stable_sort(
                  candidates.begin(), candidates.end(),
                  [&](int a, int b) { return p.count[a] < p.count[b]; });
              for (int c : candidates) {
                if (unused.empty()) break;
                size_t n = unused.size();
                std::uniform_int_distribution<size_t> start(0, n - 1);
                size_t at = start(rng_);
                for (size_t step = 0; step < n; ++step) {
                  size_t i = at + step;
                  if (i >= n) i -= n;
                  uint32_t q = unused[i];
                  if (!has_piece(peers_[q], c)) continue;
                  if (in_flight(p, c)) {
                    throw std::logic_error(
                        "chunk simulation: duplicate piece assignment");
                  }
                  double rate = cfg_.params.rate(
                      torus_distance(p.pos, peers_[q].pos, side_));
                  set_flight(p, c);
                  p.active.push_back({q, peers_[q].id, c, rate});
                  accrue(s, c, rate * (t_end - t), completions);
                  unused[i] = unused.back();
                  unused.pop_back();
                  break;
                }
              }
            }
          }
          assigned_any = !p.active.empty();
        } else if (!p.nbrs.empty()) {
          candidates.clear();
          for (int c = 0; c < k_; ++c) {
            if (!has_piece(p, c) && p.count[c] > 0) candidates.push_back(c);
          }
          if (!candidates.empty()) {
            std::shuffle(candidates.begin(), candidates.end(), rng_);
            std::stable_sort(
                candidates.begin(), candidates.end(),
                [&](int a, int b) { return p.count[a] < p.count[b]; });
            unused = p.nbrs;
            for (int c : candidates) {
              if (unused.empty()) break;
              double rate = 0.0;
              for (size_t i = 0; i < unused.size();) {
                uint32_t q = unused[i];
                if (has_piece(peers_[q], c)) {
                  rate += cfg_.params.rate(
                      torus_distance(p.pos, peers_[q].pos, side_));
                  unused[i] = unused.back();
                  unused.pop_back();
                } else {
                  ++i;
                }
              }
              if (rate > 0.0) {
                accrue(s, c, rate * (t_end - t), completions);
                assigned_any = true;
              }
            }
          }
        }
        if (!assigned_any && server_rate > 0.0 && p.owned < k_) {
          // Stalled: nothing wanted within range. A server ships one missing
          // piece, picked uniformly since local counts carry no signal here.
          int c = -1;
          uint64_t seen = 0;
          for (int j = 0; j < k_; ++j) {
            if (has_piece(p, j)) continue;
            ++seen;
            if (seen == 1 ||
                std::uniform_int_distribution<uint64_t>(0, seen - 1)(rng_) == 0)
              c = j;
          }
          if (c >= 0) {
            double amount = server_rate * (t_end - t);
            server_bytes_ += amount;
            accrue(s, c, amount, completions);
          }
        }
      }

      for (auto [s, c] : completions) {
        CPeer& p = peers_[s];
        set_piece(p, c);
        p.progress[c] = 0.0;
        ++p.owned;
        if (cfg_.mode == MatchMode::OneToOne) {
          clear_flight(p, c);
          for (size_t i = 0; i < p.active.size(); ++i) {
            if (p.active[i].chunk == c) {
              p.active[i] = p.active.back();
              p.active.pop_back();
              break;
            }
          }
        }
        for (uint32_t q : p.nbrs) ++peers_[q].count[c];
      }
      for (auto [s, c] : completions) {
        CPeer& p = peers_[s];
        if (!p.alive || p.owned < k_) continue;
        if (t_end > warmup_ && !p.from_init) {
          ++stats_.departures;
          stats_.latency_samples.push_back(t_end - p.arrival);
        }
        remove(s);
      }

      ++stats_.steps;
      if (t_end > warmup_) {
        double from = std::max(t, warmup_);
        beta_time_ += alive_count_ * (t_end - from);
        measured_time_ += t_end - from;
        if (stats_.steps % sample_every == 0) sample_copy_counts();
      }
      if (cfg_.audit_every > 0 && stats_.steps % cfg_.audit_every == 0) {
        audit_counts();
      }
      t = t_end;
    }
  }

  void accrue(uint32_t slot, int c, double amount,
              std::vector<std::pair<uint32_t, int>>& completions) {
    CPeer& p = peers_[slot];
    total_bytes_ += amount;
    double before = p.progress[c];
    p.progress[c] = before + amount;
    if (before < piece_size_ && p.progress[c] >= piece_size_) {
      completions.emplace_back(slot, c);
    }
  }

  void sample_copy_counts() {
    if (class_hist_.empty()) {
      class_hist_.assign(static_cast<size_t>(k_) + 1, 0.0);
    }
    for (const CPeer& p : peers_) {
      if (!p.alive) continue;
      ++class_hist_[p.owned];
      for (int c = 0; c < k_; ++c) {
        if (has_piece(p, c)) {
          poss_sum_ += p.count[c];
          ++poss_n_;
        } else {
          miss_sum_ += p.count[c];
          ++miss_n_;
        }
      }
    }
  }

  void audit_counts() {
    for (uint32_t s = 0; s < peers_.size(); ++s) {
      const CPeer& p = peers_[s];
      if (!p.alive) continue;
      std::vector<uint16_t> fresh(static_cast<size_t>(k_), 0);
      for (uint32_t q = 0; q < peers_.size(); ++q) {
        if (q == s || !peers_[q].alive) continue;
        if (torus_distance(p.pos, peers_[q].pos, side_) > range_) continue;
        for_each_piece(peers_[q].have, [&](int c) { ++fresh[c]; });
      }
      int pop = 0;
      for (uint64_t w : p.have) pop += std::popcount(w);
      if (pop != p.owned) stats_.max_count_audit_error = 1.0;
      for (int c = 0; c < k_; ++c) {
        double diff = std::abs(static_cast<double>(fresh[c]) -
                               static_cast<double>(p.count[c]));
        stats_.max_count_audit_error =
            std::max(stats_.max_count_audit_error, diff);
      }
      if (cfg_.mode == MatchMode::OneToOne) audit_transfers(p);
    }
  }

  // One transfer per piece, one piece per uploader, and the flight bits in
  // lockstep with the transfer list. Entries whose uploader departed this
  // step are legal until the next prune, so only their shape is checked.
  void audit_transfers(const CPeer& p) {
    std::vector<uint8_t> chunk_seen(static_cast<size_t>(k_), 0);
    std::vector<uint32_t> ups;
    for (const ActiveDl& a : p.active) {
      bool bad = a.chunk < 0 || a.chunk >= k_ || chunk_seen[a.chunk] ||
                 has_piece(p, a.chunk) || !in_flight(p, a.chunk);
      const CPeer& up = peers_[a.uploader_slot];
      if (up.alive && up.id == a.uploader_id) {
        ups.push_back(a.uploader_slot);
        bad = bad || !has_piece(up, a.chunk) ||
              torus_distance(p.pos, up.pos, side_) > range_;
      }
      if (a.chunk >= 0 && a.chunk < k_) chunk_seen[a.chunk] = 1;
      if (bad) stats_.max_count_audit_error = 1.0;
    }
    std::sort(ups.begin(), ups.end());
    if (std::adjacent_find(ups.begin(), ups.end()) != ups.end()) {
      stats_.max_count_audit_error = 1.0;
    }
    int flights = 0;
    for (uint64_t w : p.flight) flights += std::popcount(w);
    if (flights != static_cast<int>(p.active.size())) {
      stats_.max_count_audit_error = 1.0;
    }
  }

  ChunkSimStats finish() {
    if (!stats_.latency_samples.empty()) {
      stats_.w_emp = mean_of(stats_.latency_samples);
      BatchCI ci = batch_means_ci(stats_.latency_samples, 20);
      stats_.w_se = ci.se;
      stats_.w_ci_half = ci.half_width;
      if (stats_.w_emp > 0.0 && stats_.w_f > 0.0) {
        stats_.eta_emp = stats_.w_f / stats_.w_emp;
        stats_.eta_se = stats_.eta_emp * (stats_.w_se / stats_.w_emp);
      }
    }
    if (measured_time_ > 0.0) {
      stats_.beta_emp = beta_time_ / (measured_time_ * area_);
    }
    if (poss_n_ > 0) stats_.possessed_mean_copies = poss_sum_ / poss_n_;
    if (miss_n_ > 0) stats_.missing_mean_copies = miss_sum_ / miss_n_;
    double hist_sum = 0.0;
    for (double h : class_hist_) hist_sum += h;
    if (hist_sum > 0.0) {
      stats_.class_density.resize(class_hist_.size());
      for (size_t i = 0; i < class_hist_.size(); ++i) {
        stats_.class_density[i] = class_hist_[i] / hist_sum;
      }
    }
    if (total_bytes_ > 0.0) {
      stats_.server_bytes_fraction = server_bytes_ / total_bytes_;
    }
    if (cfg_.keep_final_snapshot) {
      stats_.final_snapshot.side = side_;
      stats_.final_snapshot.range = range_;
      stats_.final_snapshot.chunks = k_;
      for (const CPeer& p : peers_) {
        if (p.alive) stats_.final_snapshot.peers.push_back({p.pos, p.have});
      }
    }
    return std::move(stats_);
  }

  ChunkSimConfig cfg_;
  int k_ = 0;
  size_t words_ = 0;
  double side_ = 0.0, area_ = 0.0, range_ = 0.0;
  double lambda_total_ = 0.0, piece_size_ = 0.0, dt_ = 0.0;
  double beta_init_ = 0.0, warmup_ = 0.0, horizon_ = 0.0;
  double next_arrival_ = kInf;

  std::vector<CPeer> peers_;
  std::vector<uint32_t> free_slots_;
  std::vector<uint64_t> mark_;  // per-slot stamps for busy-uploader filtering
  uint64_t mark_stamp_ = 0;
  std::vector<std::vector<uint32_t>> cells_;
  int ncell_ = 0;
  uint32_t next_id_ = 0;
  long alive_count_ = 0;
  std::mt19937_64 rng_;

  double beta_time_ = 0.0, measured_time_ = 0.0;
  double poss_sum_ = 0.0, miss_sum_ = 0.0;
  long poss_n_ = 0, miss_n_ = 0;
  std::vector<double> class_hist_;
  double server_bytes_ = 0.0, total_bytes_ = 0.0;
  ChunkSimStats stats_;
};

}  // namespace

ChunkSimStats run_chunks(const ChunkSimConfig& cfg) {
  return ChunkEngine(cfg).execute();
}

int rarest_first_choice(std::span<const uint16_t> counts,
                        std::span<const uint8_t> wanted,
                        std::mt19937_64& rng) {
  if (counts.size() != wanted.size()) {
    throw std::invalid_argument("rarest_first_choice: size mismatch");
  }
  int best = -1;
  uint16_t best_count = 0;
  uint64_t ties = 0;
  for (size_t c = 0; c < counts.size(); ++c) {
    if (!wanted[c] || counts[c] == 0) continue;
    if (best < 0 || counts[c] < best_count) {
      best = static_cast<int>(c);
      best_count = counts[c];
      ties = 1;
    } else if (counts[c] == best_count) {
      ++ties;
      std::uniform_int_distribution<uint64_t> pick(0, ties - 1);
      if (pick(rng) == 0) best = static_cast<int>(c);
    }
  }
  return best;
}

CopyCountStats copy_count_stats(const ChunkSnapshot& snap) {
  CopyCountStats out;
  const int k = snap.chunks;
  if (k <= 0) return out;
  // a lone peer has no neighborhood, so neither mean is a meaningful number
  if (snap.peers.size() < 2) return out;
  double poss_sum = 0.0, miss_sum = 0.0;
  long poss_n = 0, miss_n = 0;
  std::vector<uint16_t> counts(static_cast<size_t>(k));
  for (size_t i = 0; i < snap.peers.size(); ++i) {
    std::fill(counts.begin(), counts.end(), 0);
    for (size_t j = 0; j < snap.peers.size(); ++j) {
      if (i == j) continue;
      if (torus_distance(snap.peers[i].pos, snap.peers[j].pos, snap.side) >
          snap.range) {
        continue;
      }
      for_each_piece(snap.peers[j].have, [&](int c) { ++counts[c]; });
    }
    const auto& have = snap.peers[i].have;
    for (int c = 0; c < k; ++c) {
      bool owned = (have[static_cast<size_t>(c) >> 6] >> (c & 63)) & 1u;
      if (owned) {
        poss_sum += counts[c];
        ++poss_n;
      } else {
        miss_sum += counts[c];
        ++miss_n;
      }
    }
  }
  if (poss_n > 0) out.possessed_mean = poss_sum / poss_n;
  if (miss_n > 0) out.missing_mean = miss_sum / miss_n;
  return out;
}

}  // namespace swarm
