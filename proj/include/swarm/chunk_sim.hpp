#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "swarm/geometry.hpp"
#include "swarm/params.hpp"
#include "swarm/spatial_sim.hpp"

namespace swarm {

// Fixed-step simulator that tracks which pieces of the file each peer holds
// and lets downloaders pick pieces rarest-first among their neighbors.
//
// Two matching modes:
//   OneToOne  - a downloader pairs distinct wanted pieces with distinct
//               uploading neighbors, one uploader per piece. A transfer
//               persists until the piece completes or the uploader leaves;
//               spare neighbors take on new pieces each step.
//   ManyToOne - rebuilt every step: the rarest wanted piece claims every
//               idle neighbor that has it, then the next rarest claims from
//               the rest, so each useful neighbor uploads on its full link.
enum class MatchMode { OneToOne, ManyToOne };

struct ChunkSimConfig {
  SystemParams params;
  int chunks = 16;
  MatchMode mode = MatchMode::OneToOne;
  // Seed servers provide this fraction of the arriving demand lambda*F as a
  // fallback for peers that found nothing to download this step.
  double server_chi = 0.01;
  uint64_t seed = 1;
  double horizon = 0.0;          // 0: derived from target_departures
  double warmup = 0.0;           // 0: several predicted sojourn times
  long target_departures = 20000;
  InitialState init = InitialState::FluidPoisson;
  int audit_every = 0;    // testing hook: recompute copy counts brute force
  int sample_every = 0;   // steps between copy-count samples (0: auto)
  bool keep_final_snapshot = false;
};

// Position plus piece ownership for one peer, for offline re-analysis.
struct ChunkSnapshot {
  double side = 0.0;
  double range = 0.0;
  struct Entry {
    Vec2 pos;
    std::vector<uint64_t> have;  // bitset over pieces
  };
  int chunks = 0;
  std::vector<Entry> peers;
};

struct ChunkSimStats {
  double w_f = 0.0;
  double n_f = 0.0;
  double chi = 0.0;
  double dt = 0.0;
  long steps = 0;
  long arrivals = 0;
  long departures = 0;

  double w_emp = 0.0;
  double w_se = 0.0;
  double w_ci_half = 0.0;
  double eta_emp = 0.0;   // w_f / w_emp
  double eta_se = 0.0;
  double beta_emp = 0.0;

  // Mean number of neighbor copies, averaged over peers and sample times,
  // split by whether the peer already holds the piece.
  double possessed_mean_copies = 0.0;
  double missing_mean_copies = 0.0;
  // fraction of leechers holding k pieces, k = 0..chunks (the last bin is
  // peers sampled in the instant between finishing and leaving)
  std::vector<double> class_density;
  double server_bytes_fraction = 0.0;
  double max_count_audit_error = 0.0;

  std::vector<double> latency_samples;
  ChunkSnapshot final_snapshot;  // filled when keep_final_snapshot is set
};

ChunkSimStats run_chunks(const ChunkSimConfig& cfg);

// Picks uniformly among the wanted pieces of minimum nonzero count, i.e.
// rarest-first over what the neighborhood can actually serve. Returns -1
// when no wanted piece has a copy nearby.
int rarest_first_choice(std::span<const uint16_t> counts,
                        std::span<const uint8_t> wanted, std::mt19937_64& rng);

// Recomputes the possessed/missing mean copy counts of a snapshot from
// scratch, independently of the incremental bookkeeping in the simulator.
// A mean is absent when its side has nothing to count: no (peer, piece)
// pairs on that side, or fewer than two peers so no neighborhood exists.
struct CopyCountStats {
  std::optional<double> possessed_mean;
  std::optional<double> missing_mean;
};
CopyCountStats copy_count_stats(const ChunkSnapshot& snap);

}  // namespace swarm
