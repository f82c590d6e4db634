#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "traceback/alias_table.hpp"
#include "traceback/attack_model.hpp"
#include "traceback/random.hpp"
#include "traceback/simulators.hpp"

namespace traceback {

// Mark carried by one packet as received by the victim. Routers sit at
// distances n (attacker side) down to 1; the victim is at distance 0.
// An unmarked packet leaves every field absent (-1).
struct PacketMark {
  bool marked = false;
  std::int64_t start_router = -1;  // distance of the router that wrote the mark
  std::int64_t end_router = -1;    // distance of its victim-side neighbour
  std::int64_t distance = -1;      // hop counter carried in the mark
};

enum class PacketMode {
  kFaithful,  // executes the per-router mark/override/increment protocol
  kFast       // draws the mark index straight from the coupon distribution
};

// Walks the packet through routers at distances n, n-1, ..., 1. A router
// marks with probability p, resetting the counter; the first non-marking
// router after a mark records itself as the edge's near end; every
// non-marking router increments the counter. A mark written at distance i
// therefore arrives with counter i-1, and survives with probability
// p*(1-p)^(i-1).
template <class Rng>
inline PacketMark transmit_packet(const PathParameters& params, Rng& rng) {
  params.validate();
  const double p = params.marking_probability();
  const std::int64_t n = params.path_length;

  PacketMark mark;
  for (std::int64_t dist = n; dist >= 1; --dist) {
    if (uniform_open(rng) < p) {
      mark.marked = true;
      mark.start_router = dist;
      mark.end_router = -1;
      mark.distance = 0;
    } else if (mark.marked) {
      if (mark.distance == 0) mark.end_router = dist;
      ++mark.distance;
    }
  }
  // The victim completes a mark whose writer is its direct neighbour.
  if (mark.marked && mark.end_router < 0) mark.end_router = 0;
  return mark;
}

// Edges collected so far on the victim side.
struct ReconstructionState {
  explicit ReconstructionState(std::int64_t path_length)
      : collected(static_cast<std::size_t>(path_length) + 1, false),
        missing(path_length) {}

  void absorb(const PacketMark& mark) {
    ++packets_processed;
    if (!mark.marked) return;
    const std::int64_t edge = mark.distance + 1;  // == mark.start_router
    if (!collected[static_cast<std::size_t>(edge)]) {
      collected[static_cast<std::size_t>(edge)] = true;
      --missing;
    }
  }

  bool complete() const { return missing == 0; }

  std::vector<bool> collected;  // index 1..n
  std::int64_t missing = 0;
  std::int64_t packets_processed = 0;
};

// Feeds packets into the reconstruction state until every edge 1..n has been
// seen; returns the packet count. Distributed as the discrete draw count D.
template <class Rng>
inline std::int64_t run_reconstruction(const PathParameters& params, Rng& rng,
                                       PacketMode mode = PacketMode::kFaithful) {
  params.validate();
  ReconstructionState state(params.path_length);
  if (mode == PacketMode::kFaithful) {
    while (!state.complete()) state.absorb(transmit_packet(params, rng));
  } else {
    const CouponDistribution dist = build_distribution(params);
    const AliasTable table(dist.probabilities);
    while (!state.complete()) {
      const std::size_t type = table.sample(rng);
      PacketMark mark;
      if (type != 0) {
        mark.marked = true;
        mark.start_router = static_cast<std::int64_t>(type);
        mark.end_router = static_cast<std::int64_t>(type) - 1;
        mark.distance = static_cast<std::int64_t>(type) - 1;
      }
      state.absorb(mark);
    }
  }
  return state.packets_processed;
}

inline TrialSample simulate_packet_level(const PathParameters& params,
                                         std::int64_t trial_count,
                                         std::uint64_t seed, int workers = 0,
                                         PacketMode mode = PacketMode::kFaithful) {
  params.validate();
  auto trial = [params, mode](Xoshiro256pp& rng) {
    return static_cast<double>(run_reconstruction(params, rng, mode));
  };
  TrialSample sample{Model::kPacketLevel, params.path_length, params.lambda,
                     seed, trial_count, {}};
  sample.values = detail::run_trials(trial_count, seed, workers, trial);
  return sample;
}

}  // namespace traceback
