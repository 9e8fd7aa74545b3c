#pragma once

#include "swarmlab/network_state.hpp"
#include "swarmlab/rng.hpp"
#include "swarmlab/types.hpp"

namespace swarmlab {

// One push-contact about to happen: `revealed` is the pusher's revealed cache
// profile (possibly empty, or the full master file for the seed), aimed at a
// live peer of `target_swarm` holding `target_cache`.
struct PushContext {
    const NetworkState* state = nullptr;
    PieceSet revealed;      // what the pusher shows
    int target_swarm = 0;   // the receiving peer's swarm
    PieceSet target_cache;  // the receiving peer's cache
};

// Outcome of one transferable-set evaluation. `piece` is -1 when nothing is
// transferable; the flags classify the branch taken for the event counters.
struct Transfer {
    int piece = -1;
    bool rare = false;        // rare-piece branch (or below-max pick of the baselines)
    bool nonrare = false;     // non-rare piece accepted through the sharing factor
    bool suppressed = false;  // non-rare draw rejected by the sharing factor
    bool extra = false;       // extra piece outside the target's file
};

// Probability gate for replicating the non-rare piece `piece` into the target
// swarm. Standard variant: exp(-(mbar + d^alpha) / (beta K)), zero when
// beta = 0. Flash-crowd variant: exp(-(Delta_1/(beta L U)) (mbar + d) /
// min(K, |x|)), zero when beta = 0.
double sharing_factor(const PushContext& ctx, const NetworkParams& params,
                      const PolicyConfig& policy, int piece);

// Pieces of `candidates` attaining the minimum chunk count in `table`.
PieceSet argmin_chunk_count(const ChunkTable& table, const PieceSet& candidates);

// Selects at most one piece for transfer under the configured policy.
//
// Candidate sets, with W the target's file, F its downloadable set, S its
// cache, T the revealed profile and R the rare set (whole file when uniform):
//   H1 = (T & R) - S, H2 = (T & W) - S, H3 = (T & F) - (S | W).
//
// Draw order (one rng draw per step, in this order):
//   rfwpms: H1 nonempty -> uniform over the min-count subset of H1;
//           else H2 nonempty -> uniform pick from H2, then a Bernoulli on the
//           sharing factor (always drawn), failure falls through to a uniform
//           H3 pick when available; else uniform H3 pick when available.
//   rnwpms: as rfwpms with the H1 pick uniform over all of H1.
//   rf: uniform over the min-count subset of H2; H3 fallback.
//   rn: uniform over H2; H3 fallback.
//   ms: uniform over H2 & R (mode suppressed; R covers the whole file when
//       the profile is uniform, waiving the suppression); H3 fallback.
//   tms: rn while mbar <= threshold, ms once mbar exceeds it.
//
// Uniform picks index the candidate set in ascending piece order.
Transfer transferable_piece(const PushContext& ctx, const NetworkParams& params,
                            const PolicyConfig& policy, Rng& rng);

}  // namespace swarmlab
