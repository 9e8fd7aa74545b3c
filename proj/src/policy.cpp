#include "swarmlab/policy.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace swarmlab {

double sharing_factor(const PushContext& ctx, const NetworkParams& params,
                      const PolicyConfig& policy, int piece) {
    const NetworkState& st = *ctx.state;
    const SwarmSpec& spec = st.swarm_spec(ctx.target_swarm);
    if (!(spec.beta > 0.0)) return 0.0;
    const ChunkTable& table = st.table(ctx.target_swarm);
    const double mbar = table.mbar();
    const double d = static_cast<double>(st.complementary_count(ctx.target_swarm, piece));
    const double k = table.k();
    if (policy.zeta_variant == ZetaVariant::standard)
        return std::exp(-(mbar + std::pow(d, spec.alpha)) / (spec.beta * k));
    const double pool = std::min(k, static_cast<double>(st.size()));
    return std::exp(-params.delta_1() / (spec.beta * params.L * params.U) * (mbar + d) / pool);
}

PieceSet argmin_chunk_count(const ChunkTable& table, const PieceSet& candidates) {
    int best = 1 << 30;
    candidates.for_each([&](int i) { best = std::min(best, table.count(i)); });
    PieceSet out;
    candidates.for_each([&](int i) {
        if (table.count(i) == best) out.set(i);
    });
    return out;
}

namespace {

int uniform_pick(const PieceSet& s, Rng& rng) {
    return s.nth(static_cast<int>(rng.uniform_index(static_cast<std::size_t>(s.count()))));
}

Transfer pick_classified(const ChunkTable& table, const PieceSet& candidates, Rng& rng) {
    Transfer t;
    t.piece = uniform_pick(candidates, rng);
    if (table.mbar() == 0 || table.count(t.piece) < table.nu_max())
        t.rare = true;
    else
        t.nonrare = true;
    return t;
}

Transfer extra_or_none(const PieceSet& h3, Rng& rng, bool suppressed) {
    Transfer t;
    t.suppressed = suppressed;
    if (!h3.empty()) {
        t.piece = uniform_pick(h3, rng);
        t.extra = true;
    }
    return t;
}

}  // namespace

Transfer transferable_piece(const PushContext& ctx, const NetworkParams& params,
                            const PolicyConfig& policy, Rng& rng) {
    const NetworkState& st = *ctx.state;
    const SwarmSpec& spec = st.swarm_spec(ctx.target_swarm);
    const ChunkTable& table = st.table(ctx.target_swarm);
    assert(!(spec.file - ctx.target_cache).empty());

    const PieceSet novel = ctx.revealed - ctx.target_cache;
    const PieceSet h2 = novel & spec.file;
    const PieceSet h3 = (novel & spec.downloadable) - spec.file;

    switch (policy.kind) {
        case PolicyKind::RFwPMS:
        case PolicyKind::RNwPMS: {
            const PieceSet h1 = h2 & rare_set(table);
            if (!h1.empty()) {
                Transfer t;
                t.piece = policy.kind == PolicyKind::RFwPMS
                              ? uniform_pick(argmin_chunk_count(table, h1), rng)
                              : uniform_pick(h1, rng);
                t.rare = true;
                return t;
            }
            if (!h2.empty()) {
                const int n = uniform_pick(h2, rng);
                if (rng.bernoulli(sharing_factor(ctx, params, policy, n))) {
                    Transfer t;
                    t.piece = n;
                    t.nonrare = true;
                    return t;
                }
                return extra_or_none(h3, rng, true);
            }
            return extra_or_none(h3, rng, false);
        }
        case PolicyKind::RF:
            if (!h2.empty()) return pick_classified(table, argmin_chunk_count(table, h2), rng);
            return extra_or_none(h3, rng, false);
        case PolicyKind::RN:
            if (!h2.empty()) return pick_classified(table, h2, rng);
            return extra_or_none(h3, rng, false);
        case PolicyKind::MS: {
            const PieceSet allowed = h2 & rare_set(table);
            if (!allowed.empty()) return pick_classified(table, allowed, rng);
            return extra_or_none(h3, rng, false);
        }
        case PolicyKind::TMS: {
            if (table.mbar() <= policy.tms_threshold_for(table.k())) {
                if (!h2.empty()) return pick_classified(table, h2, rng);
                return extra_or_none(h3, rng, false);
            }
            const PieceSet allowed = h2 & rare_set(table);
            if (!allowed.empty()) return pick_classified(table, allowed, rng);
            return extra_or_none(h3, rng, false);
        }
    }
    return Transfer{};
}

}  // namespace swarmlab
