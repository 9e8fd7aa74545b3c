#pragma once

// Reference piece selector built on sorted index vectors, plus a random world
// generator. Used to cross-check the production selector draw by draw.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iterator>
#include <limits>
#include <random>
#include <vector>

#include "swarmlab/network_state.hpp"
#include "swarmlab/policy.hpp"
#include "swarmlab/rng.hpp"
#include "swarmlab/types.hpp"

namespace policy_ref {

using swarmlab::NetworkParams;
using swarmlab::NetworkState;
using swarmlab::PieceSet;
using swarmlab::PolicyConfig;
using swarmlab::PolicyKind;
using swarmlab::Rng;
using swarmlab::Transfer;
using swarmlab::ZetaVariant;

struct RefTransfer {
    int piece = -1;
    bool rare = false, nonrare = false, suppressed = false, extra = false;

    bool operator==(const Transfer& t) const {
        return piece == t.piece && rare == t.rare && nonrare == t.nonrare &&
               suppressed == t.suppressed && extra == t.extra;
    }
};

inline std::vector<int> vec_and(const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline std::vector<int> vec_minus(const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline std::vector<int> vec_or(const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline RefTransfer ref_transferable(const NetworkState& st, const NetworkParams& par,
                                    const PolicyConfig& pol, const PieceSet& revealed, int w,
                                    const PieceSet& cache, Rng& rng) {
    const swarmlab::SwarmSpec& spec = st.swarm_spec(w);
    const std::vector<int> file = spec.file.to_indices();
    const std::vector<int> shown = revealed.to_indices();
    const std::vector<int> held = cache.to_indices();

    int numax = 0;
    int numin = std::numeric_limits<int>::max();
    for (int i : file) {
        const int c = chunk_count(st, w, i);
        numax = std::max(numax, c);
        numin = std::min(numin, c);
    }
    const int mbar = numax - numin;

    std::vector<int> rare;
    for (int i : file)
        if (mbar == 0 || chunk_count(st, w, i) < numax) rare.push_back(i);

    const std::vector<int> h1 = vec_minus(vec_and(shown, rare), held);
    const std::vector<int> h2 = vec_minus(vec_and(shown, file), held);
    const std::vector<int> h3 =
        vec_minus(vec_and(shown, spec.downloadable.to_indices()), vec_or(held, file));

    auto pick = [&rng](const std::vector<int>& v) {
        return v[rng.uniform_index(v.size())];
    };
    auto argmin = [&](const std::vector<int>& v) {
        int best = std::numeric_limits<int>::max();
        for (int i : v) best = std::min(best, chunk_count(st, w, i));
        std::vector<int> out;
        for (int i : v)
            if (chunk_count(st, w, i) == best) out.push_back(i);
        return out;
    };
    auto zeta = [&](int n) {
        if (!(spec.beta > 0.0)) return 0.0;
        double d = 0.0;
        for (int v = 0; v < st.n_swarms(); ++v) {
            if (v == w) continue;
            const std::vector<int>& allies = st.swarm_spec(v).allies;
            if (std::find(allies.begin(), allies.end(), w) != allies.end())
                d += st.table(v).count(n);
        }
        const double kw = static_cast<double>(file.size());
        if (pol.zeta_variant == ZetaVariant::standard)
            return std::exp(-(mbar + std::pow(d, spec.alpha)) / (spec.beta * kw));
        const double d1 =
            2.0 * (par.L - (par.y_opt ? 1 : 0)) * par.mu + (par.y_opt ? par.mu_hat : 0.0);
        const double pool = std::min(kw, static_cast<double>(st.size()));
        return std::exp(-d1 / (spec.beta * par.L * par.U) * (mbar + d) / pool);
    };
    auto classify = [&](const std::vector<int>& v) {
        RefTransfer r;
        r.piece = pick(v);
        if (mbar == 0 || chunk_count(st, w, r.piece) < numax)
            r.rare = true;
        else
            r.nonrare = true;
        return r;
    };
    auto fallthrough = [&](bool sup) {
        RefTransfer r;
        r.suppressed = sup;
        if (!h3.empty()) {
            r.piece = pick(h3);
            r.extra = true;
        }
        return r;
    };

    switch (pol.kind) {
        case PolicyKind::RFwPMS:
        case PolicyKind::RNwPMS: {
            if (!h1.empty()) {
                RefTransfer r;
                r.piece = pol.kind == PolicyKind::RFwPMS ? pick(argmin(h1)) : pick(h1);
                r.rare = true;
                return r;
            }
            if (!h2.empty()) {
                const int n = pick(h2);
                if (rng.bernoulli(zeta(n))) {
                    RefTransfer r;
                    r.piece = n;
                    r.nonrare = true;
                    return r;
                }
                return fallthrough(true);
            }
            return fallthrough(false);
        }
        case PolicyKind::RF:
            if (!h2.empty()) return classify(argmin(h2));
            return fallthrough(false);
        case PolicyKind::RN:
            if (!h2.empty()) return classify(h2);
            return fallthrough(false);
        case PolicyKind::MS: {
            const std::vector<int> allowed = vec_and(h2, rare);
            if (!allowed.empty()) return classify(allowed);
            return fallthrough(false);
        }
        case PolicyKind::TMS: {
            if (mbar <= pol.tms_threshold_for(static_cast<int>(file.size()))) {
                if (!h2.empty()) return classify(h2);
                return fallthrough(false);
            }
            const std::vector<int> allowed = vec_and(h2, rare);
            if (!allowed.empty()) return classify(allowed);
            return fallthrough(false);
        }
    }
    return RefTransfer{};
}

struct WorldDraw {
    std::mt19937_64 gen;

    explicit WorldDraw(std::uint64_t seed) : gen(seed) {}
    int upto(int n) { return static_cast<int>(gen() % static_cast<std::uint64_t>(n)); }
    bool coin() { return (gen() & 1u) != 0; }

    PieceSet subset(const PieceSet& of) {
        PieceSet out;
        of.for_each([&](int i) {
            if (coin()) out.set(i);
        });
        return out;
    }

    // Nonempty subset of [0, k).
    PieceSet nonempty(int k) {
        PieceSet s = subset(PieceSet::full(k));
        if (s.empty()) s.set(upto(k));
        return s;
    }

    // Cache inside `downloadable` that leaves at least one file piece missing.
    PieceSet incomplete_cache(const PieceSet& file, const PieceSet& downloadable) {
        PieceSet cache = subset(downloadable);
        if ((file - cache).empty()) cache.reset(file.nth(upto(file.count())));
        return cache;
    }
};

}  // namespace policy_ref
