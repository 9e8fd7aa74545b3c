#include <doctest.h>

#include <stdexcept>

#include "swarmlab/network_state.hpp"
#include "swarmlab/rng.hpp"

using namespace swarmlab;

namespace {

RunConfig two_swarm_config() {
    RunConfig cfg;
    SwarmSpec a;
    a.id = "A";
    a.file = PieceSet::full(3);
    a.downloadable = PieceSet::full(4);
    a.allies = {0, 1};
    SwarmSpec b;
    b.id = "B";
    b.file = PieceSet::range(2, 5);
    b.downloadable = PieceSet::range(2, 5);
    b.allies = {1};
    cfg.swarms = {a, b};
    return cfg;
}

}  // namespace

TEST_CASE("ally wiring determines reveal direction and uploader lists") {
    NetworkState st(two_swarm_config());
    CHECK(st.n_swarms() == 2);
    CHECK(st.uploads_to(0, 0));
    CHECK(st.uploads_to(0, 1));
    CHECK_FALSE(st.uploads_to(1, 0));
    CHECK(st.uploads_to(1, 1));
    CHECK(st.uploaders(0).empty());
    CHECK(st.uploaders(1) == std::vector<int>{0});
}

TEST_CASE("add, download, complete and remove update the tables") {
    NetworkState st(two_swarm_config());
    int p0 = st.add_peer(0, PieceSet::from_indices({0, 1}), 0.5);
    int p1 = st.add_peer(0, PieceSet::from_indices({0, 3}), 0.7);
    int p2 = st.add_peer(1, PieceSet::from_indices({2}), 1.0);
    CHECK(st.size() == 3);
    CHECK(st.table(0).population() == 2);
    CHECK(st.table(1).population() == 1);
    CHECK(st.peer(p1).arrival_time == 0.7);
    CHECK(st.members(0).size() == 2);

    CHECK(chunk_count(st, 0, 0) == 2);
    CHECK(chunk_count(st, 0, 3) == 1);
    CHECK(chunk_count(st, 1, 2) == 1);

    CHECK_FALSE(st.complete(p0));
    st.give_piece(p0, 2);
    CHECK(st.complete(p0));
    CHECK(chunk_count(st, 0, 2) == 1);

    st.remove_peer(p0);
    CHECK(st.size() == 2);
    CHECK(st.table(0).population() == 1);
    CHECK(chunk_count(st, 0, 0) == 1);
    CHECK(st.audit().empty());
    (void)p2;
}

TEST_CASE("complementary counts sum uploader swarms only, excess cache included") {
    NetworkState st(two_swarm_config());
    st.add_peer(0, PieceSet::from_indices({2, 3}), 0.0);  // swarm A holds 2 and excess 3
    st.add_peer(0, PieceSet::from_indices({2}), 0.0);
    st.add_peer(1, PieceSet::from_indices({2, 3}), 0.0);

    // Swarm B is fed by A: piece 2 has two A copies, piece 3 one A copy.
    CHECK(st.complementary_count(1, 2) == 2);
    CHECK(st.complementary_count(1, 3) == 1);
    CHECK(st.complementary_count(1, 4) == 0);
    // Nobody uploads to A but A itself.
    CHECK(st.complementary_count(0, 2) == 0);
}

TEST_CASE("query guards throw on unknown swarms and pieces") {
    NetworkState st(two_swarm_config());
    CHECK_THROWS_AS(chunk_count(st, 2, 0), std::out_of_range);
    CHECK_THROWS_AS(chunk_count(st, -1, 0), std::out_of_range);
    CHECK_THROWS_AS(chunk_count(st, 0, 4), std::out_of_range);   // outside A's downloadable set
    CHECK_THROWS_AS(chunk_count(st, 1, 0), std::out_of_range);   // outside B's downloadable set
    CHECK_THROWS_AS(mismatch_summary(st, 9), std::out_of_range);
}

TEST_CASE("mismatch summary mirrors the chunk table") {
    NetworkState st(two_swarm_config());
    st.add_peer(0, PieceSet::from_indices({0, 1}), 0.0);
    st.add_peer(0, PieceSet::from_indices({0}), 0.0);
    MismatchSummary m = mismatch_summary(st, 0);
    CHECK(m.population == 2);
    CHECK(m.nu_max == 2);
    CHECK(m.nu_min == 0);
    CHECK(m.total == 3);
    CHECK(m.mbar == 2);
    CHECK(m.total_mismatch == 3);
}

TEST_CASE("rare set selects strictly-below-max pieces, or the file when uniform") {
    ChunkTable t(PieceSet::full(3), PieceSet::full(3));
    for (int i = 0; i < 5; ++i) t.add_piece(0);
    for (int i = 0; i < 3; ++i) t.add_piece(1);
    t.add_piece(2);
    CHECK(rare_set(t) == PieceSet::from_indices({1, 2}));

    ChunkTable u(PieceSet::full(4), PieceSet::full(4));
    CHECK(rare_set(u) == PieceSet::full(4));  // all-zero profile is uniform
    for (int i = 0; i < 4; ++i) u.add_piece(i);
    CHECK(rare_set(u) == PieceSet::full(4));
}

TEST_CASE("initial rosters: one-club, flash crowd, explicit peers") {
    RunConfig cfg = two_swarm_config();
    cfg.initial.kind = InitialKind::one_club;
    cfg.initial.clubs = {OneClubInit{0, 1, 3}};
    NetworkState club(cfg);
    CHECK(club.size() == 3);
    CHECK(club.table(0).count(0) == 3);
    CHECK(club.table(0).count(1) == 0);
    CHECK(club.table(0).count(2) == 3);
    CHECK(club.audit().empty());

    cfg.initial = {};
    cfg.initial.kind = InitialKind::flash_crowd;
    cfg.initial.crowds = {FlashCrowdInit{1, 2}};
    NetworkState crowd(cfg);
    CHECK(crowd.size() == 2);
    CHECK(crowd.table(1).population() == 2);
    CHECK(crowd.table(1).total() == 0);
    CHECK(crowd.peer(0).cache.empty());

    cfg.initial = {};
    cfg.initial.kind = InitialKind::explicit_roster;
    cfg.initial.peers = {ExplicitPeerInit{0, PieceSet::single(3)},
                         ExplicitPeerInit{1, PieceSet::from_indices({2, 4})}};
    NetworkState expl(cfg);
    CHECK(expl.size() == 2);
    CHECK(expl.table(0).count(3) == 1);
    CHECK(expl.table(1).count(4) == 1);
    CHECK(expl.audit().empty());
}

TEST_CASE("audit catches a corrupted chunk table") {
    NetworkState st(two_swarm_config());
    st.add_peer(0, PieceSet::single(0), 0.0);
    CHECK(st.audit().empty());
    st.table_mut(0).add_piece(1);  // drift with no matching roster change
    CHECK_FALSE(st.audit().empty());
}

TEST_CASE("randomized churn keeps every invariant (fuzzed audit)") {
    RunConfig cfg = two_swarm_config();
    NetworkState st(cfg);
    Rng rng(555);
    for (int step = 0; step < 3000; ++step) {
        double u = rng.uniform01();
        if (st.size() == 0 || u < 0.45) {
            int w = static_cast<int>(rng.uniform_index(2));
            const auto& spec = cfg.swarms[static_cast<std::size_t>(w)];
            PieceSet cache;
            spec.downloadable.for_each([&](int i) {
                if (rng.bernoulli(0.3)) cache.set(i);
            });
            if ((spec.file - cache).empty()) cache.reset(spec.file.first());
            st.add_peer(w, cache, step * 0.1);
        } else if (u < 0.7) {
            st.remove_peer(static_cast<int>(rng.uniform_index(static_cast<std::size_t>(st.size()))));
        } else {
            int idx = static_cast<int>(rng.uniform_index(static_cast<std::size_t>(st.size())));
            const Peer& p = st.peer(idx);
            PieceSet missing = st.swarm_spec(p.swarm).downloadable - p.cache;
            if (!missing.empty()) {
                int piece = missing.nth(static_cast<int>(rng.uniform_index(
                    static_cast<std::size_t>(missing.count()))));
                st.give_piece(idx, piece);
                if (st.complete(idx)) st.remove_peer(idx);
            }
        }
        if (step % 101 == 0) {
            auto problems = st.audit();
            if (!problems.empty()) {
                CAPTURE(problems.front());
                REQUIRE(problems.empty());
            }
        }
    }
    CHECK(st.audit().empty());
    CHECK(st.peers_created() > 1000);
}
