#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "qv_oracle.hpp"
#include "swarmlab/engine.hpp"
#include "swarmlab/lyapunov.hpp"
#include "swarmlab/rng.hpp"
#include "swarmlab/types.hpp"

using namespace swarmlab;

namespace {

// Single 2-piece swarm whose full constant set was hand-derived offline:
// L = 3, U = mu = 1, p = 0.5, no unchoke link, lambda = 4, beta = 3/2,
// alpha = 1, eta = 1/2, epsilon' = 1/20.
RunConfig pinned_case() {
    RunConfig cfg;
    cfg.params.L = 3;
    cfg.params.U = 1.0;
    cfg.params.mu = 1.0;
    cfg.params.p = 0.5;
    SwarmSpec s;
    s.id = "w";
    s.file = PieceSet::full(2);
    s.downloadable = PieceSet::full(2);
    s.allies = {0};
    s.lambda = 4.0;
    s.beta = 1.5;
    s.alpha = 1.0;
    cfg.swarms = {s};
    cfg.t_end = 1.0;
    return cfg;
}

void add_explicit(RunConfig& cfg, int swarm, PieceSet cache) {
    cfg.initial.kind = InitialKind::explicit_roster;
    cfg.initial.peers.push_back(ExplicitPeerInit{swarm, cache});
}

SwarmConstants hand_constants(int k, double c1, double c2, double c3) {
    SwarmConstants c;
    c.k = k;
    c.c1 = c1;
    c.c2 = c2;
    c.c3 = c3;
    return c;
}

LyapunovConfig hand_config(std::vector<SwarmConstants> swarms, double eta = 0.5) {
    LyapunovConfig cfg;
    cfg.eta = eta;
    cfg.swarms = std::move(swarms);
    return cfg;
}

}  // namespace

TEST_CASE("envelope ratio constant closed forms") {
    NetworkParams np;
    np.L = 3;
    np.mu = 1.0;
    np.p = 0.5;
    CHECK(xi2_of(np) == doctest::Approx(3.0));  // 1 + 1/p

    np.y_opt = true;
    np.mu_hat = 1.0 / 3.0;
    // 1 + (2*2*1 + 1/3) / (2*2*1*0.5 + 1/3) = 1 + 13/7
    CHECK(xi2_of(np) == doctest::Approx(20.0 / 7.0));

    NetworkParams hard;  // p = 0 and no unchoke link: no soft contact at all
    hard.L = 3;
    hard.p = 0.0;
    CHECK(std::isinf(xi2_of(hard)));

    NetworkParams only_unchoke;
    only_unchoke.L = 1;
    only_unchoke.y_opt = true;
    only_unchoke.mu_hat = 0.25;
    only_unchoke.p = 0.0;
    CHECK(xi2_of(only_unchoke) == doctest::Approx(2.0));
}

TEST_CASE("derived constants match the hand-computed pinned case") {
    const RunConfig cfg = pinned_case();
    const LyapunovConfig lc = derive_constants(cfg.params, cfg.swarms, 0.5, 0.05);

    CHECK(lc.epsilon == doctest::Approx(0.1));
    CHECK(lc.delta_p == doctest::Approx(3.0));
    CHECK(lc.delta_1 == doctest::Approx(6.0));
    CHECK(lc.xi2 == doctest::Approx(3.0));
    REQUIRE(lc.swarms.size() == 1);
    const SwarmConstants& c = lc.swarms[0];
    CHECK(c.k == 2);
    CHECK(c.lambda == doctest::Approx(4.0));
    CHECK(c.seed_rate == doctest::Approx(3.0));
    CHECK(c.c1 == doctest::Approx(32.0));
    CHECK(c.c_one == doctest::Approx(64.0));
    CHECK(c.d_w1 == doctest::Approx(33675.749198332815).epsilon(1e-12));
    CHECK(c.d_w2 == 0.0);  // no other allies
    CHECK(c.d_w == doctest::Approx(33675.749198332815).epsilon(1e-12));
    CHECK(c.c2 == doctest::Approx(90484.93119555416).epsilon(1e-12));
    CHECK(c.delta == doctest::Approx(9.20963659167017e-07).epsilon(1e-12));
    CHECK(c.n_w1 == doctest::Approx(45242.46559777708).epsilon(1e-12));
    CHECK(c.c3 == doctest::Approx(180971.86239110833).epsilon(1e-12));
}

TEST_CASE("derived constants satisfy every recipe inequality") {
    RunConfig cfg = pinned_case();

    SUBCASE("pinned single swarm") {}
    SUBCASE("two allied swarms with an unchoke link") {
        cfg.params.y_opt = true;
        cfg.params.mu_hat = 0.5;
        cfg.params.p = 0.25;
        SwarmSpec other;
        other.id = "v";
        other.file = PieceSet::range(1, 4);
        other.downloadable = PieceSet::full(4);
        other.allies = {0, 1};
        other.lambda = 2.0;
        other.beta = 0.8;
        other.alpha = 0.5;
        cfg.swarms[0].downloadable = PieceSet::full(4);
        cfg.swarms[0].allies = {0, 1};
        cfg.swarms.push_back(other);
    }
    SUBCASE("autonomous split") {
        cfg.params.mode = Mode::autonomous;
        cfg.params.seed_split = {1.0};
    }

    const LyapunovConfig lc = derive_constants(cfg.params, cfg.swarms, 0.5, 0.05);
    CHECK(check_recipe(lc, cfg.params, cfg.swarms).empty());

    LyapunovConfig broken = lc;
    broken.swarms[0].c2 *= 0.5;
    CHECK(!check_recipe(broken, cfg.params, cfg.swarms).empty());
    broken = lc;
    broken.swarms[0].delta *= 64.0;
    CHECK(!check_recipe(broken, cfg.params, cfg.swarms).empty());
    broken = lc;
    broken.swarms[0].c3 = 2.0;
    CHECK(!check_recipe(broken, cfg.params, cfg.swarms).empty());
}

TEST_CASE("rare-region population floor solves its defining inequality tightly") {
    // n_w1 returns the least Z >= 0 with
    //   min(seed, 2(1-eta) delta_p) Z + 2(1-eta)(seed - 2(1-eta) delta_p)
    //     >= (theta + eps) theta1 K / (2(1-eta)).
    auto lhs = [](double z, double eta, double seed, double dp) {
        return std::min(seed, 2.0 * (1.0 - eta) * dp) * z +
               2.0 * (1.0 - eta) * (seed - 2.0 * (1.0 - eta) * dp);
    };
    auto rhs = [](double theta, double theta1, double eps, double eta, int k) {
        return (theta + eps) * theta1 * k / (2.0 * (1.0 - eta));
    };

    struct Case {
        double theta, theta1, eps, eta, seed, dp;
        int k;
    };
    const Case cases[] = {
        {33931.749198332815, 2.0, 0.1, 0.5, 3.0, 3.0, 2},
        {120.0, 3.0, 0.2, 0.25, 2.0, 1.1, 3},
        {5.0, 2.0, 0.4, 0.75, 10.0, 0.3, 2},
        {0.0, 1.0, 1e-6, 0.5, 50.0, 40.0, 1},  // floor clamps at zero
    };
    for (const Case& c : cases) {
        const double z = n_w1(c.theta, c.theta1, 2.0 * (1.0 - c.eta) * (1.0 - c.eta), c.eps,
                              c.eta, c.seed, c.dp, c.k);
        CHECK(z >= 0.0);
        CHECK(lhs(z, c.eta, c.seed, c.dp) >=
              rhs(c.theta, c.theta1, c.eps, c.eta, c.k) * (1.0 - 1e-12));
        if (z > 0.0)  // minimality: shaving the floor breaks the inequality
            CHECK(lhs(z * (1.0 - 1e-6), c.eta, c.seed, c.dp) <
                  rhs(c.theta, c.theta1, c.eps, c.eta, c.k));
    }

    CHECK(n_w1(33931.749198332815, 2.0, 16.0, 0.1, 0.5, 3.0, 3.0, 2) ==
          doctest::Approx(45242.46559777708).epsilon(1e-12));
    CHECK_THROWS_AS(n_w1(1.0, 1.0, 1.0, 0.1, 0.5, 0.0, 0.0, 2), std::domain_error);
}

TEST_CASE("degenerate recipe inputs are rejected with a reason") {
    RunConfig cfg = pinned_case();

    SUBCASE("eta outside the open unit interval") {
        CHECK_THROWS_AS(derive_constants(cfg.params, cfg.swarms, 0.0, 0.05), std::domain_error);
        CHECK_THROWS_AS(derive_constants(cfg.params, cfg.swarms, 1.0, 0.05), std::domain_error);
    }
    SUBCASE("epsilon_prime must be positive") {
        CHECK_THROWS_AS(derive_constants(cfg.params, cfg.swarms, 0.5, 0.0), std::domain_error);
    }
    SUBCASE("hard tit-for-tat with no unchoke link collapses the lower envelope") {
        cfg.params.p = 0.0;
        CHECK_THROWS_AS(derive_constants(cfg.params, cfg.swarms, 0.5, 0.05), std::domain_error);
    }
    SUBCASE("tiny alpha with other allies overflows the D constant") {
        SwarmSpec other = cfg.swarms[0];
        other.id = "v";
        other.alpha = 1e-9;
        cfg.swarms[0].allies = {0, 1};
        other.allies = {0, 1};
        cfg.swarms.push_back(other);
        try {
            derive_constants(cfg.params, cfg.swarms, 0.5, 0.05);
            FAIL("expected a domain_error");
        } catch (const std::domain_error& e) {
            CHECK(std::string(e.what()).find("'v'") != std::string::npos);
        }
    }
    SUBCASE("tiny alpha is harmless without other allies") {
        cfg.swarms[0].alpha = 1e-9;
        const LyapunovConfig lc = derive_constants(cfg.params, cfg.swarms, 0.5, 0.05);
        CHECK(lc.swarms[0].d_w2 == 0.0);
        CHECK(lc.swarms[0].d_w > 0.0);
    }
    SUBCASE("beta zero turns the D constant off") {
        cfg.swarms[0].beta = 0.0;
        const LyapunovConfig lc = derive_constants(cfg.params, cfg.swarms, 0.5, 0.05);
        CHECK(lc.swarms[0].d_w == 0.0);
        CHECK(check_recipe(lc, cfg.params, cfg.swarms).empty());
    }
}

TEST_CASE("value terms from swarm aggregates") {
    // K = 3, counts (2, 1, 0): population 4, nu_max 2, P 3, M 3.
    const SwarmConstants c = hand_constants(3, 72.0, 10.0, 20.0);
    const LyapunovTerms t = lyapunov_terms(c, 0.5, 4, 2, 3, 3);
    CHECK(t.v1 == doctest::Approx(4.0));    // (3 - 0.5*2)^2
    CHECK(t.v2 == doctest::Approx(648.0));  // 72 (3*4 - 3)
    CHECK(t.v3 == doctest::Approx(170.0));  // 10 (20 - 3)
    CHECK(t.total() == doctest::Approx(822.0));

    // Mismatch exactly eta nu_max: the excess clamps to zero.
    CHECK(lyapunov_terms(c, 0.5, 4, 2, 5, 1).v1 == doctest::Approx(0.0));
    // Hand case: nu_max 3, M 3, eta 0.5 -> (3 - 1.5)^2.
    CHECK(lyapunov_terms(c, 0.5, 4, 3, 6, 3).v1 == doctest::Approx(2.25));
    CHECK(lyapunov_terms(c, 0.5, 4, 3, 6, 3).v2 == doctest::Approx(432.0));
    // Piece total past c3: the deficit term vanishes.
    CHECK(lyapunov_terms(c, 0.5, 10, 8, 24, 0).v3 == doctest::Approx(0.0));

    // Empty swarm: only the deficit term is charged.
    const LyapunovTerms empty = lyapunov_terms(c, 0.5, 0, 0, 0, 0);
    CHECK(empty.v1 == 0.0);
    CHECK(empty.v2 == 0.0);
    CHECK(empty.v3 == doctest::Approx(200.0));  // c2 * c3

    // Uniform chunk profile: M = K nu - P = 0 whatever the level.
    CHECK(lyapunov_terms(c, 0.5, 5, 4, 12, 0).v1 == 0.0);
}

TEST_CASE("arrivals and downloads move the value by fixed quanta") {
    RunConfig cfg = pinned_case();
    cfg.swarms[0].file = PieceSet::full(3);
    cfg.swarms[0].downloadable = PieceSet::full(3);
    add_explicit(cfg, 0, PieceSet::from_indices({0, 1}));
    add_explicit(cfg, 0, PieceSet::single(0));
    const LyapunovConfig lc = hand_config({hand_constants(3, 72.0, 10.0, 20.0)});

    NetworkState st(cfg);
    std::vector<LyapunovTerms> before, after;
    lyapunov_value(st, lc, &before);

    SUBCASE("an empty arrival adds K c1 and nothing else") {
        const double v0 = lyapunov_value(st, lc);
        st.add_peer(0, PieceSet{}, 1.0);
        const double v1 = lyapunov_value(st, lc, &after);
        CHECK(v1 - v0 == doctest::Approx(3 * 72.0));
        CHECK(after[0].v2 - before[0].v2 == doctest::Approx(3 * 72.0));
        CHECK(after[0].v1 == doctest::Approx(before[0].v1));
        CHECK(after[0].v3 == doctest::Approx(before[0].v3));
    }
    SUBCASE("a download below the max count takes c1 off the copy deficit") {
        st.give_piece(1, 1);  // counts (2,1,0) -> (2,2,0), nu_max unchanged
        lyapunov_value(st, lc, &after);
        CHECK(after[0].v2 - before[0].v2 == doctest::Approx(-72.0));
        CHECK(after[0].v3 - before[0].v3 == doctest::Approx(-10.0));
    }
}

TEST_CASE("the value dominates c1 times the swarm population") {
    RunConfig cfg;
    cfg.params.L = 2;
    cfg.params.p = 0.5;
    SwarmSpec a;
    a.id = "a";
    a.file = PieceSet::full(4);
    a.downloadable = PieceSet::full(6);
    a.allies = {0, 1};
    SwarmSpec b = a;
    b.id = "b";
    b.file = PieceSet::range(2, 6);
    cfg.swarms = {a, b};
    cfg.t_end = 1.0;
    add_explicit(cfg, 0, PieceSet{});  // explicit kind; roster refilled below

    const LyapunovConfig lc =
        hand_config({hand_constants(4, 128.0, 7.0, 11.0), hand_constants(4, 128.0, 3.0, 2.0)});

    Rng rng(2026);
    for (int trial = 0; trial < 200; ++trial) {
        NetworkState st(cfg);
        const int extra = static_cast<int>(rng.uniform_index(7));
        for (int i = 0; i < extra; ++i) {
            const int w = static_cast<int>(rng.uniform_index(2));
            PieceSet cache;
            for (int piece = 0; piece < 6; ++piece)
                if (rng.bernoulli(0.4)) cache.set(piece);
            // keep the peer incomplete on its own file
            const PieceSet file = cfg.swarms[static_cast<std::size_t>(w)].file;
            const std::vector<int> own = (cache & file).to_indices();
            if (own.size() == static_cast<std::size_t>(file.count()))
                cache = cache - PieceSet::single(own[rng.uniform_index(own.size())]);
            st.add_peer(w, cache, 0.0);
        }
        std::vector<LyapunovTerms> terms;
        lyapunov_value(st, lc, &terms);
        for (int w = 0; w < 2; ++w)
            CHECK(terms[static_cast<std::size_t>(w)].total() >=
                  lc.swarms[static_cast<std::size_t>(w)].c1 * st.table(w).population() - 1e-9);
    }
}

TEST_CASE("drift points on a frozen trajectory") {
    RunConfig cfg = pinned_case();
    cfg.swarms[0].lambda = 0.0;
    cfg.t_end = 10.0;
    cfg.rng_seed = 7;
    const TrajectoryRecord rec = run(cfg);
    REQUIRE(rec.samples.size() == 11);

    const LyapunovConfig lc = hand_config({hand_constants(2, 32.0, 5.0, 9.0)});
    const auto drift = empirical_drift(rec, lc, 2.0);
    REQUIRE(drift.size() == 9);
    for (const DriftPoint& p : drift) {
        CHECK(p.value == doctest::Approx(5.0 * 9.0));  // empty network stays empty
        CHECK(p.drift == doctest::Approx(0.0));
    }
    CHECK(drift[3].t == doctest::Approx(3.0));

    CHECK_THROWS_AS(empirical_drift(rec, lc, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(empirical_drift(rec, lc, 0.4), std::invalid_argument);  // rounds to zero
    CHECK_THROWS_AS(empirical_drift(rec, lc, 50.0), std::invalid_argument);
}

TEST_CASE("sample reconstruction agrees with the live state value") {
    RunConfig cfg = pinned_case();
    cfg.swarms[0].file = PieceSet::full(3);
    cfg.swarms[0].downloadable = PieceSet::full(3);
    add_explicit(cfg, 0, PieceSet::from_indices({0, 1}));
    add_explicit(cfg, 0, PieceSet::single(0));
    add_explicit(cfg, 0, PieceSet{});
    const LyapunovConfig lc = hand_config({hand_constants(3, 72.0, 10.0, 20.0)});

    NetworkState st(cfg);
    Sample s;  // the same aggregates entered by hand: counts (2, 1, 0)
    s.population = {3};
    s.nu_min = {0};
    s.nu_max = {2};
    s.mbar = {2};
    s.total = {3};
    s.total_mismatch = {3};
    CHECK(lyapunov_at_sample(s, lc) == doctest::Approx(lyapunov_value(st, lc)).epsilon(1e-12));
}

TEST_CASE("push-rate envelope bands cover a busy run") {
    RunConfig cfg = pinned_case();
    cfg.swarms[0].file = PieceSet::full(3);
    cfg.swarms[0].downloadable = PieceSet::full(3);
    cfg.record_push_rates = true;
    cfg.t_end = 400.0;
    cfg.rng_seed = 5;
    const TrajectoryRecord rec = run(cfg);
    REQUIRE(rec.push_rates.has_value());

    const EnvelopeReport report = rate_envelope_check(rec);
    REQUIRE(report.cells.size() == 3);
    CHECK(report.violated == 0);
    CHECK(report.consistent == 3);
    CHECK(report.ratio_ok);
    for (const EnvelopeCellReport& cell : report.cells) {
        CHECK(cell.lower_mean > 0.0);
        CHECK(cell.upper_mean >= cell.lower_mean);
        CHECK(cell.observed > 0.0);
    }

    SUBCASE("a tampered count is flagged") {
        TrajectoryRecord bad = rec;
        auto& cell = bad.push_rates->cells[0][0];
        cell.weighted_commits = 10.0 * cell.upper_integral + 100.0;
        CHECK(rate_envelope_check(bad).violated == 1);
    }
    SUBCASE("a broken pathwise ratio is flagged") {
        TrajectoryRecord bad = rec;
        auto& cell = bad.push_rates->cells[0][1];
        cell.upper_integral = 10.0 * xi2_of(cfg.params) * cell.lower_integral;
        CHECK_FALSE(rate_envelope_check(bad).ratio_ok);
    }
}

TEST_CASE("envelope verdicts stay inconclusive on thin exposure") {
    RunConfig cfg = pinned_case();
    cfg.record_push_rates = true;
    cfg.t_end = 0.5;  // seed exposure 1.5 < the minimum expected count
    cfg.rng_seed = 3;
    const EnvelopeReport report = rate_envelope_check(run(cfg));
    CHECK(report.inconclusive == static_cast<int>(report.cells.size()));
    CHECK(report.consistent == 0);
    CHECK(report.violated == 0);
}

TEST_CASE("a record without push-rate bookkeeping is rejected") {
    RunConfig cfg = pinned_case();
    cfg.t_end = 1.0;
    CHECK_THROWS_AS(rate_envelope_check(run(cfg)), std::invalid_argument);
}

namespace {

struct QvEstimate {
    double value = 0;
    double sigma = 0;
};

QvEstimate mc_qv(RunConfig cfg, const LyapunovConfig& lc, int draws) {
    double sum = 0, sumsq = 0, rate = 0;
    for (int r = 0; r < draws; ++r) {
        cfg.rng_seed = derive_seed(991, static_cast<std::uint64_t>(r));
        Engine eng(cfg);
        if (r == 0) rate = eng.total_rate();
        const double before = lyapunov_value(eng.state(), lc);
        eng.step();
        const double dv = lyapunov_value(eng.state(), lc) - before;
        sum += dv;
        sumsq += dv * dv;
    }
    const double n = draws;
    const double mean = sum / n;
    const double var = std::max(0.0, sumsq / n - mean * mean);
    return {rate * mean, rate * std::sqrt(var / n)};
}

}  // namespace

TEST_CASE("exact generator drift matches one-step Monte-Carlo on micro states") {
    RunConfig cfg;

    SUBCASE("shared seed with an unchoke link") {
        cfg.params.L = 2;
        cfg.params.mu = 1.0;
        cfg.params.mu_hat = 0.5;
        cfg.params.y_opt = true;
        cfg.params.U = 0.8;
        cfg.params.p = 0.3;
        SwarmSpec a;
        a.id = "a";
        a.file = PieceSet::full(3);
        a.downloadable = PieceSet::full(3);
        a.allies = {0, 1};
        a.lambda = 0.7;
        a.beta = 1.5;
        a.alpha = 1.0;
        SwarmSpec b;
        b.id = "b";
        b.file = PieceSet::full(2);
        b.downloadable = PieceSet::full(3);
        b.allies = {0, 1};
        b.lambda = 0.4;
        b.beta = 1.5;
        b.alpha = 1.0;
        cfg.swarms = {a, b};
        cfg.policy.kind = PolicyKind::RFwPMS;
        add_explicit(cfg, 0, PieceSet::single(0));
        add_explicit(cfg, 0, PieceSet{});
        add_explicit(cfg, 1, PieceSet::single(1));
        add_explicit(cfg, 1, PieceSet::single(0));
        add_explicit(cfg, 0, PieceSet::from_indices({1, 2}));
    }
    SUBCASE("autonomous seeds under the flash-crowd sharing factor") {
        cfg.params.L = 2;
        cfg.params.mu = 0.8;
        cfg.params.U = 1.0;
        cfg.params.p = 0.2;
        cfg.params.mode = Mode::autonomous;
        cfg.params.seed_split = {0.6, 0.4};
        SwarmSpec a;
        a.id = "a";
        a.file = PieceSet::full(2);
        a.downloadable = PieceSet::full(3);
        a.allies = {0, 1};
        a.lambda = 0.5;
        a.beta = 2.0;
        a.alpha = 1.0;
        SwarmSpec b;
        b.id = "b";
        b.file = PieceSet::range(1, 3);
        b.downloadable = PieceSet::range(1, 3);
        b.allies = {0, 1};
        b.lambda = 0.3;
        b.beta = 1.2;
        b.alpha = 1.0;
        cfg.swarms = {a, b};
        cfg.policy.kind = PolicyKind::RNwPMS;
        cfg.policy.zeta_variant = ZetaVariant::flashcrowd;
        add_explicit(cfg, 0, PieceSet::single(0));
        add_explicit(cfg, 0, PieceSet::single(1));
        add_explicit(cfg, 0, PieceSet{});
        add_explicit(cfg, 1, PieceSet::single(1));
        add_explicit(cfg, 1, PieceSet{});
        add_explicit(cfg, 1, PieceSet::single(2));
    }

    cfg.t_end = 1e9;  // one transition never reaches the horizon
    const LyapunovConfig lc = derive_constants(cfg.params, cfg.swarms, 0.5, 0.05);

    // The oracle's aggregate bookkeeping agrees with the live chunk tables.
    qv_oracle::Roster roster;
    for (const auto& peer : cfg.initial.peers) roster.push_back({peer.swarm, peer.cache});
    {
        RunConfig probe = cfg;
        probe.rng_seed = 1;
        Engine eng(probe);
        CHECK(qv_oracle::value_of(roster, cfg, lc) ==
              doctest::Approx(lyapunov_value(eng.state(), lc)).epsilon(1e-12));
    }

    const double exact = qv_oracle::exact_qv(cfg, lc);
    const QvEstimate mc = mc_qv(cfg, lc, 100000);
    REQUIRE(mc.sigma > 0.0);
    CHECK(std::abs(mc.value - exact) <= 4.0 * mc.sigma);
}
