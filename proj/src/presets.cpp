#include "swarmlab/presets.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "swarmlab/rng.hpp"

namespace swarmlab {

const char* to_string(Behavior b) {
    switch (b) {
        case Behavior::altruistic: return "altruistic";
        case Behavior::opportunistic: return "opportunistic";
        case Behavior::selfish: return "selfish";
        case Behavior::autonomous: return "autonomous";
    }
    return "?";
}

std::optional<Behavior> behavior_from_string(const std::string& s) {
    if (s == "altruistic") return Behavior::altruistic;
    if (s == "opportunistic") return Behavior::opportunistic;
    if (s == "selfish") return Behavior::selfish;
    if (s == "autonomous") return Behavior::autonomous;
    return std::nullopt;
}

void apply_behavior(RunConfig& config, Behavior behavior) {
    const int n = static_cast<int>(config.swarms.size());
    std::vector<int> everyone(static_cast<std::size_t>(n));
    std::iota(everyone.begin(), everyone.end(), 0);
    // Master extent as configured before any rewiring; altruistic swarms may
    // cache all of it.
    const int master = master_file_size(config.swarms);

    config.params.mode = Mode::shared;
    config.params.seed_split.clear();
    for (int w = 0; w < n; ++w) {
        auto& s = config.swarms[static_cast<std::size_t>(w)];
        switch (behavior) {
            case Behavior::altruistic:
                s.allies = everyone;
                s.downloadable = PieceSet::full(master);
                break;
            case Behavior::opportunistic:
                s.allies = everyone;
                s.downloadable = s.file;
                break;
            case Behavior::selfish:
            case Behavior::autonomous:
                s.allies = {w};
                s.downloadable = s.file;
                break;
        }
    }
    if (behavior == Behavior::autonomous) {
        config.params.mode = Mode::autonomous;
        config.params.seed_split.assign(static_cast<std::size_t>(n), config.params.U / n);
    }
}

namespace {

SwarmSpec swarm(std::string id, PieceSet file, double lambda) {
    SwarmSpec s;
    s.id = std::move(id);
    s.file = file;
    s.downloadable = file;
    s.lambda = lambda;
    return s;
}

// mu = U = 1, mu_hat = 1/3, L = 3: the parameter block most scenarios share.
NetworkParams classic_params() {
    NetworkParams np;
    np.mu = 1.0;
    np.mu_hat = 1.0 / 3.0;
    np.L = 3;
    np.U = 1.0;
    return np;
}

RunConfig fps_build(const PresetOverrides&) {
    RunConfig cfg;
    cfg.params = classic_params();
    cfg.params.p = 0.0;
    cfg.params.y_opt = false;
    cfg.swarms = {swarm("w1", PieceSet::full(10), 4.0)};
    cfg.swarms[0].allies = {0};
    cfg.t_end = 1000;
    return cfg;
}

RunConfig lps_build(const PresetOverrides&) {
    RunConfig cfg;
    cfg.params = classic_params();
    cfg.params.p = 0.5;
    cfg.params.y_opt = false;
    cfg.swarms = {swarm("w1", PieceSet::full(10), 6.0)};
    cfg.swarms[0].allies = {0};
    cfg.policy.kind = PolicyKind::RF;
    cfg.initial.kind = InitialKind::one_club;
    cfg.initial.clubs = {{0, 0, 800}};
    cfg.t_end = 1000;
    return cfg;
}

RunConfig two_swarm_stability(Behavior behavior) {
    RunConfig cfg;
    cfg.params = classic_params();
    cfg.params.p = 0.0;
    cfg.params.y_opt = true;
    cfg.swarms = {swarm("w1", PieceSet::range(0, 15), 20.0),
                  swarm("w2", PieceSet::range(10, 25), 20.0)};
    apply_behavior(cfg, behavior);
    cfg.initial.kind = InitialKind::one_club;
    cfg.initial.clubs = {{0, 0, 500}, {1, 15, 500}};
    cfg.t_end = 1000;
    return cfg;
}

RunConfig three_swarm_build(const PresetOverrides&) {
    RunConfig cfg;
    cfg.params = classic_params();
    cfg.params.U = 1.0 / 3.0;
    cfg.params.p = 0.5;
    cfg.params.y_opt = true;
    cfg.swarms = {swarm("w1", PieceSet::range(0, 10), 8.0),
                  swarm("w2", PieceSet::range(6, 15), 4.0),
                  swarm("w3", PieceSet::range(16, 30), 2.0)};
    for (auto& s : cfg.swarms) {
        s.alpha = 0.0;
        s.downloadable = PieceSet::full(30);  // the master file spans the gap at piece 15
    }
    apply_behavior(cfg, Behavior::altruistic);
    cfg.initial.kind = InitialKind::one_club;
    cfg.initial.clubs = {{0, 0, 200}, {1, 6, 200}, {2, 16, 200}};
    cfg.t_end = 1000;
    return cfg;
}

RunConfig scalability_build(const PresetOverrides& ov) {
    const double scale = ov.lambda_scale.value_or(1.0);
    if (!(scale > 0.0)) throw std::invalid_argument("lambda_scale must be > 0");
    RunConfig cfg;
    cfg.params = classic_params();
    cfg.params.p = 0.5;
    cfg.params.y_opt = false;
    cfg.swarms = {swarm("w1", PieceSet::range(0, 10), 4.0 * scale),
                  swarm("w2", PieceSet::range(8, 18), 2.0 * scale)};
    apply_behavior(cfg, ov.behavior.value_or(Behavior::altruistic));
    cfg.t_end = 1000;
    return cfg;
}

RunConfig sojourn_build(const PresetOverrides& ov) {
    const int k1 = ov.k.value_or(10);
    if (k1 < 2 || k1 % 2 != 0 || 3 * k1 / 2 > kMaxPieces)
        throw std::invalid_argument("k must be even, >= 2, and small enough for a 3k/2 master file");
    RunConfig cfg;
    cfg.params = classic_params();
    cfg.params.p = 0.5;
    cfg.params.y_opt = true;
    cfg.swarms = {swarm("w1", PieceSet::range(0, k1), 6.0),
                  swarm("w2", PieceSet::range(k1 / 2, 3 * k1 / 2), 2.0)};
    apply_behavior(cfg, ov.behavior.value_or(Behavior::altruistic));
    cfg.t_end = 1000;
    return cfg;
}

RunConfig ms_comparison_build(const PresetOverrides& ov) {
    const int k = ov.k.value_or(10);
    if (k < 1 || k > kMaxPieces) throw std::invalid_argument("k must lie in [1, 640]");
    RunConfig cfg;
    cfg.params.mu = 1.0;
    cfg.params.mu_hat = 1.0;
    cfg.params.L = 1;
    cfg.params.U = 1.0;
    cfg.params.p = 0.5;
    cfg.params.y_opt = true;  // L = 1: the unchoke link is the only peer link
    cfg.swarms = {swarm("w1", PieceSet::full(k), 4.0)};
    cfg.swarms[0].allies = {0};
    cfg.swarms[0].beta = 1.7;
    cfg.t_end = 5000;
    return cfg;
}

RunConfig flash_large_build(const PresetOverrides&) {
    RunConfig cfg;
    cfg.params.mu = 1.0;
    cfg.params.mu_hat = 1.0;
    cfg.params.L = 1;
    cfg.params.U = 1.0;
    cfg.params.p = 0.5;
    cfg.params.y_opt = true;
    cfg.swarms = {swarm("w1", PieceSet::full(100), 0.0)};
    cfg.swarms[0].allies = {0};
    cfg.initial.kind = InitialKind::flash_crowd;
    cfg.initial.crowds = {{0, 500}};
    cfg.t_end = 5000;  // zero arrivals: the run stops at flush
    return cfg;
}

RunConfig flash_small_build(const PresetOverrides&) {
    RunConfig cfg;
    cfg.params.mu = 1.0;
    cfg.params.mu_hat = 1.0;
    cfg.params.L = 3;
    cfg.params.U = 1.0 / 3.0;
    cfg.params.p = 0.5;
    cfg.params.y_opt = true;
    cfg.swarms = {swarm("w1", PieceSet::full(600), 0.0)};
    cfg.swarms[0].allies = {0};
    cfg.initial.kind = InitialKind::flash_crowd;
    cfg.initial.crowds = {{0, 100}};
    cfg.t_end = 20000;
    return cfg;
}

namespace of = override_field;
constexpr unsigned kPolicyKnobs = of::policy | of::zeta | of::beta;

std::vector<Preset> make_catalog() {
    std::vector<Preset> v;
    v.push_back({"fps_hard_tft",
                 "single swarm, hard tit-for-tat, no unchoke: population grows ~ (lambda - LU) t",
                 1, 0.0, kPolicyKnobs, fps_build});
    v.push_back({"lps_workconserving",
                 "random-novel policy against an 800-peer one-club: the club keeps growing",
                 1, 0.0, kPolicyKnobs, lps_build});
    for (Behavior b : {Behavior::altruistic, Behavior::opportunistic, Behavior::selfish,
                       Behavior::autonomous}) {
        v.push_back({std::string("stability_two_swarm_") + to_string(b),
                     std::string("two overlapping swarms escape 500-peer one-clubs (") +
                         to_string(b) + " behavior)",
                     1, 0.0, kPolicyKnobs,
                     [b](const PresetOverrides&) { return two_swarm_stability(b); }});
    }
    v.push_back({"three_swarm_alpha0",
                 "three altruistic swarms with alpha = 0 escape 200-peer one-clubs",
                 1, 0.0, kPolicyKnobs, three_swarm_build});
    v.push_back({"scalability_table2",
                 "two-swarm steady-state sojourn times under 1x/4x/16x arrival rates",
                 10, 0.2, kPolicyKnobs | of::behavior | of::lambda_scale, scalability_build});
    v.push_back({"sojourn_vs_filesize",
                 "two-swarm steady-state sojourn times as the file size grows",
                 5, 0.2, kPolicyKnobs | of::behavior | of::k, sojourn_build});
    v.push_back({"ms_comparison_table3",
                 "single-swarm steady-state sojourn time of the configured policy",
                 5, 0.2, kPolicyKnobs | of::k, ms_comparison_build});
    v.push_back({"flash_crowd_large",
                 "500 empty peers flush a 100-piece file (no arrivals)",
                 3, 0.0, kPolicyKnobs, flash_large_build});
    v.push_back({"flash_crowd_small",
                 "100 empty peers flush a 600-piece file (no arrivals)",
                 3, 0.0, kPolicyKnobs, flash_small_build});
    return v;
}

void reject_unsupported(const Preset& preset, const PresetOverrides& ov) {
    auto refuse = [&](const char* what) {
        throw std::invalid_argument("preset " + preset.name + " does not support the " + what +
                                    " override");
    };
    if (ov.k && !(preset.supports & of::k)) refuse("k");
    if (ov.behavior && !(preset.supports & of::behavior)) refuse("behavior");
    if (ov.policy && !(preset.supports & of::policy)) refuse("policy");
    if (ov.zeta && !(preset.supports & of::zeta)) refuse("zeta");
    if (ov.beta && !(preset.supports & of::beta)) refuse("beta");
    if (ov.lambda_scale && !(preset.supports & of::lambda_scale)) refuse("lambda_scale");
}

}  // namespace

const std::vector<Preset>& all_presets() {
    static const std::vector<Preset> catalog = make_catalog();
    return catalog;
}

const Preset* find_preset(const std::string& name) {
    for (const auto& p : all_presets())
        if (p.name == name) return &p;
    return nullptr;
}

RunConfig build_preset_config(const std::string& name, const PresetOverrides& overrides) {
    const Preset* preset = find_preset(name);
    if (!preset) throw std::invalid_argument("unknown preset: " + name);
    reject_unsupported(*preset, overrides);

    RunConfig cfg = preset->build(overrides);
    if (overrides.policy) cfg.policy.kind = *overrides.policy;
    if (overrides.zeta) cfg.policy.zeta_variant = *overrides.zeta;
    if (overrides.beta)
        for (auto& s : cfg.swarms) s.beta = *overrides.beta;
    if (overrides.t_end) cfg.t_end = *overrides.t_end;

    auto errors = validate(cfg);
    if (!errors.empty()) {
        std::string msg = "preset " + name + " produced an invalid config:";
        for (const auto& e : errors) msg += "\n  " + e;
        throw std::invalid_argument(msg);
    }
    return cfg;
}

PresetRun run_preset(const std::string& name, const PresetOverrides& overrides,
                     std::uint64_t seed) {
    const Preset* preset = find_preset(name);
    if (!preset) throw std::invalid_argument("unknown preset: " + name);
    const int replications = overrides.replications.value_or(preset->replications);
    if (replications < 1) throw std::invalid_argument("replications must be >= 1");

    RunConfig cfg = build_preset_config(name, overrides);

    PresetRun out;
    out.name = name;
    out.overrides = overrides;
    out.warmup = preset->warmup_fraction * cfg.t_end;
    out.records.reserve(static_cast<std::size_t>(replications));
    for (int r = 0; r < replications; ++r) {
        cfg.rng_seed = derive_seed(seed, static_cast<std::uint64_t>(r));
        if (r == 0) out.config = cfg;
        out.records.push_back(run(cfg));
    }
    return out;
}

std::vector<SojournStats> steady_state_sojourn(const std::vector<TrajectoryRecord>& records,
                                               double warmup) {
    if (records.empty()) throw std::invalid_argument("no records");
    const auto n = records[0].config.swarms.size();
    std::vector<SojournStats> out(n);
    for (std::size_t w = 0; w < n; ++w) {
        std::vector<double> rep_means;
        std::vector<double> durations;  // single-replication fallback, departure order
        long long count = 0;
        for (const auto& rec : records) {
            double sum = 0;
            long long cnt = 0;
            for (const auto& s : rec.sojourns) {
                if (s.swarm != static_cast<int>(w) || s.arrival_time < warmup) continue;
                const double d = s.departure_time - s.arrival_time;
                sum += d;
                ++cnt;
                if (records.size() == 1) durations.push_back(d);
            }
            if (cnt > 0) rep_means.push_back(sum / static_cast<double>(cnt));
            count += cnt;
        }
        out[w].count = count;
        if (count == 0) continue;
        if (records.size() >= 2) {
            out[w].ci = mean_ci(rep_means);
        } else {
            const std::size_t batches = std::min<std::size_t>(10, durations.size());
            const std::size_t base = durations.size() / batches;
            const std::size_t extra = durations.size() % batches;
            std::vector<double> batch_means;
            batch_means.reserve(batches);
            std::size_t pos = 0;
            for (std::size_t b = 0; b < batches; ++b) {
                const std::size_t len = base + (b < extra ? 1 : 0);
                double sum = 0;
                for (std::size_t i = 0; i < len; ++i) sum += durations[pos + i];
                pos += len;
                batch_means.push_back(sum / static_cast<double>(len));
            }
            out[w].ci = mean_ci(batch_means);
        }
    }
    return out;
}

FlushStats flush_stats(const std::vector<TrajectoryRecord>& records) {
    std::vector<double> flushes;
    std::vector<double> introductions;
    FlushStats out;
    for (const auto& rec : records) {
        if (rec.flushed)
            flushes.push_back(rec.flush_time);
        else
            ++out.unflushed;
        double latest = 0;
        bool all = !rec.all_pieces_time.empty();
        for (double t : rec.all_pieces_time) {
            if (t < 0) {
                all = false;
                break;
            }
            latest = std::max(latest, t);
        }
        if (all) introductions.push_back(latest);
    }
    if (!flushes.empty()) out.flush_time = mean_ci(flushes);
    if (!introductions.empty()) out.all_pieces_time = mean_ci(introductions);
    return out;
}

LinearFit population_trend(const TrajectoryRecord& record) {
    std::vector<double> xs, ys;
    xs.reserve(record.samples.size());
    ys.reserve(record.samples.size());
    for (const auto& s : record.samples) {
        long long total = 0;
        for (int pop : s.population) total += pop;
        xs.push_back(s.t);
        ys.push_back(static_cast<double>(total));
    }
    return linear_fit(xs, ys);
}

int peak_population(const TrajectoryRecord& record, double from, double to) {
    int peak = 0;
    for (const auto& s : record.samples) {
        if (s.t < from || s.t > to) continue;
        int total = 0;
        for (int pop : s.population) total += pop;
        peak = std::max(peak, total);
    }
    return peak;
}

namespace {

ReferenceCheck within(std::string metric, double measured, double reference, double rel_tol) {
    ReferenceCheck c;
    c.metric = std::move(metric);
    c.kind = CheckKind::within;
    c.measured = measured;
    c.reference = reference;
    c.rel_tol = rel_tol;
    c.pass = std::abs(measured - reference) <= rel_tol * std::abs(reference);
    return c;
}

ReferenceCheck bound(std::string metric, CheckKind kind, double measured, double reference) {
    ReferenceCheck c;
    c.metric = std::move(metric);
    c.kind = kind;
    c.measured = measured;
    c.reference = reference;
    c.pass = kind == CheckKind::at_least ? measured >= reference : measured <= reference;
    return c;
}

int last_quartile_peak(const PresetRun& run) {
    int peak = 0;
    for (const auto& rec : run.records)
        peak = std::max(peak,
                        peak_population(rec, 0.75 * rec.config.t_end, rec.config.t_end + 1.0));
    return peak;
}

// Steady-state sojourn references, swarm-major: {w1, w2} per (behavior, scale).
struct SojournRefs {
    double w1, w2;
};
SojournRefs scalability_reference(Behavior b, int scale_index) {
    static const SojournRefs table[4][3] = {
        {{2.927, 4.400}, {3.088, 3.990}, {3.134, 3.971}},  // altruistic
        {{3.704, 5.042}, {3.832, 5.341}, {3.956, 5.570}},  // opportunistic
        {{4.378, 6.394}, {4.590, 6.482}, {4.667, 6.604}},  // selfish
        {{2.791, 3.769}, {2.712, 2.667}, {2.788, 2.740}},  // autonomous
    };
    return table[static_cast<int>(b)][scale_index];
}

}  // namespace

const PolicySojournRefs* ms_comparison_reference(int k) {
    static const std::pair<int, PolicySojournRefs> table[] = {
        {2, {6.246, 5.022, 5.178}},       {10, {18.250, 12.546, 12.525}},
        {20, {31.741, 23.020, 23.058}},   {40, {55.648, 43.775, 43.750}},
        {80, {100.300, 84.374, 84.421}},  {100, {121.804, 104.849, 104.610}},
        {200, {226.998, 205.300, 205.176}}, {500, {533.737, 506.480, 506.351}},
    };
    for (const auto& [kk, refs] : table)
        if (kk == k) return &refs;
    return nullptr;
}

std::vector<ReferenceCheck> reference_checks(const PresetRun& run) {
    std::vector<ReferenceCheck> checks;
    if (run.records.empty()) return checks;

    if (run.name == "fps_hard_tft") {
        double slope = 0;
        for (const auto& rec : run.records) slope += population_trend(rec).slope;
        slope /= static_cast<double>(run.records.size());
        double lambda_total = 0;
        for (const auto& s : run.config.swarms) lambda_total += s.lambda;
        const double growth = lambda_total - run.config.params.seed_rate_total();
        checks.push_back(within("population_slope", slope, growth, 0.3));
    } else if (run.name == "lps_workconserving") {
        double final_pop = 0;
        for (const auto& rec : run.records)
            for (int pop : rec.final_population) final_pop += pop;
        final_pop /= static_cast<double>(run.records.size());
        const double club = static_cast<double>(run.config.initial.clubs.at(0).size);
        checks.push_back(bound("final_population", CheckKind::at_least, final_pop, 1.5 * club));
    } else if (run.name.rfind("stability_two_swarm_", 0) == 0 ||
               run.name == "three_swarm_alpha0") {
        const auto n = run.config.swarms.size();
        for (std::size_t w = 0; w < n; ++w) {
            int min_pop = run.records[0].samples.empty() ? 0 : 1 << 30;
            for (const auto& rec : run.records)
                for (const auto& s : rec.samples) min_pop = std::min(min_pop, s.population[w]);
            checks.push_back(bound(run.config.swarms[w].id + "_min_population",
                                   CheckKind::at_most, min_pop, 150));
        }
        checks.push_back(
            bound("last_quartile_peak", CheckKind::at_most, last_quartile_peak(run), 300));
    } else if (run.name == "scalability_table2") {
        const double scale = run.overrides.lambda_scale.value_or(1.0);
        int scale_index = -1;
        if (scale == 1.0) scale_index = 0;
        if (scale == 4.0) scale_index = 1;
        if (scale == 16.0) scale_index = 2;
        if (scale_index < 0) return checks;
        const Behavior b = run.overrides.behavior.value_or(Behavior::altruistic);
        const SojournRefs refs = scalability_reference(b, scale_index);
        const auto stats = steady_state_sojourn(run.records, run.warmup);
        checks.push_back(within("w1_sojourn", stats[0].ci.mean, refs.w1, 0.20));
        checks.push_back(within("w2_sojourn", stats[1].ci.mean, refs.w2, 0.20));
    } else if (run.name == "ms_comparison_table3") {
        const PolicySojournRefs* refs = ms_comparison_reference(run.overrides.k.value_or(10));
        if (!refs) return checks;
        const PolicyKind kind = run.overrides.policy.value_or(PolicyKind::RFwPMS);
        double reference = 0;
        if (kind == PolicyKind::MS)
            reference = refs->ms;
        else if (kind == PolicyKind::TMS)
            reference = refs->tms;
        else if (kind == PolicyKind::RFwPMS)
            reference = refs->rfwpms;
        else
            return checks;
        const auto stats = steady_state_sojourn(run.records, run.warmup);
        checks.push_back(within("sojourn", stats[0].ci.mean, reference, 0.15));
    } else if (run.name == "flash_crowd_large") {
        const auto stats = flush_stats(run.records);
        checks.push_back(bound("unflushed", CheckKind::at_most, stats.unflushed, 0));
        const double k = static_cast<double>(master_file_size(run.config.swarms));
        const double expected = k / run.config.params.seed_rate_total();
        checks.push_back(within("all_pieces_time", stats.all_pieces_time.mean, expected, 0.25));
    } else if (run.name == "flash_crowd_small") {
        const auto stats = flush_stats(run.records);
        checks.push_back(bound("unflushed", CheckKind::at_most, stats.unflushed, 0));
    }
    return checks;
}

}  // namespace swarmlab
