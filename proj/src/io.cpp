#include "swarmlab/io.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>

#include "swarmlab/stats.hpp"

namespace swarmlab {

using nlohmann::json;

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

void write_trajectory_csv(std::ostream& out, const TrajectoryRecord& record,
                          const LyapunovConfig* lyapunov) {
    out << "t,swarm,population,nu_min,nu_max,mbar,M,P,V1,V2,V3\n";
    const auto& swarms = record.config.swarms;
    for (const auto& s : record.samples) {
        for (std::size_t w = 0; w < swarms.size(); ++w) {
            out << format_double(s.t) << ',' << swarms[w].id << ',' << s.population[w] << ','
                << s.nu_min[w] << ',' << s.nu_max[w] << ',' << s.mbar[w] << ','
                << s.total_mismatch[w] << ',' << s.total[w] << ',';
            if (lyapunov) {
                const auto terms =
                    lyapunov_terms(lyapunov->swarms[w], lyapunov->eta, s.population[w],
                                   s.nu_max[w], s.total[w], s.total_mismatch[w]);
                out << format_double(terms.v1) << ',' << format_double(terms.v2) << ','
                    << format_double(terms.v3) << '\n';
            } else {
                out << "nan,nan,nan\n";
            }
        }
    }
}

void write_sojourns_csv(std::ostream& out, const TrajectoryRecord& record) {
    out << "swarm,arrival,departure\n";
    const auto& swarms = record.config.swarms;
    for (const auto& s : record.sojourns)
        out << swarms[static_cast<std::size_t>(s.swarm)].id << ','
            << format_double(s.arrival_time) << ',' << format_double(s.departure_time) << '\n';
}

std::uint64_t config_hash(const ParsedConfig& parsed) {
    return fnv1a64(config_to_json(parsed).dump());
}

namespace {

std::string hash_hex(std::uint64_t h) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
    return buf;
}

json counters_json(const EventCounters& c) {
    return json{{"arrivals", c.arrivals},
                {"seed_ticks", c.seed_ticks},
                {"tft_ticks", c.tft_ticks},
                {"unchoke_ticks", c.unchoke_ticks},
                {"noop_ticks", c.noop_ticks},
                {"commits", c.commits},
                {"transfers_rare", c.transfers_rare},
                {"transfers_nonrare", c.transfers_nonrare},
                {"suppressed", c.suppressed},
                {"transfers_extra", c.transfers_extra},
                {"empty_transfers", c.empty_transfers},
                {"departures", c.departures}};
}

json record_json(const TrajectoryRecord& rec) {
    return json{{"rng_seed", rec.config.rng_seed},
                {"end_time", rec.end_time},
                {"flushed", rec.flushed},
                {"flush_time", rec.flush_time},
                {"all_pieces_time", rec.all_pieces_time},
                {"final_population", rec.final_population},
                {"population_time_integral", rec.population_time_integral},
                {"counters", counters_json(rec.counters)}};
}

json ci_json(const MeanCi& ci) {
    return json{{"mean", ci.mean},
                {"half_width", ci.half_width},
                {"stddev", ci.stddev},
                {"n", ci.n},
                {"confidence", ci.confidence}};
}

json sojourn_json(const std::vector<TrajectoryRecord>& records,
                  const std::vector<SwarmSpec>& swarms, double warmup) {
    json arr = json::array();
    const auto stats = steady_state_sojourn(records, warmup);
    for (std::size_t w = 0; w < stats.size(); ++w) {
        json entry{{"swarm", swarms[w].id}, {"count", stats[w].count}};
        if (stats[w].count > 0) entry["estimate"] = ci_json(stats[w].ci);
        arr.push_back(std::move(entry));
    }
    return arr;
}

json population_json(const std::vector<TrajectoryRecord>& records) {
    json arr = json::array();
    for (const auto& rec : records) {
        json entry;
        if (rec.samples.size() >= 2) {
            const auto fit = population_trend(rec);
            long long first = 0, last = 0;
            for (int pop : rec.samples.front().population) first += pop;
            for (int pop : rec.samples.back().population) last += pop;
            entry = json{{"slope", fit.slope},
                         {"intercept", fit.intercept},
                         {"r2", fit.r2},
                         {"growing", fit.slope > 0 && last >= first}};
        }
        arr.push_back(std::move(entry));
    }
    return arr;
}

json flush_json(const std::vector<TrajectoryRecord>& records) {
    const auto stats = flush_stats(records);
    json out{{"unflushed", stats.unflushed}};
    if (stats.flush_time.n > 0) out["flush_time"] = ci_json(stats.flush_time);
    if (stats.all_pieces_time.n > 0) out["all_pieces_time"] = ci_json(stats.all_pieces_time);
    return out;
}

json diagnostics_json(const RunConfig& cfg, const std::vector<TrajectoryRecord>& records) {
    json out;
    const double eta = 0.5, epsilon_prime = 0.05;
    try {
        const auto lyap = derive_constants(cfg.params, cfg.swarms, eta, epsilon_prime);
        json constants = json::array();
        for (std::size_t w = 0; w < lyap.swarms.size(); ++w) {
            const auto& c = lyap.swarms[w];
            constants.push_back(json{{"swarm", cfg.swarms[w].id},
                                     {"c1", c.c1},
                                     {"c2", c.c2},
                                     {"c3", c.c3},
                                     {"delta", c.delta},
                                     {"d_w", c.d_w},
                                     {"n_w1", c.n_w1}});
        }
        out["lyapunov"] = json{{"available", true},
                               {"eta", eta},
                               {"epsilon_prime", epsilon_prime},
                               {"xi2", lyap.xi2},
                               {"constants", std::move(constants)}};
    } catch (const std::exception& e) {
        out["lyapunov"] = json{{"available", false}, {"reason", e.what()}};
    }

    json envelopes = json::array();
    bool any_envelope = false;
    for (const auto& rec : records) {
        if (!rec.push_rates) {
            envelopes.push_back(json());
            continue;
        }
        any_envelope = true;
        const auto report = rate_envelope_check(rec);
        envelopes.push_back(json{{"confidence", report.confidence},
                                 {"ratio_ok", report.ratio_ok},
                                 {"consistent", report.consistent},
                                 {"violated", report.violated},
                                 {"inconclusive", report.inconclusive}});
    }
    if (any_envelope) out["push_rate_envelope"] = std::move(envelopes);
    return out;
}

const char* to_string(CheckKind kind) {
    switch (kind) {
        case CheckKind::within: return "within";
        case CheckKind::at_least: return "at_least";
        case CheckKind::at_most: return "at_most";
    }
    return "?";
}

json checks_json(const std::vector<ReferenceCheck>& checks) {
    json arr = json::array();
    for (const auto& c : checks) {
        json entry{{"metric", c.metric},
                   {"kind", to_string(c.kind)},
                   {"measured", c.measured},
                   {"reference", c.reference},
                   {"pass", c.pass}};
        if (c.kind == CheckKind::within) entry["rel_tol"] = c.rel_tol;
        arr.push_back(std::move(entry));
    }
    return arr;
}

}  // namespace

json simulate_summary(const ParsedConfig& parsed, const std::vector<TrajectoryRecord>& records,
                      std::uint64_t root_seed, double warmup, int threads) {
    json reps = json::array();
    for (const auto& rec : records) reps.push_back(record_json(rec));
    json statistics{{"sojourn", sojourn_json(records, parsed.run.swarms, warmup)},
                    {"population", population_json(records)}};
    return json{{"version", kVersion},
                {"kind", "simulate"},
                {"config", config_to_json(parsed)},
                {"config_hash", hash_hex(config_hash(parsed))},
                {"root_seed", root_seed},
                {"threads", threads},
                {"warmup", warmup},
                {"replications", std::move(reps)},
                {"statistics", std::move(statistics)},
                {"diagnostics", diagnostics_json(parsed.run, records)}};
}

json preset_summary(const PresetRun& run, std::uint64_t root_seed, int threads) {
    ParsedConfig parsed;
    parsed.run = run.config;
    parsed.replications = static_cast<int>(run.records.size());
    parsed.warmup = run.warmup;

    json reps = json::array();
    for (const auto& rec : run.records) reps.push_back(record_json(rec));

    json statistics{{"sojourn", sojourn_json(run.records, run.config.swarms, run.warmup)},
                    {"population", population_json(run.records)},
                    {"flush", flush_json(run.records)}};
    if (run.name == "ms_comparison_table3") {
        if (const auto* refs = ms_comparison_reference(run.overrides.k.value_or(10)))
            statistics["reference"] = json{
                {"ms", refs->ms},
                {"tms", refs->tms},
                {"rfwpms", refs->rfwpms},
                {"improvement_percent_over_ms", refs->improvement_percent()}};
    }

    const auto checks = reference_checks(run);
    bool all_pass = true;
    for (const auto& c : checks) all_pass = all_pass && c.pass;

    return json{{"version", kVersion},
                {"kind", "preset"},
                {"preset", run.name},
                {"overrides", overrides_to_json(run.overrides)},
                {"config", config_to_json(parsed)},
                {"config_hash", hash_hex(config_hash(parsed))},
                {"root_seed", root_seed},
                {"threads", threads},
                {"warmup", run.warmup},
                {"replications", std::move(reps)},
                {"statistics", std::move(statistics)},
                {"checks", checks_json(checks)},
                {"all_pass", all_pass},
                {"diagnostics", diagnostics_json(run.config, run.records)}};
}

}  // namespace swarmlab
