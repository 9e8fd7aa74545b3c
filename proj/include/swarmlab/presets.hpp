#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "swarmlab/engine.hpp"
#include "swarmlab/stats.hpp"
#include "swarmlab/types.hpp"

namespace swarmlab {

// Inter-swarm collaboration patterns: who uploads to whom and which extra
// pieces peers will cache. Autonomous swarms additionally confine contacts to
// their own swarm and split the seed capacity evenly.
enum class Behavior { altruistic, opportunistic, selfish, autonomous };

const char* to_string(Behavior b);
std::optional<Behavior> behavior_from_string(const std::string& s);

// Rewires allies / downloadable sets / seed mode on a finished config.
void apply_behavior(RunConfig& config, Behavior behavior);

struct PresetOverrides {
    std::optional<int> k;                  // file-size knob where applicable
    std::optional<Behavior> behavior;
    std::optional<PolicyKind> policy;
    std::optional<ZetaVariant> zeta;
    std::optional<double> beta;            // applied to every swarm
    std::optional<double> lambda_scale;    // multiplies every arrival rate
    std::optional<int> replications;
    std::optional<double> t_end;
};

namespace override_field {
inline constexpr unsigned k = 1u << 0;
inline constexpr unsigned behavior = 1u << 1;
inline constexpr unsigned policy = 1u << 2;
inline constexpr unsigned zeta = 1u << 3;
inline constexpr unsigned beta = 1u << 4;
inline constexpr unsigned lambda_scale = 1u << 5;
}  // namespace override_field

struct Preset {
    std::string name;
    std::string summary;
    int replications = 1;
    double warmup_fraction = 0.0;  // of t_end, for steady-state statistics
    unsigned supports = 0;         // override_field bits honored by build
    std::function<RunConfig(const PresetOverrides&)> build;
};

const std::vector<Preset>& all_presets();
const Preset* find_preset(const std::string& name);  // nullptr when unknown

// Resolves the preset and overrides to a runnable config; throws
// std::invalid_argument for unknown presets, unsupported overrides, or a
// config that fails validation.
RunConfig build_preset_config(const std::string& name, const PresetOverrides& overrides);

struct PresetRun {
    std::string name;
    PresetOverrides overrides;  // as resolved against the preset
    RunConfig config;           // replication 0's config (seeds differ per replication)
    double warmup = 0;
    std::vector<TrajectoryRecord> records;
};

// Runs the preset's replications serially with per-replication seeds derived
// from `seed`.
PresetRun run_preset(const std::string& name, const PresetOverrides& overrides,
                     std::uint64_t seed);

// Per-swarm steady-state sojourn estimate: peers arriving after the warmup
// whose departure was recorded. One mean per replication feeds the interval;
// a single replication falls back to ten equal-count batches.
struct SojournStats {
    MeanCi ci;
    long long count = 0;  // departures behind the estimate
};
std::vector<SojournStats> steady_state_sojourn(const std::vector<TrajectoryRecord>& records,
                                               double warmup);

// Flush-out summary for crowd presets (no arrivals): time until the roster
// emptied and until every file piece existed, averaged over the replications
// that completed. `unflushed` counts replications still populated at t_end.
struct FlushStats {
    MeanCi flush_time;
    MeanCi all_pieces_time;  // max over swarms within each replication
    int unflushed = 0;
};
FlushStats flush_stats(const std::vector<TrajectoryRecord>& records);

// Least-squares slope of total population against time.
LinearFit population_trend(const TrajectoryRecord& record);

// Largest total population over samples with t inside [from, to].
int peak_population(const TrajectoryRecord& record, double from, double to);

enum class CheckKind { within, at_least, at_most };

struct ReferenceCheck {
    std::string metric;
    CheckKind kind = CheckKind::within;
    double measured = 0;
    double reference = 0;
    double rel_tol = 0;  // within-kind only
    bool pass = false;
};

// Pinned expectations for presets that have them; empty otherwise.
std::vector<ReferenceCheck> reference_checks(const PresetRun& run);

// Tabulated steady-state sojourn references for the single-swarm policy
// comparison; nullptr for file sizes off the table.
struct PolicySojournRefs {
    double ms = 0;
    double tms = 0;
    double rfwpms = 0;

    double improvement_percent() const { return (ms - rfwpms) / ms * 100.0; }
};
const PolicySojournRefs* ms_comparison_reference(int k);

}  // namespace swarmlab
