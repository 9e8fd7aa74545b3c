#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "swarmlab/config.hpp"
#include "swarmlab/engine.hpp"
#include "swarmlab/lyapunov.hpp"
#include "swarmlab/presets.hpp"

namespace swarmlab {

inline constexpr const char* kVersion = "0.1.0";

// Shortest %.10g rendering; used for every CSV number so replays are
// byte-identical.
std::string format_double(double v);

// One row per (sample, swarm): t, swarm, population, nu_min, nu_max, mbar,
// M (total mismatch), P (held-piece total), V1, V2, V3. The value columns
// are nan when no Lyapunov constants apply.
void write_trajectory_csv(std::ostream& out, const TrajectoryRecord& record,
                          const LyapunovConfig* lyapunov);

// One row per departure: swarm, arrival, departure.
void write_sojourns_csv(std::ostream& out, const TrajectoryRecord& record);

// Hash of the serialized resolved configuration; pins replays.
std::uint64_t config_hash(const ParsedConfig& parsed);

// Aggregate summaries. Both embed the version, the resolved config and its
// hash, per-replication counters, and steady-state statistics; the preset
// variant adds the override set, reference values, and pass/fail verdicts.
nlohmann::json simulate_summary(const ParsedConfig& parsed,
                                const std::vector<TrajectoryRecord>& records,
                                std::uint64_t root_seed, double warmup, int threads);
nlohmann::json preset_summary(const PresetRun& run, std::uint64_t root_seed, int threads);

}  // namespace swarmlab
