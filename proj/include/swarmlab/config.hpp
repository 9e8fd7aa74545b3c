#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "swarmlab/presets.hpp"
#include "swarmlab/types.hpp"

namespace swarmlab {

// Config parsing/validation failure: one message per problem. Syntax errors
// carry line and column; structural and semantic errors carry a
// JSON-pointer-style path.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> messages);
    const std::vector<std::string>& messages() const { return messages_; }

private:
    std::vector<std::string> messages_;
};

struct ParsedConfig {
    RunConfig run;
    int replications = 1;
    std::optional<double> warmup;  // absolute time; callers default it to 20% of t_end
};

// JSON schema (all piece ids 1-based, swarms referenced by id):
//   network {mu, mu_hat, L, U, p, y_opt, mode, seed_split, scalability_mode}
//   swarms  [{id, file, downloadable, allies, lambda, alpha, beta}]
//   policy  {kind, zeta_variant, tms_threshold}
//   sim     {t_end, sample_interval, rng_seed, warmup, replications, initial,
//            record_chunk_vectors, record_push_rates}
// Piece sets are written as a count k (pieces 1..k), an array of 1-based ids,
// or {from, to} inclusive. seed_split maps swarm id -> rate. allies lists
// swarm ids; the swarm itself is always included. Unknown keys are rejected.
ParsedConfig parse_config_json(const nlohmann::json& doc);
ParsedConfig parse_config_text(const std::string& text);

// Serializes back to the schema above; parsing the result reproduces the
// same resolved configuration.
nlohmann::json config_to_json(const ParsedConfig& parsed);

// Preset override block: {k, behavior, policy, zeta, beta, lambda_scale,
// replications, t_end}, every key optional, unknown keys rejected.
PresetOverrides overrides_from_json(const nlohmann::json& doc);
nlohmann::json overrides_to_json(const PresetOverrides& overrides);

}  // namespace swarmlab
