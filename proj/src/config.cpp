#include "swarmlab/config.hpp"

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <set>
#include <string>

namespace swarmlab {

using nlohmann::json;

namespace {

std::string joined(const std::vector<std::string>& messages) {
    std::string out = "invalid config";
    for (const auto& m : messages) out += "\n  " + m;
    return out;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> messages)
    : std::runtime_error(joined(messages)), messages_(std::move(messages)) {}

namespace {

struct Collector {
    std::vector<std::string> errors;

    void add(const std::string& path, const std::string& message) {
        errors.push_back(path + ": " + message);
    }
    void raise_if_any() {
        if (!errors.empty()) throw ConfigError(std::move(errors));
    }
};

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed, Collector& errs) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* key : allowed)
            if (item.key() == key) known = true;
        if (!known) errs.add(path + "/" + item.key(), "unknown key");
    }
}

bool expect_object(const json& v, const std::string& path, Collector& errs) {
    if (v.is_object()) return true;
    errs.add(path, "expected an object");
    return false;
}

// Returns true when the key is present AND well-typed; absent keys leave the
// default untouched without an error.
bool get_number(const json& obj, const std::string& path, const char* key, double& out,
                Collector& errs) {
    auto it = obj.find(key);
    if (it == obj.end()) return false;
    if (!it->is_number()) {
        errs.add(path + "/" + key, "expected a number");
        return false;
    }
    out = it->get<double>();
    return true;
}

bool get_int(const json& obj, const std::string& path, const char* key, int& out,
             Collector& errs) {
    auto it = obj.find(key);
    if (it == obj.end()) return false;
    if (!it->is_number_integer()) {
        errs.add(path + "/" + key, "expected an integer");
        return false;
    }
    out = it->get<int>();
    return true;
}

bool get_bool(const json& obj, const std::string& path, const char* key, bool& out,
              Collector& errs) {
    auto it = obj.find(key);
    if (it == obj.end()) return false;
    if (!it->is_boolean()) {
        errs.add(path + "/" + key, "expected true or false");
        return false;
    }
    out = it->get<bool>();
    return true;
}

bool get_string(const json& obj, const std::string& path, const char* key, std::string& out,
                Collector& errs) {
    auto it = obj.find(key);
    if (it == obj.end()) return false;
    if (!it->is_string()) {
        errs.add(path + "/" + key, "expected a string");
        return false;
    }
    out = it->get<std::string>();
    return true;
}

bool get_seed(const json& obj, const std::string& path, const char* key, std::uint64_t& out,
              Collector& errs) {
    auto it = obj.find(key);
    if (it == obj.end()) return false;
    if (!it->is_number_integer() ||
        (!it->is_number_unsigned() && it->get<std::int64_t>() < 0)) {
        errs.add(path + "/" + key, "expected a non-negative integer");
        return false;
    }
    out = it->get<std::uint64_t>();
    return true;
}

// A piece set: count k, array of 1-based ids, or inclusive {from, to}.
std::optional<PieceSet> parse_pieces(const json& v, const std::string& path, Collector& errs) {
    auto id_ok = [&](int id) {
        if (id >= 1 && id <= kMaxPieces) return true;
        errs.add(path, "piece id " + std::to_string(id) + " outside [1, " +
                           std::to_string(kMaxPieces) + "]");
        return false;
    };
    if (v.is_number_integer()) {
        const int k = v.get<int>();
        if (!id_ok(k)) return std::nullopt;
        return PieceSet::full(k);
    }
    if (v.is_array()) {
        PieceSet s;
        for (const auto& e : v) {
            if (!e.is_number_integer()) {
                errs.add(path, "expected 1-based piece ids");
                return std::nullopt;
            }
            const int id = e.get<int>();
            if (!id_ok(id)) return std::nullopt;
            if (s.test(id - 1)) {
                errs.add(path, "duplicate piece id " + std::to_string(id));
                return std::nullopt;
            }
            s.set(id - 1);
        }
        return s;
    }
    if (v.is_object()) {
        check_keys(v, path, {"from", "to"}, errs);
        int from = 0, to = 0;
        const bool has_from = get_int(v, path, "from", from, errs);
        const bool has_to = get_int(v, path, "to", to, errs);
        if (!has_from || !has_to) {
            errs.add(path, "range form needs both from and to");
            return std::nullopt;
        }
        if (!id_ok(from) || !id_ok(to)) return std::nullopt;
        if (from > to) {
            errs.add(path, "from exceeds to");
            return std::nullopt;
        }
        return PieceSet::range(from - 1, to);
    }
    errs.add(path, "expected a piece count, an array of 1-based ids, or {from, to}");
    return std::nullopt;
}

int swarm_index_of(const std::vector<SwarmSpec>& swarms, const std::string& id) {
    for (std::size_t w = 0; w < swarms.size(); ++w)
        if (swarms[w].id == id) return static_cast<int>(w);
    return -1;
}

void parse_network(const json& doc, NetworkParams& np, std::vector<SwarmSpec>& swarms,
                   Collector& errs) {
    const std::string path = "/network";
    if (!expect_object(doc, path, errs)) return;
    check_keys(doc, path,
               {"mu", "mu_hat", "L", "U", "p", "y_opt", "mode", "seed_split",
                "scalability_mode"},
               errs);
    get_number(doc, path, "mu", np.mu, errs);
    get_number(doc, path, "mu_hat", np.mu_hat, errs);
    get_int(doc, path, "L", np.L, errs);
    get_number(doc, path, "U", np.U, errs);
    get_number(doc, path, "p", np.p, errs);
    get_bool(doc, path, "y_opt", np.y_opt, errs);
    get_bool(doc, path, "scalability_mode", np.scalability_mode, errs);

    std::string mode;
    if (get_string(doc, path, "mode", mode, errs)) {
        auto m = mode_from_string(mode);
        if (m)
            np.mode = *m;
        else
            errs.add(path + "/mode", "expected \"shared\" or \"autonomous\"");
    }

    auto it = doc.find("seed_split");
    if (it != doc.end()) {
        if (!it->is_object()) {
            errs.add(path + "/seed_split", "expected an object mapping swarm id to rate");
            return;
        }
        np.seed_split.assign(swarms.size(), 0.0);
        for (const auto& item : it->items()) {
            const int w = swarm_index_of(swarms, item.key());
            if (w < 0) {
                errs.add(path + "/seed_split/" + item.key(), "unknown swarm id");
                continue;
            }
            if (!item.value().is_number()) {
                errs.add(path + "/seed_split/" + item.key(), "expected a number");
                continue;
            }
            np.seed_split[static_cast<std::size_t>(w)] = item.value().get<double>();
        }
    }
}

void parse_swarms(const json& arr, std::vector<SwarmSpec>& swarms, Collector& errs) {
    if (!arr.is_array() || arr.empty()) {
        errs.add("/swarms", "expected a non-empty array of swarms");
        return;
    }
    // First pass: ids and piece sets, so allies and seed_split can resolve.
    for (std::size_t w = 0; w < arr.size(); ++w) {
        const std::string path = "/swarms/" + std::to_string(w);
        const json& sj = arr[w];
        SwarmSpec s;
        if (!expect_object(sj, path, errs)) {
            swarms.push_back(s);
            continue;
        }
        check_keys(sj, path, {"id", "file", "downloadable", "allies", "lambda", "alpha", "beta"},
                   errs);
        if (!get_string(sj, path, "id", s.id, errs)) errs.add(path + "/id", "required");
        if (auto it = sj.find("file"); it != sj.end()) {
            if (auto ps = parse_pieces(*it, path + "/file", errs)) s.file = *ps;
        } else {
            errs.add(path + "/file", "required");
        }
        if (auto it = sj.find("downloadable"); it != sj.end()) {
            if (auto ps = parse_pieces(*it, path + "/downloadable", errs)) s.downloadable = *ps;
        } else {
            s.downloadable = s.file;
        }
        get_number(sj, path, "lambda", s.lambda, errs);
        get_number(sj, path, "alpha", s.alpha, errs);
        get_number(sj, path, "beta", s.beta, errs);
        swarms.push_back(s);
    }
    // Second pass: allies by id; the swarm itself is implied.
    for (std::size_t w = 0; w < arr.size(); ++w) {
        const std::string path = "/swarms/" + std::to_string(w) + "/allies";
        auto& s = swarms[w];
        s.allies = {static_cast<int>(w)};
        if (!arr[w].is_object()) continue;
        auto it = arr[w].find("allies");
        if (it == arr[w].end()) continue;
        if (!it->is_array()) {
            errs.add(path, "expected an array of swarm ids");
            continue;
        }
        for (const auto& e : *it) {
            if (!e.is_string()) {
                errs.add(path, "expected swarm ids");
                continue;
            }
            const int v = swarm_index_of(swarms, e.get<std::string>());
            if (v < 0) {
                errs.add(path, "unknown swarm id \"" + e.get<std::string>() + "\"");
                continue;
            }
            if (std::find(s.allies.begin(), s.allies.end(), v) == s.allies.end())
                s.allies.push_back(v);
        }
    }
}

void parse_policy(const json& doc, PolicyConfig& policy, Collector& errs) {
    const std::string path = "/policy";
    if (!expect_object(doc, path, errs)) return;
    check_keys(doc, path, {"kind", "zeta_variant", "tms_threshold"}, errs);
    std::string kind;
    if (get_string(doc, path, "kind", kind, errs)) {
        auto k = policy_kind_from_string(kind);
        if (k)
            policy.kind = *k;
        else
            errs.add(path + "/kind",
                     "expected one of rfwpms, rnwpms, ms, tms, rf, rn");
    }
    std::string variant;
    if (get_string(doc, path, "zeta_variant", variant, errs)) {
        auto z = zeta_variant_from_string(variant);
        if (z)
            policy.zeta_variant = *z;
        else
            errs.add(path + "/zeta_variant", "expected \"standard\" or \"flashcrowd\"");
    }
    int threshold = 0;
    if (get_int(doc, path, "tms_threshold", threshold, errs)) policy.tms_threshold = threshold;
}

int parse_initial_swarm(const json& obj, const std::string& path,
                        const std::vector<SwarmSpec>& swarms, Collector& errs) {
    std::string id;
    if (!get_string(obj, path, "swarm", id, errs)) {
        errs.add(path + "/swarm", "required");
        return -1;
    }
    const int w = swarm_index_of(swarms, id);
    if (w < 0) errs.add(path + "/swarm", "unknown swarm id \"" + id + "\"");
    return w;
}

void parse_initial(const json& doc, InitialState& init, const std::vector<SwarmSpec>& swarms,
                   Collector& errs) {
    const std::string path = "/sim/initial";
    if (!expect_object(doc, path, errs)) return;
    check_keys(doc, path, {"kind", "clubs", "crowds", "peers"}, errs);
    std::string kind;
    if (get_string(doc, path, "kind", kind, errs)) {
        if (kind == "empty")
            init.kind = InitialKind::empty;
        else if (kind == "one_club")
            init.kind = InitialKind::one_club;
        else if (kind == "flash_crowd")
            init.kind = InitialKind::flash_crowd;
        else if (kind == "explicit_roster")
            init.kind = InitialKind::explicit_roster;
        else
            errs.add(path + "/kind",
                     "expected one of empty, one_club, flash_crowd, explicit_roster");
    }
    if (auto it = doc.find("clubs"); it != doc.end()) {
        if (!it->is_array()) {
            errs.add(path + "/clubs", "expected an array");
        } else {
            for (std::size_t i = 0; i < it->size(); ++i) {
                const std::string cpath = path + "/clubs/" + std::to_string(i);
                const json& cj = (*it)[i];
                if (!expect_object(cj, cpath, errs)) continue;
                check_keys(cj, cpath, {"swarm", "missing_piece", "size"}, errs);
                OneClubInit club;
                club.swarm = parse_initial_swarm(cj, cpath, swarms, errs);
                int piece = 0;
                if (get_int(cj, cpath, "missing_piece", piece, errs)) {
                    if (piece < 1 || piece > kMaxPieces)
                        errs.add(cpath + "/missing_piece", "expected a 1-based piece id");
                    else
                        club.missing_piece = piece - 1;
                } else {
                    errs.add(cpath + "/missing_piece", "required");
                }
                if (!get_int(cj, cpath, "size", club.size, errs))
                    errs.add(cpath + "/size", "required");
                init.clubs.push_back(club);
            }
        }
    }
    if (auto it = doc.find("crowds"); it != doc.end()) {
        if (!it->is_array()) {
            errs.add(path + "/crowds", "expected an array");
        } else {
            for (std::size_t i = 0; i < it->size(); ++i) {
                const std::string cpath = path + "/crowds/" + std::to_string(i);
                const json& cj = (*it)[i];
                if (!expect_object(cj, cpath, errs)) continue;
                check_keys(cj, cpath, {"swarm", "size"}, errs);
                FlashCrowdInit crowd;
                crowd.swarm = parse_initial_swarm(cj, cpath, swarms, errs);
                if (!get_int(cj, cpath, "size", crowd.size, errs))
                    errs.add(cpath + "/size", "required");
                init.crowds.push_back(crowd);
            }
        }
    }
    if (auto it = doc.find("peers"); it != doc.end()) {
        if (!it->is_array()) {
            errs.add(path + "/peers", "expected an array");
        } else {
            for (std::size_t i = 0; i < it->size(); ++i) {
                const std::string cpath = path + "/peers/" + std::to_string(i);
                const json& cj = (*it)[i];
                if (!expect_object(cj, cpath, errs)) continue;
                check_keys(cj, cpath, {"swarm", "cache"}, errs);
                ExplicitPeerInit peer;
                peer.swarm = parse_initial_swarm(cj, cpath, swarms, errs);
                if (auto c = cj.find("cache"); c != cj.end()) {
                    if (auto ps = parse_pieces(*c, cpath + "/cache", errs)) peer.cache = *ps;
                }
                init.peers.push_back(peer);
            }
        }
    }
}

void parse_sim(const json& doc, ParsedConfig& parsed, Collector& errs) {
    const std::string path = "/sim";
    if (!expect_object(doc, path, errs)) return;
    check_keys(doc, path,
               {"t_end", "sample_interval", "rng_seed", "warmup", "replications", "initial",
                "record_chunk_vectors", "record_push_rates"},
               errs);
    RunConfig& run = parsed.run;
    get_number(doc, path, "t_end", run.t_end, errs);
    get_number(doc, path, "sample_interval", run.sample_interval, errs);
    get_seed(doc, path, "rng_seed", run.rng_seed, errs);
    get_bool(doc, path, "record_chunk_vectors", run.record_chunk_vectors, errs);
    get_bool(doc, path, "record_push_rates", run.record_push_rates, errs);
    double warmup = 0;
    if (get_number(doc, path, "warmup", warmup, errs)) {
        if (warmup < 0)
            errs.add(path + "/warmup", "must be >= 0");
        else
            parsed.warmup = warmup;
    }
    if (get_int(doc, path, "replications", parsed.replications, errs)) {
        if (parsed.replications < 1) errs.add(path + "/replications", "must be >= 1");
    }
    if (auto it = doc.find("initial"); it != doc.end())
        parse_initial(*it, run.initial, run.swarms, errs);
}

}  // namespace

ParsedConfig parse_config_json(const json& doc) {
    Collector errs;
    ParsedConfig parsed;

    if (!doc.is_object()) {
        errs.add("/", "expected a JSON object");
        errs.raise_if_any();
    }
    check_keys(doc, "", {"network", "swarms", "policy", "sim"}, errs);

    if (auto it = doc.find("swarms"); it != doc.end())
        parse_swarms(*it, parsed.run.swarms, errs);
    else
        errs.add("/swarms", "required");
    if (auto it = doc.find("network"); it != doc.end())
        parse_network(*it, parsed.run.params, parsed.run.swarms, errs);
    if (auto it = doc.find("policy"); it != doc.end()) parse_policy(*it, parsed.run.policy, errs);
    if (auto it = doc.find("sim"); it != doc.end()) parse_sim(*it, parsed, errs);

    errs.raise_if_any();

    errs.errors = validate(parsed.run);
    errs.raise_if_any();
    return parsed;
}

ParsedConfig parse_config_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        // e.byte is 1-based; count newlines before it for the line anchor.
        std::size_t line = 1, last_break = 0;
        const std::size_t stop = std::min(text.size(), e.byte > 0 ? e.byte - 1 : 0);
        for (std::size_t i = 0; i < stop; ++i) {
            if (text[i] == '\n') {
                ++line;
                last_break = i + 1;
            }
        }
        throw ConfigError({"line " + std::to_string(line) + ", column " +
                           std::to_string(stop - last_break + 1) + ": " + e.what()});
    }
    return parse_config_json(doc);
}

namespace {

json pieces_to_json(const PieceSet& s) {
    const int k = s.count();
    if (k > 0) {
        const int first = s.first();
        if (s == PieceSet::range(first, first + k)) {
            if (first == 0) return json(k);
            return json{{"from", first + 1}, {"to", first + k}};
        }
    }
    json arr = json::array();
    s.for_each([&](int i) { arr.push_back(i + 1); });
    return arr;
}

}  // namespace

json config_to_json(const ParsedConfig& parsed) {
    const RunConfig& run = parsed.run;
    json network{{"mu", run.params.mu},       {"mu_hat", run.params.mu_hat},
                 {"L", run.params.L},         {"U", run.params.U},
                 {"p", run.params.p},         {"y_opt", run.params.y_opt},
                 {"mode", to_string(run.params.mode)},
                 {"scalability_mode", run.params.scalability_mode}};
    if (!run.params.seed_split.empty()) {
        json split = json::object();
        for (std::size_t w = 0; w < run.params.seed_split.size(); ++w)
            split[run.swarms[w].id] = run.params.seed_split[w];
        network["seed_split"] = std::move(split);
    }

    json swarms = json::array();
    for (const auto& s : run.swarms) {
        json allies = json::array();
        for (int v : s.allies) allies.push_back(run.swarms[static_cast<std::size_t>(v)].id);
        swarms.push_back(json{{"id", s.id},
                              {"file", pieces_to_json(s.file)},
                              {"downloadable", pieces_to_json(s.downloadable)},
                              {"allies", std::move(allies)},
                              {"lambda", s.lambda},
                              {"alpha", s.alpha},
                              {"beta", s.beta}});
    }

    json policy{{"kind", to_string(run.policy.kind)},
                {"zeta_variant", to_string(run.policy.zeta_variant)}};
    if (run.policy.tms_threshold) policy["tms_threshold"] = *run.policy.tms_threshold;

    json initial;
    switch (run.initial.kind) {
        case InitialKind::empty:
            initial["kind"] = "empty";
            break;
        case InitialKind::one_club: {
            initial["kind"] = "one_club";
            json clubs = json::array();
            for (const auto& c : run.initial.clubs)
                clubs.push_back(json{{"swarm", run.swarms[static_cast<std::size_t>(c.swarm)].id},
                                     {"missing_piece", c.missing_piece + 1},
                                     {"size", c.size}});
            initial["clubs"] = std::move(clubs);
            break;
        }
        case InitialKind::flash_crowd: {
            initial["kind"] = "flash_crowd";
            json crowds = json::array();
            for (const auto& c : run.initial.crowds)
                crowds.push_back(json{{"swarm", run.swarms[static_cast<std::size_t>(c.swarm)].id},
                                      {"size", c.size}});
            initial["crowds"] = std::move(crowds);
            break;
        }
        case InitialKind::explicit_roster: {
            initial["kind"] = "explicit_roster";
            json peers = json::array();
            for (const auto& p : run.initial.peers)
                peers.push_back(json{{"swarm", run.swarms[static_cast<std::size_t>(p.swarm)].id},
                                     {"cache", pieces_to_json(p.cache)}});
            initial["peers"] = std::move(peers);
            break;
        }
    }

    json sim{{"t_end", run.t_end},
             {"sample_interval", run.sample_interval},
             {"rng_seed", run.rng_seed},
             {"replications", parsed.replications},
             {"initial", std::move(initial)}};
    if (parsed.warmup) sim["warmup"] = *parsed.warmup;
    if (run.record_chunk_vectors) sim["record_chunk_vectors"] = true;
    if (run.record_push_rates) sim["record_push_rates"] = true;

    return json{{"network", std::move(network)},
                {"swarms", std::move(swarms)},
                {"policy", std::move(policy)},
                {"sim", std::move(sim)}};
}

PresetOverrides overrides_from_json(const json& doc) {
    Collector errs;
    PresetOverrides ov;
    if (!doc.is_object()) {
        errs.add("/", "expected a JSON object of overrides");
        errs.raise_if_any();
    }
    check_keys(doc, "",
               {"k", "behavior", "policy", "zeta", "beta", "lambda_scale", "replications",
                "t_end"},
               errs);
    int k = 0;
    if (get_int(doc, "", "k", k, errs)) ov.k = k;
    std::string word;
    if (get_string(doc, "", "behavior", word, errs)) {
        auto b = behavior_from_string(word);
        if (b)
            ov.behavior = *b;
        else
            errs.add("/behavior",
                     "expected one of altruistic, opportunistic, selfish, autonomous");
    }
    if (get_string(doc, "", "policy", word, errs)) {
        auto p = policy_kind_from_string(word);
        if (p)
            ov.policy = *p;
        else
            errs.add("/policy", "expected one of rfwpms, rnwpms, ms, tms, rf, rn");
    }
    if (get_string(doc, "", "zeta", word, errs)) {
        auto z = zeta_variant_from_string(word);
        if (z)
            ov.zeta = *z;
        else
            errs.add("/zeta", "expected \"standard\" or \"flashcrowd\"");
    }
    double num = 0;
    if (get_number(doc, "", "beta", num, errs)) ov.beta = num;
    if (get_number(doc, "", "lambda_scale", num, errs)) ov.lambda_scale = num;
    int reps = 0;
    if (get_int(doc, "", "replications", reps, errs)) ov.replications = reps;
    if (get_number(doc, "", "t_end", num, errs)) ov.t_end = num;
    errs.raise_if_any();
    return ov;
}

json overrides_to_json(const PresetOverrides& ov) {
    json doc = json::object();
    if (ov.k) doc["k"] = *ov.k;
    if (ov.behavior) doc["behavior"] = to_string(*ov.behavior);
    if (ov.policy) doc["policy"] = to_string(*ov.policy);
    if (ov.zeta) doc["zeta"] = to_string(*ov.zeta);
    if (ov.beta) doc["beta"] = *ov.beta;
    if (ov.lambda_scale) doc["lambda_scale"] = *ov.lambda_scale;
    if (ov.replications) doc["replications"] = *ov.replications;
    if (ov.t_end) doc["t_end"] = *ov.t_end;
    return doc;
}

}  // namespace swarmlab
