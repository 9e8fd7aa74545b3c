#include "swarmlab/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "swarmlab/config.hpp"
#include "swarmlab/io.hpp"
#include "swarmlab/presets.hpp"
#include "swarmlab/rng.hpp"

namespace swarmlab {

namespace {

namespace fs = std::filesystem;

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kRuntime = 2;
constexpr int kToleranceFailure = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

int thread_cap() {
    const char* env = std::getenv("SWARMLAB_THREADS");
    if (!env) return 1;
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1)
        throw UsageError("SWARMLAB_THREADS must be a positive integer");
    // Replications run serially; the cap bounds the worker count from above.
    return 1;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return std::move(buf).str();
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    body(out);
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string numbered(const std::string& stem, int index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "_%03d", index);
    return stem + buf + ".csv";
}

const LyapunovConfig* try_constants(const RunConfig& cfg, std::optional<LyapunovConfig>& slot) {
    try {
        slot = derive_constants(cfg.params, cfg.swarms, 0.5, 0.05);
        return &*slot;
    } catch (const std::exception&) {
        return nullptr;
    }
}

int levenshtein(const std::string& a, const std::string& b) {
    std::vector<int> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) row[j] = static_cast<int>(j);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        int diag = row[0];
        row[0] = static_cast<int>(i);
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const int up = row[j];
            row[j] = std::min({row[j] + 1, row[j - 1] + 1,
                               diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
            diag = up;
        }
    }
    return row[b.size()];
}

void print_unknown_preset(const std::string& name) {
    std::cerr << "unknown preset \"" << name << "\"\n";
    std::vector<std::string> close;
    for (const auto& p : all_presets())
        if (p.name.find(name) != std::string::npos || levenshtein(name, p.name) <= 3)
            close.push_back(p.name);
    if (!close.empty()) {
        std::cerr << "did you mean:\n";
        for (const auto& n : close) std::cerr << "  " << n << "\n";
    }
    std::cerr << "available presets:\n";
    for (const auto& p : all_presets()) std::cerr << "  " << p.name << "\n";
}

struct SimulateArgs {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<int> replications;
    bool quiet = false;
};

int cmd_simulate(const SimulateArgs& args) {
    const int threads = thread_cap();
    ParsedConfig parsed = parse_config_text(read_file(args.config_path));
    if (args.seed) parsed.run.rng_seed = *args.seed;
    if (args.replications) {
        if (*args.replications < 1) throw UsageError("--replications must be >= 1");
        parsed.replications = *args.replications;
    }
    const double warmup = parsed.warmup.value_or(0.2 * parsed.run.t_end);
    const std::uint64_t root_seed = parsed.run.rng_seed;

    fs::create_directories(args.out_dir);
    std::optional<LyapunovConfig> lyapunov_slot;
    const LyapunovConfig* lyapunov = try_constants(parsed.run, lyapunov_slot);

    std::vector<TrajectoryRecord> records;
    records.reserve(static_cast<std::size_t>(parsed.replications));
    for (int r = 0; r < parsed.replications; ++r) {
        RunConfig cfg = parsed.run;
        // A single run uses the configured seed itself; replication streams
        // derive from it.
        if (parsed.replications > 1)
            cfg.rng_seed = derive_seed(root_seed, static_cast<std::uint64_t>(r));
        records.push_back(run(cfg));

        const fs::path traj = fs::path(args.out_dir) /
                              (parsed.replications == 1 ? "trajectory.csv"
                                                        : numbered("trajectory", r));
        const fs::path soj = fs::path(args.out_dir) /
                             (parsed.replications == 1 ? "sojourns.csv"
                                                       : numbered("sojourns", r));
        write_file(traj,
                   [&](std::ostream& o) { write_trajectory_csv(o, records.back(), lyapunov); });
        write_file(soj, [&](std::ostream& o) { write_sojourns_csv(o, records.back()); });
        if (!args.quiet) std::cout << "wrote " << traj.string() << ", " << soj.string() << "\n";
    }

    const auto summary = simulate_summary(parsed, records, root_seed, warmup, threads);
    const fs::path summary_path = fs::path(args.out_dir) / "summary.json";
    write_file(summary_path, [&](std::ostream& o) { o << summary.dump(2) << "\n"; });
    if (!args.quiet) std::cout << "wrote " << summary_path.string() << "\n";
    return kOk;
}

struct PresetArgs {
    std::string name;
    std::string out_dir = ".";
    std::string config_path;
    std::uint64_t seed = 0;
    std::optional<int> replications;
    std::optional<int> k;
    std::string behavior, policy, zeta;
    std::optional<double> beta, lambda_scale, t_end;
    bool check = false;
    bool quiet = false;
};

PresetOverrides resolve_overrides(const PresetArgs& args) {
    PresetOverrides ov;
    if (!args.config_path.empty()) {
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(read_file(args.config_path));
        } catch (const nlohmann::json::parse_error& e) {
            throw ConfigError({e.what()});
        }
        ov = overrides_from_json(doc);
    }
    if (args.k) ov.k = *args.k;
    if (!args.behavior.empty()) {
        auto b = behavior_from_string(args.behavior);
        if (!b)
            throw UsageError(
                "--behavior expects one of altruistic, opportunistic, selfish, autonomous");
        ov.behavior = *b;
    }
    if (!args.policy.empty()) {
        auto p = policy_kind_from_string(args.policy);
        if (!p) throw UsageError("--policy expects one of rfwpms, rnwpms, ms, tms, rf, rn");
        ov.policy = *p;
    }
    if (!args.zeta.empty()) {
        auto z = zeta_variant_from_string(args.zeta);
        if (!z) throw UsageError("--zeta expects standard or flashcrowd");
        ov.zeta = *z;
    }
    if (args.beta) ov.beta = *args.beta;
    if (args.lambda_scale) ov.lambda_scale = *args.lambda_scale;
    if (args.t_end) ov.t_end = *args.t_end;
    if (args.replications) ov.replications = *args.replications;
    return ov;
}

int cmd_preset(const PresetArgs& args) {
    const int threads = thread_cap();
    if (!find_preset(args.name)) {
        print_unknown_preset(args.name);
        return kInvalid;
    }
    const PresetOverrides overrides = resolve_overrides(args);
    const PresetRun result = run_preset(args.name, overrides, args.seed);

    fs::create_directories(args.out_dir);
    std::optional<LyapunovConfig> lyapunov_slot;
    const LyapunovConfig* lyapunov = try_constants(result.config, lyapunov_slot);
    for (std::size_t r = 0; r < result.records.size(); ++r) {
        const fs::path traj = fs::path(args.out_dir) / numbered("trajectory", static_cast<int>(r));
        const fs::path soj = fs::path(args.out_dir) / numbered("sojourns", static_cast<int>(r));
        write_file(traj, [&](std::ostream& o) {
            write_trajectory_csv(o, result.records[r], lyapunov);
        });
        write_file(soj, [&](std::ostream& o) { write_sojourns_csv(o, result.records[r]); });
    }

    const auto summary = preset_summary(result, args.seed, threads);
    const fs::path summary_path = fs::path(args.out_dir) / "summary.json";
    write_file(summary_path, [&](std::ostream& o) { o << summary.dump(2) << "\n"; });

    const auto checks = reference_checks(result);
    if (!args.quiet) {
        std::cout << "wrote " << result.records.size() << " replication record(s) and "
                  << summary_path.string() << "\n";
        for (const auto& c : checks) {
            std::cout << (c.pass ? "PASS  " : "FAIL  ") << c.metric << ": measured "
                      << format_double(c.measured);
            if (c.kind == CheckKind::within)
                std::cout << " vs " << format_double(c.reference) << " (tolerance "
                          << format_double(c.rel_tol * 100) << "%)";
            else if (c.kind == CheckKind::at_least)
                std::cout << " >= " << format_double(c.reference);
            else
                std::cout << " <= " << format_double(c.reference);
            std::cout << "\n";
        }
        if (checks.empty()) std::cout << "no pinned reference values for this configuration\n";
    }
    if (args.check) {
        for (const auto& c : checks)
            if (!c.pass) return kToleranceFailure;
    }
    return kOk;
}

int cmd_list_presets() {
    std::size_t width = 0;
    for (const auto& p : all_presets()) width = std::max(width, p.name.size());
    for (const auto& p : all_presets())
        std::cout << p.name << std::string(width - p.name.size() + 2, ' ') << p.summary << "\n";
    return kOk;
}

int cmd_validate(const std::string& path) {
    const ParsedConfig parsed = parse_config_text(read_file(path));
    std::cout << "ok: " << parsed.run.swarms.size() << " swarm(s), master file "
              << master_file_size(parsed.run.swarms) << " piece(s), t_end "
              << format_double(parsed.run.t_end) << ", " << parsed.replications
              << " replication(s)\n";
    return kOk;
}

}  // namespace

int run_cli(std::vector<std::string> args) {
    CLI::App app{"event-driven simulator for multi-swarm piece-exchange networks"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "run a configured simulation");
    simulate->add_option("--config", sim.config_path, "JSON configuration file")
        ->required();
    simulate->add_option("--seed", sim.seed, "override the configured rng seed");
    simulate->add_option("--out", sim.out_dir, "output directory (default .)");
    auto* sim_reps = simulate->add_option("--replications", sim.replications,
                                          "override the configured replication count");
    simulate->add_flag("--quiet", sim.quiet, "suppress informational output");

    PresetArgs pre;
    auto* preset = app.add_subcommand("preset", "run a named experiment preset");
    preset->add_option("name", pre.name, "preset name (see list-presets)")->required();
    preset->add_option("--config", pre.config_path, "JSON file with preset overrides");
    preset->add_option("--seed", pre.seed, "root seed for the replication streams");
    preset->add_option("--out", pre.out_dir, "output directory (default .)");
    auto* pre_reps =
        preset->add_option("--replications", pre.replications, "replication count");
    preset->add_option("--k", pre.k, "file-size override");
    preset->add_option("--behavior", pre.behavior, "inter-swarm behavior override");
    preset->add_option("--policy", pre.policy, "piece-selection policy override");
    preset->add_option("--zeta", pre.zeta, "sharing-factor variant override");
    preset->add_option("--beta", pre.beta, "sharing-factor scale override");
    preset->add_option("--lambda-scale", pre.lambda_scale, "arrival-rate multiplier");
    preset->add_option("--t-end", pre.t_end, "simulation horizon override");
    preset->add_flag("--check", pre.check, "exit 3 when a reference check fails");
    preset->add_flag("--quiet", pre.quiet, "suppress informational output");

    auto* list = app.add_subcommand("list-presets", "list preset names and summaries");

    std::string validate_path;
    auto* validate_cmd = app.add_subcommand("validate-config", "parse and validate a config");
    validate_cmd->add_option("path", validate_path, "JSON configuration file")->required();

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("swarmlab");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInvalid;
    }

    (void)sim_reps;
    (void)pre_reps;
    try {
        if (simulate->parsed()) return cmd_simulate(sim);
        if (preset->parsed()) return cmd_preset(pre);
        if (list->parsed()) return cmd_list_presets();
        if (validate_cmd->parsed()) return cmd_validate(validate_path);
    } catch (const ConfigError& e) {
        for (const auto& m : e.messages()) std::cerr << m << "\n";
        return kInvalid;
    } catch (const UsageError& e) {
        std::cerr << e.what() << "\n";
        return kInvalid;
    } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << "\n";
        return kInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntime;
    }
    return kInvalid;
}

}  // namespace swarmlab
