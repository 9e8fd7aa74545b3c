#include "swarmlab/types.hpp"

#include <cmath>

namespace swarmlab {

const char* to_string(Mode m) {
    return m == Mode::shared ? "shared" : "autonomous";
}

const char* to_string(PolicyKind k) {
    switch (k) {
        case PolicyKind::RFwPMS: return "rfwpms";
        case PolicyKind::RNwPMS: return "rnwpms";
        case PolicyKind::MS: return "ms";
        case PolicyKind::TMS: return "tms";
        case PolicyKind::RF: return "rf";
        case PolicyKind::RN: return "rn";
    }
    return "?";
}

const char* to_string(ZetaVariant v) {
    return v == ZetaVariant::standard ? "standard" : "flashcrowd";
}

std::optional<Mode> mode_from_string(const std::string& s) {
    if (s == "shared") return Mode::shared;
    if (s == "autonomous") return Mode::autonomous;
    return std::nullopt;
}

std::optional<PolicyKind> policy_kind_from_string(const std::string& s) {
    if (s == "rfwpms") return PolicyKind::RFwPMS;
    if (s == "rnwpms") return PolicyKind::RNwPMS;
    if (s == "ms") return PolicyKind::MS;
    if (s == "tms") return PolicyKind::TMS;
    if (s == "rf") return PolicyKind::RF;
    if (s == "rn") return PolicyKind::RN;
    return std::nullopt;
}

std::optional<ZetaVariant> zeta_variant_from_string(const std::string& s) {
    if (s == "standard") return ZetaVariant::standard;
    if (s == "flashcrowd") return ZetaVariant::flashcrowd;
    return std::nullopt;
}

double NetworkParams::seed_rate_total() const {
    if (mode == Mode::shared) return static_cast<double>(L) * U;
    double total = 0.0;
    for (double u : seed_split) total += static_cast<double>(L) * u;
    return total;
}

int master_file_size(const std::vector<SwarmSpec>& swarms) {
    int size = 0;
    for (const auto& s : swarms)
        s.downloadable.for_each([&](int i) {
            if (i + 1 > size) size = i + 1;
        });
    return size;
}

namespace {

std::string swarm_tag(const SwarmSpec& s, std::size_t index) {
    if (!s.id.empty()) return "swarm \"" + s.id + "\"";
    return "swarm #" + std::to_string(index);
}

}  // namespace

std::vector<std::string> validate(const RunConfig& config) {
    std::vector<std::string> errors;
    auto err = [&](std::string msg) { errors.push_back(std::move(msg)); };

    const auto& swarms = config.swarms;
    const auto& np = config.params;
    const int n = static_cast<int>(swarms.size());

    if (swarms.empty()) err("at least one swarm is required");

    for (std::size_t w = 0; w < swarms.size(); ++w) {
        const auto& s = swarms[w];
        const std::string tag = swarm_tag(s, w);
        if (s.id.empty()) err(tag + ": id must be non-empty");
        for (std::size_t v = 0; v < w; ++v)
            if (!s.id.empty() && swarms[v].id == s.id)
                err(tag + ": duplicate swarm id");
        if (s.file.empty()) err(tag + ": file must contain at least one piece");
        if (!s.downloadable.contains(s.file))
            err(tag + ": downloadable set must contain every file piece");
        bool self_found = false;
        for (int a : s.allies) {
            if (a < 0 || a >= n) {
                err(tag + ": ally index " + std::to_string(a) + " out of range");
                continue;
            }
            if (a == static_cast<int>(w)) self_found = true;
        }
        if (!self_found) err(tag + ": allies must include the swarm itself");
        if (!(s.lambda >= 0.0)) err(tag + ": lambda must be >= 0");
        if (!(s.alpha >= 0.0 && s.alpha <= 1.0)) err(tag + ": alpha must lie in [0,1]");
        if (!(s.beta >= 0.0)) err(tag + ": beta must be >= 0");
        if (!std::isfinite(s.lambda) || !std::isfinite(s.alpha) || !std::isfinite(s.beta))
            err(tag + ": rates and sharing-factor parameters must be finite");
    }

    if (!(np.mu > 0.0)) err("mu must be > 0");
    if (!(np.mu_hat >= 0.0)) err("mu_hat must be >= 0");
    if (np.y_opt && !(np.mu_hat > 0.0)) err("mu_hat must be > 0 when y_opt is set");
    if (np.L < 1) err("L must be >= 1");
    if (!(np.U > 0.0)) err("U must be > 0");
    if (!(np.p >= 0.0 && np.p <= 1.0)) err("p must lie in [0,1]");
    if (np.mode == Mode::shared) {
        if (!np.seed_split.empty()) err("seed_split is only meaningful in autonomous mode");
    } else {
        if (np.seed_split.size() != swarms.size()) {
            err("autonomous mode needs one seed_split entry per swarm");
        } else {
            double sum = 0.0;
            for (std::size_t w = 0; w < np.seed_split.size(); ++w) {
                if (!(np.seed_split[w] > 0.0))
                    err(swarm_tag(swarms[w], w) + ": seed_split entry must be > 0");
                sum += np.seed_split[w];
            }
            if (sum > np.U * (1.0 + 1e-12))
                err("seed_split entries must sum to at most U");
        }
    }

    if (!(config.t_end >= 0.0)) err("t_end must be >= 0");
    if (!(config.sample_interval > 0.0)) err("sample_interval must be > 0");
    if (config.policy.tms_threshold && *config.policy.tms_threshold < 0)
        err("tms_threshold must be >= 0");

    const auto& init = config.initial;
    auto want_only = [&](bool clubs_ok, bool crowds_ok, bool peers_ok, const char* kind) {
        if (!clubs_ok && !init.clubs.empty())
            err(std::string("initial state of kind ") + kind + " cannot list one-clubs");
        if (!crowds_ok && !init.crowds.empty())
            err(std::string("initial state of kind ") + kind + " cannot list flash crowds");
        if (!peers_ok && !init.peers.empty())
            err(std::string("initial state of kind ") + kind + " cannot list explicit peers");
    };
    switch (init.kind) {
        case InitialKind::empty:
            want_only(false, false, false, "empty");
            break;
        case InitialKind::one_club:
            want_only(true, false, false, "one_club");
            if (init.clubs.empty()) err("initial state of kind one_club needs at least one club");
            break;
        case InitialKind::flash_crowd:
            want_only(false, true, false, "flash_crowd");
            if (init.crowds.empty())
                err("initial state of kind flash_crowd needs at least one crowd");
            break;
        case InitialKind::explicit_roster:
            want_only(false, false, true, "explicit_roster");
            if (init.peers.empty())
                err("initial state of kind explicit_roster needs at least one peer");
            break;
    }
    for (const auto& club : init.clubs) {
        if (club.swarm < 0 || club.swarm >= n) {
            err("one_club swarm index " + std::to_string(club.swarm) + " out of range");
            continue;
        }
        const auto& s = swarms[static_cast<std::size_t>(club.swarm)];
        if (!s.file.test(club.missing_piece))
            err(swarm_tag(s, static_cast<std::size_t>(club.swarm)) +
                ": one_club missing piece must lie in the swarm's file");
        if (club.size < 0) err("one_club size must be >= 0");
    }
    for (const auto& crowd : init.crowds) {
        if (crowd.swarm < 0 || crowd.swarm >= n)
            err("flash_crowd swarm index " + std::to_string(crowd.swarm) + " out of range");
        if (crowd.size < 0) err("flash_crowd size must be >= 0");
    }
    for (const auto& peer : init.peers) {
        if (peer.swarm < 0 || peer.swarm >= n) {
            err("explicit peer swarm index " + std::to_string(peer.swarm) + " out of range");
            continue;
        }
        const auto& s = swarms[static_cast<std::size_t>(peer.swarm)];
        if (!s.downloadable.contains(peer.cache))
            err(swarm_tag(s, static_cast<std::size_t>(peer.swarm)) +
                ": explicit peer cache must lie inside the downloadable set");
        if ((s.file - peer.cache).empty())
            err(swarm_tag(s, static_cast<std::size_t>(peer.swarm)) +
                ": explicit peer already holds the whole file");
    }

    return errors;
}

}  // namespace swarmlab
