#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "swarmlab/pieceset.hpp"

namespace swarmlab {

// Piece indices are 0-based internally; configs, CSV and JSON outputs use the
// 1-based ids of the modeled master-file [K]. Translation happens only at the
// I/O boundary (config.cpp / io.cpp).

enum class Mode { shared, autonomous };
enum class PolicyKind { RFwPMS, RNwPMS, MS, TMS, RF, RN };
enum class ZetaVariant { standard, flashcrowd };

const char* to_string(Mode m);
const char* to_string(PolicyKind k);
const char* to_string(ZetaVariant v);
std::optional<Mode> mode_from_string(const std::string& s);
std::optional<PolicyKind> policy_kind_from_string(const std::string& s);
std::optional<ZetaVariant> zeta_variant_from_string(const std::string& s);

struct SwarmSpec {
    std::string id;
    PieceSet file;          // W: pieces of primary interest
    PieceSet downloadable;  // F_W: W plus the extra pieces peers will cache
    std::vector<int> allies;  // swarm indices this swarm uploads to; contains self
    double lambda = 0.0;      // Poisson arrival rate
    double alpha = 1e-9;      // sharing-factor exponent on d_W^(i), in [0,1]
    double beta = 1.5;        // sharing-factor scale, >= 0 (0 = full suppression)

    int k() const { return file.count(); }
};

struct NetworkParams {
    double mu = 1.0;      // per tit-for-tat link tick rate
    double mu_hat = 0.0;  // peer optimistic-unchoke link tick rate
    int L = 1;            // links per peer
    double U = 1.0;       // seed per-link rate
    double p = 0.0;       // altruism probability in tit-for-tat contacts
    bool y_opt = false;   // when set, one link is an optimistic-unchoke link
    Mode mode = Mode::shared;
    std::vector<double> seed_split;  // autonomous only: U_W per swarm index
    bool scalability_mode = false;   // empty peers are always push-contacted

    // Per-peer aggregate push rate floor/ceiling driver:
    // delta(t) = 2(L - 1{y_opt}) mu t + 1{y_opt} mu_hat.
    double delta(double t) const {
        return 2.0 * (L - (y_opt ? 1 : 0)) * mu * t + (y_opt ? mu_hat : 0.0);
    }
    double delta_p() const { return delta(p); }
    double delta_1() const { return delta(1.0); }

    double tft_rate_per_peer() const { return (L - (y_opt ? 1 : 0)) * mu; }
    double unchoke_rate_per_peer() const { return y_opt ? mu_hat : 0.0; }
    double seed_rate_total() const;  // L*U shared; sum of L*U_W autonomous
};

struct PolicyConfig {
    PolicyKind kind = PolicyKind::RFwPMS;
    ZetaVariant zeta_variant = ZetaVariant::standard;
    std::optional<int> tms_threshold;  // default 2*K_W when unset

    int tms_threshold_for(int k_w) const {
        return tms_threshold ? *tms_threshold : 2 * k_w;
    }
};

enum class InitialKind { empty, one_club, flash_crowd, explicit_roster };

struct OneClubInit {
    int swarm = 0;
    int missing_piece = 0;  // 0-based, must lie in the swarm's file
    int size = 0;
};
struct FlashCrowdInit {
    int swarm = 0;
    int size = 0;
};
struct ExplicitPeerInit {
    int swarm = 0;
    PieceSet cache;
};

struct InitialState {
    InitialKind kind = InitialKind::empty;
    std::vector<OneClubInit> clubs;
    std::vector<FlashCrowdInit> crowds;
    std::vector<ExplicitPeerInit> peers;
};

struct RunConfig {
    NetworkParams params;
    std::vector<SwarmSpec> swarms;
    PolicyConfig policy;
    double t_end = 0.0;
    double sample_interval = 1.0;
    std::uint64_t rng_seed = 0;
    InitialState initial;
    // Diagnostics plumbing (off by default; they grow the record):
    bool record_chunk_vectors = false;  // full per-piece counts at each sample
    bool record_push_rates = false;     // per-(swarm,piece) commit counts + envelope exposure
};

// Master-file size implied by the configuration: the smallest [K] covering
// every downloadable set. The fixed seed holds exactly this set.
int master_file_size(const std::vector<SwarmSpec>& swarms);

// Semantic validation; returns one message per violation (empty = valid).
std::vector<std::string> validate(const RunConfig& config);

}  // namespace swarmlab
