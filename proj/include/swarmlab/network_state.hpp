#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "swarmlab/chunk_table.hpp"
#include "swarmlab/types.hpp"

namespace swarmlab {

struct Peer {
    std::uint64_t id = 0;
    int swarm = 0;
    PieceSet cache;
    double arrival_time = 0.0;
    int pos_in_swarm = 0;  // back-pointer into the swarm's member list
};

struct MismatchSummary {
    int population = 0;
    int nu_min = 0;
    int nu_max = 0;
    long long total = 0;           // sum of chunk counts over the file
    int mbar = 0;                  // largest mismatch nu_max - nu_min
    long long total_mismatch = 0;  // K * nu_max - total
};

// Mutable population snapshot: dense roster with swap-erase removal, per-swarm
// member lists, and incrementally maintained per-swarm chunk tables.
class NetworkState {
public:
    explicit NetworkState(const RunConfig& config);

    int size() const { return static_cast<int>(roster_.size()); }
    const Peer& peer(int i) const { return roster_[static_cast<std::size_t>(i)]; }
    int n_swarms() const { return static_cast<int>(specs_.size()); }
    const SwarmSpec& swarm_spec(int w) const { return specs_[static_cast<std::size_t>(w)]; }
    const ChunkTable& table(int w) const { return tables_[static_cast<std::size_t>(w)]; }
    const std::vector<int>& members(int w) const { return members_[static_cast<std::size_t>(w)]; }
    const std::vector<int>& uploaders(int w) const {
        return uploaders_[static_cast<std::size_t>(w)];
    }
    // Whether peers of swarm v reveal their cache to (and so upload to) peers
    // of swarm w.
    bool uploads_to(int v, int w) const {
        return ally_[static_cast<std::size_t>(v)][static_cast<std::size_t>(w)] != 0;
    }

    int add_peer(int swarm, const PieceSet& cache, double arrival_time);
    void remove_peer(int index);
    void give_piece(int index, int piece);
    bool complete(int index) const {
        const Peer& p = roster_[static_cast<std::size_t>(index)];
        return (specs_[static_cast<std::size_t>(p.swarm)].file - p.cache).empty();
    }

    // Copies of `piece` cached by peers of the other swarms that upload to w
    // (excess-cache copies included).
    long long complementary_count(int w, int piece) const;

    std::uint64_t peers_created() const { return next_id_; }

    // Recompute every derived structure from the roster and diff it against
    // the incremental state; one message per inconsistency found.
    std::vector<std::string> audit() const;

    ChunkTable& table_mut(int w) { return tables_[static_cast<std::size_t>(w)]; }  // test hook

private:
    std::vector<SwarmSpec> specs_;
    std::vector<ChunkTable> tables_;
    std::vector<std::vector<int>> members_;    // roster indices, per swarm
    std::vector<std::vector<int>> uploaders_;  // uploaders_[w]: v != w with w allied
    std::vector<std::vector<char>> ally_;      // ally_[v][w]: v uploads to w
    std::vector<Peer> roster_;
    std::uint64_t next_id_ = 0;
};

// Chunk count of `piece` within swarm w; throws std::out_of_range for an
// unknown swarm or a piece outside the swarm's downloadable set.
int chunk_count(const NetworkState& state, int w, int piece);

MismatchSummary mismatch_summary(const NetworkState& state, int w);

// Pieces of the file strictly below the max chunk count; the whole file when
// the chunk profile is uniform.
PieceSet rare_set(const ChunkTable& table);

}  // namespace swarmlab
