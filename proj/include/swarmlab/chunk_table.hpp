#pragma once

#include <cstdint>
#include <vector>

#include "swarmlab/pieceset.hpp"

namespace swarmlab {

// Per-swarm chunk accounting: nu[i] counts the swarm's peers holding piece i
// (maintained for every i in the downloadable set F_W). The max/min chunk
// counts over the file W are maintained through a count-of-counts histogram,
// so every single-piece update is O(1) amortized.
class ChunkTable {
public:
    ChunkTable() = default;
    ChunkTable(const PieceSet& file, const PieceSet& downloadable);

    void add_peer(const PieceSet& cache);
    void remove_peer(const PieceSet& cache);
    void add_piece(int piece);  // one new copy of `piece` inside this swarm

    int count(int piece) const { return nu_[static_cast<std::size_t>(piece)]; }
    int population() const { return population_; }
    int k() const { return k_; }
    const PieceSet& file() const { return file_; }
    const PieceSet& downloadable() const { return downloadable_; }

    // All of the following are over i in W only.
    int nu_max() const { return cur_max_; }
    int nu_min() const { return cur_min_; }
    long long total() const { return total_; }            // P_W
    int mbar() const { return cur_max_ - cur_min_; }       // largest mismatch
    long long total_mismatch() const {                     // M_W
        return static_cast<long long>(k_) * cur_max_ - total_;
    }

private:
    void hist_increment(int old_count);
    void hist_decrement(int old_count);

    PieceSet file_;
    PieceSet downloadable_;
    int k_ = 0;
    int population_ = 0;
    long long total_ = 0;
    std::vector<std::int32_t> nu_;    // indexed by piece id
    std::vector<std::int32_t> hist_;  // hist_[c] = #pieces of W with count c
    int cur_max_ = 0;
    int cur_min_ = 0;
};

}  // namespace swarmlab
