#include "swarmlab/chunk_table.hpp"

#include <cassert>

namespace swarmlab {

ChunkTable::ChunkTable(const PieceSet& file, const PieceSet& downloadable)
    : file_(file), downloadable_(downloadable), k_(file.count()) {
    assert(downloadable_.contains(file_));
    nu_.assign(kMaxPieces, 0);
    hist_.assign(2, 0);
    hist_[0] = k_;  // every file piece starts at count 0
}

void ChunkTable::hist_increment(int old_count) {
    // A file piece moved from old_count to old_count + 1.
    if (old_count + 1 >= static_cast<int>(hist_.size())) hist_.resize(hist_.size() * 2, 0);
    --hist_[static_cast<std::size_t>(old_count)];
    ++hist_[static_cast<std::size_t>(old_count) + 1];
    if (old_count + 1 > cur_max_) cur_max_ = old_count + 1;
    if (old_count == cur_min_ && hist_[static_cast<std::size_t>(old_count)] == 0)
        while (hist_[static_cast<std::size_t>(cur_min_)] == 0) ++cur_min_;
}

void ChunkTable::hist_decrement(int old_count) {
    // A file piece moved from old_count to old_count - 1.
    assert(old_count >= 1);
    --hist_[static_cast<std::size_t>(old_count)];
    ++hist_[static_cast<std::size_t>(old_count) - 1];
    if (old_count - 1 < cur_min_) cur_min_ = old_count - 1;
    if (old_count == cur_max_ && hist_[static_cast<std::size_t>(old_count)] == 0)
        while (cur_max_ > 0 && hist_[static_cast<std::size_t>(cur_max_)] == 0) --cur_max_;
}

void ChunkTable::add_peer(const PieceSet& cache) {
    assert(downloadable_.contains(cache));
    ++population_;
    cache.for_each([&](int i) {
        int old = nu_[static_cast<std::size_t>(i)]++;
        if (file_.test(i)) {
            hist_increment(old);
            ++total_;
        }
    });
}

void ChunkTable::remove_peer(const PieceSet& cache) {
    assert(population_ > 0);
    --population_;
    cache.for_each([&](int i) {
        int old = nu_[static_cast<std::size_t>(i)]--;
        assert(old >= 1);
        if (file_.test(i)) {
            hist_decrement(old);
            --total_;
        }
    });
}

void ChunkTable::add_piece(int piece) {
    assert(downloadable_.test(piece));
    int old = nu_[static_cast<std::size_t>(piece)]++;
    if (file_.test(piece)) {
        hist_increment(old);
        ++total_;
    }
}

}  // namespace swarmlab
