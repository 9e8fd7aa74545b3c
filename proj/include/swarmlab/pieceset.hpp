#pragma once

#include <array>
#include <bit>
#include <cassert>
#include <cstdint>
#include <vector>

namespace swarmlab {

// Hard cap on the master-file size; caches, files and revealed profiles are
// all fixed-width bitmasks so policy evaluations stay pure word arithmetic.
inline constexpr int kMaxPieces = 640;

// Value-type set of piece indices in [0, kMaxPieces).
class PieceSet {
public:
    static constexpr int kWords = kMaxPieces / 64;

    PieceSet() = default;

    // Half-open index range [begin, end).
    static PieceSet range(int begin, int end) {
        assert(0 <= begin && begin <= end && end <= kMaxPieces);
        PieceSet s;
        for (int i = begin; i < end; ++i) s.set(i);
        return s;
    }
    static PieceSet full(int k) { return range(0, k); }
    static PieceSet single(int i) {
        PieceSet s;
        s.set(i);
        return s;
    }
    static PieceSet from_indices(const std::vector<int>& idx) {
        PieceSet s;
        for (int i : idx) s.set(i);
        return s;
    }

    void set(int i) {
        assert(0 <= i && i < kMaxPieces);
        w_[i >> 6] |= std::uint64_t{1} << (i & 63);
    }
    void reset(int i) {
        assert(0 <= i && i < kMaxPieces);
        w_[i >> 6] &= ~(std::uint64_t{1} << (i & 63));
    }
    bool test(int i) const {
        assert(0 <= i && i < kMaxPieces);
        return (w_[i >> 6] >> (i & 63)) & 1;
    }

    int count() const {
        int c = 0;
        for (auto w : w_) c += std::popcount(w);
        return c;
    }
    bool empty() const {
        for (auto w : w_)
            if (w) return false;
        return true;
    }
    bool any() const { return !empty(); }

    bool contains(const PieceSet& other) const {  // other ⊆ this
        for (int k = 0; k < kWords; ++k)
            if (other.w_[k] & ~w_[k]) return false;
        return true;
    }
    bool intersects(const PieceSet& other) const {
        for (int k = 0; k < kWords; ++k)
            if (w_[k] & other.w_[k]) return true;
        return false;
    }

    friend PieceSet operator&(PieceSet a, const PieceSet& b) {
        for (int k = 0; k < kWords; ++k) a.w_[k] &= b.w_[k];
        return a;
    }
    friend PieceSet operator|(PieceSet a, const PieceSet& b) {
        for (int k = 0; k < kWords; ++k) a.w_[k] |= b.w_[k];
        return a;
    }
    // Set difference a \ b.
    friend PieceSet operator-(PieceSet a, const PieceSet& b) {
        for (int k = 0; k < kWords; ++k) a.w_[k] &= ~b.w_[k];
        return a;
    }
    friend bool operator==(const PieceSet& a, const PieceSet& b) { return a.w_ == b.w_; }
    friend bool operator!=(const PieceSet& a, const PieceSet& b) { return !(a == b); }

    // Lowest set index, or -1 when empty.
    int first() const {
        for (int k = 0; k < kWords; ++k)
            if (w_[k]) return k * 64 + std::countr_zero(w_[k]);
        return -1;
    }

    // Index of the n-th set bit (n counted from 0); -1 when out of range.
    // Used for uniform draws: nth(rng.uniform_index(count())).
    int nth(int n) const {
        for (int k = 0; k < kWords; ++k) {
            int c = std::popcount(w_[k]);
            if (n < c) {
                std::uint64_t w = w_[k];
                while (n--) w &= w - 1;
                return k * 64 + std::countr_zero(w);
            }
            n -= c;
        }
        return -1;
    }

    template <class F>
    void for_each(F&& f) const {
        for (int k = 0; k < kWords; ++k) {
            std::uint64_t w = w_[k];
            while (w) {
                f(k * 64 + std::countr_zero(w));
                w &= w - 1;
            }
        }
    }

    std::vector<int> to_indices() const {
        std::vector<int> v;
        v.reserve(static_cast<std::size_t>(count()));
        for_each([&](int i) { v.push_back(i); });
        return v;
    }

private:
    std::array<std::uint64_t, kWords> w_{};
};

}  // namespace swarmlab
