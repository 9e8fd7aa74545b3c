#include "swarmlab/network_state.hpp"

#include <cassert>
#include <stdexcept>

namespace swarmlab {

NetworkState::NetworkState(const RunConfig& config) : specs_(config.swarms) {
    const std::size_t n = specs_.size();
    tables_.reserve(n);
    members_.resize(n);
    uploaders_.resize(n);
    ally_.assign(n, std::vector<char>(n, 0));
    for (const auto& s : specs_) tables_.emplace_back(s.file, s.downloadable);
    for (std::size_t v = 0; v < n; ++v)
        for (int w : specs_[v].allies) ally_[v][static_cast<std::size_t>(w)] = 1;
    for (std::size_t w = 0; w < n; ++w)
        for (std::size_t v = 0; v < n; ++v)
            if (v != w && ally_[v][w]) uploaders_[w].push_back(static_cast<int>(v));

    const auto& init = config.initial;
    for (const auto& club : init.clubs) {
        const PieceSet cache =
            specs_[static_cast<std::size_t>(club.swarm)].file - PieceSet::single(club.missing_piece);
        for (int i = 0; i < club.size; ++i) add_peer(club.swarm, cache, 0.0);
    }
    for (const auto& crowd : init.crowds)
        for (int i = 0; i < crowd.size; ++i) add_peer(crowd.swarm, PieceSet{}, 0.0);
    for (const auto& peer : init.peers) add_peer(peer.swarm, peer.cache, 0.0);
}

int NetworkState::add_peer(int swarm, const PieceSet& cache, double arrival_time) {
    const int index = size();
    auto& mem = members_[static_cast<std::size_t>(swarm)];
    Peer p;
    p.id = next_id_++;
    p.swarm = swarm;
    p.cache = cache;
    p.arrival_time = arrival_time;
    p.pos_in_swarm = static_cast<int>(mem.size());
    mem.push_back(index);
    roster_.push_back(p);
    tables_[static_cast<std::size_t>(swarm)].add_peer(cache);
    return index;
}

void NetworkState::remove_peer(int index) {
    Peer& p = roster_[static_cast<std::size_t>(index)];
    tables_[static_cast<std::size_t>(p.swarm)].remove_peer(p.cache);

    auto& mem = members_[static_cast<std::size_t>(p.swarm)];
    const int moved_member = mem.back();
    mem[static_cast<std::size_t>(p.pos_in_swarm)] = moved_member;
    roster_[static_cast<std::size_t>(moved_member)].pos_in_swarm = p.pos_in_swarm;
    mem.pop_back();

    const int back = size() - 1;
    if (index != back) {
        roster_[static_cast<std::size_t>(index)] = roster_[static_cast<std::size_t>(back)];
        const Peer& moved = roster_[static_cast<std::size_t>(index)];
        members_[static_cast<std::size_t>(moved.swarm)][static_cast<std::size_t>(moved.pos_in_swarm)] =
            index;
    }
    roster_.pop_back();
}

void NetworkState::give_piece(int index, int piece) {
    Peer& p = roster_[static_cast<std::size_t>(index)];
    assert(!p.cache.test(piece));
    p.cache.set(piece);
    tables_[static_cast<std::size_t>(p.swarm)].add_piece(piece);
}

long long NetworkState::complementary_count(int w, int piece) const {
    long long d = 0;
    for (int v : uploaders_[static_cast<std::size_t>(w)])
        d += tables_[static_cast<std::size_t>(v)].count(piece);
    return d;
}

std::vector<std::string> NetworkState::audit() const {
    std::vector<std::string> problems;
    auto bad = [&](std::string msg) { problems.push_back(std::move(msg)); };
    const std::size_t n = specs_.size();

    std::vector<ChunkTable> fresh;
    fresh.reserve(n);
    for (const auto& s : specs_) fresh.emplace_back(s.file, s.downloadable);
    std::vector<int> seen(roster_.size(), 0);

    for (std::size_t w = 0; w < n; ++w) {
        for (std::size_t pos = 0; pos < members_[w].size(); ++pos) {
            const int idx = members_[w][pos];
            if (idx < 0 || idx >= size()) {
                bad("member list of swarm " + std::to_string(w) + " holds stale index");
                continue;
            }
            ++seen[static_cast<std::size_t>(idx)];
            const Peer& p = roster_[static_cast<std::size_t>(idx)];
            if (p.swarm != static_cast<int>(w))
                bad("peer " + std::to_string(p.id) + " filed under the wrong swarm");
            if (p.pos_in_swarm != static_cast<int>(pos))
                bad("peer " + std::to_string(p.id) + " back-pointer mismatch");
        }
    }
    for (std::size_t i = 0; i < roster_.size(); ++i)
        if (seen[i] != 1)
            bad("roster index " + std::to_string(i) + " appears " + std::to_string(seen[i]) +
                " times in member lists");

    for (const Peer& p : roster_) {
        const auto& s = specs_[static_cast<std::size_t>(p.swarm)];
        if (!s.downloadable.contains(p.cache))
            bad("peer " + std::to_string(p.id) + " caches pieces outside its downloadable set");
        if ((s.file - p.cache).empty())
            bad("peer " + std::to_string(p.id) + " holds the whole file but is still present");
        fresh[static_cast<std::size_t>(p.swarm)].add_peer(p.cache & s.downloadable);
    }

    for (std::size_t w = 0; w < n; ++w) {
        const ChunkTable& have = tables_[w];
        const ChunkTable& want = fresh[w];
        if (have.population() != want.population())
            bad("swarm " + std::to_string(w) + " population drifted");
        bool counts_ok = true;
        specs_[w].downloadable.for_each([&](int i) {
            if (have.count(i) != want.count(i)) counts_ok = false;
        });
        if (!counts_ok) bad("swarm " + std::to_string(w) + " chunk counts drifted");
        if (have.total() != want.total()) bad("swarm " + std::to_string(w) + " total drifted");
        if (have.nu_min() != want.nu_min() || have.nu_max() != want.nu_max())
            bad("swarm " + std::to_string(w) + " min/max chunk counts drifted");
    }
    return problems;
}

int chunk_count(const NetworkState& state, int w, int piece) {
    if (w < 0 || w >= state.n_swarms()) throw std::out_of_range("unknown swarm index");
    if (piece < 0 || piece >= kMaxPieces || !state.swarm_spec(w).downloadable.test(piece))
        throw std::out_of_range("piece outside the swarm's downloadable set");
    return state.table(w).count(piece);
}

MismatchSummary mismatch_summary(const NetworkState& state, int w) {
    if (w < 0 || w >= state.n_swarms()) throw std::out_of_range("unknown swarm index");
    const ChunkTable& t = state.table(w);
    MismatchSummary m;
    m.population = t.population();
    m.nu_min = t.nu_min();
    m.nu_max = t.nu_max();
    m.total = t.total();
    m.mbar = t.mbar();
    m.total_mismatch = t.total_mismatch();
    return m;
}

PieceSet rare_set(const ChunkTable& table) {
    if (table.mbar() == 0) return table.file();
    const int top = table.nu_max();
    PieceSet rare;
    table.file().for_each([&](int i) {
        if (table.count(i) < top) rare.set(i);
    });
    return rare;
}

}  // namespace swarmlab
