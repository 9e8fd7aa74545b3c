#include "swarmlab/engine.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace swarmlab {

namespace {

RunConfig validated(RunConfig config) {
    auto errors = validate(config);
    if (!errors.empty()) {
        std::string msg = "invalid run configuration:";
        for (const auto& e : errors) msg += "\n  - " + e;
        throw std::invalid_argument(msg);
    }
    return config;
}

}  // namespace

Engine::Engine(const RunConfig& config)
    : config_(validated(config)), state_(config_), rng_(config_.rng_seed) {
    const int n = state_.n_swarms();
    for (const auto& s : config_.swarms) lambda_total_ += s.lambda;
    master_k_ = master_file_size(config_.swarms);
    master_file_ = PieceSet::full(master_k_);

    introduced_.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < state_.size(); ++i) {
        const Peer& p = state_.peer(i);
        introduced_[static_cast<std::size_t>(p.swarm)] =
            introduced_[static_cast<std::size_t>(p.swarm)] | p.cache;
    }
    all_pieces_time_.assign(static_cast<std::size_t>(n), -1.0);
    for (int w = 0; w < n; ++w)
        if ((config_.swarms[static_cast<std::size_t>(w)].file - introduced_[static_cast<std::size_t>(w)])
                .empty())
            all_pieces_time_[static_cast<std::size_t>(w)] = 0.0;
    if (state_.size() == 0) {
        flushed_ = true;
        flush_time_ = 0.0;
    }
    if (config_.record_push_rates) {
        push_rates_.emplace();
        push_rates_->cells.resize(static_cast<std::size_t>(n));
        for (int w = 0; w < n; ++w)
            push_rates_->cells[static_cast<std::size_t>(w)].resize(
                static_cast<std::size_t>(config_.swarms[static_cast<std::size_t>(w)].k()));
    }
}

double Engine::total_rate() const {
    const auto& np = config_.params;
    return lambda_total_ + np.seed_rate_total() +
           state_.size() * (np.tft_rate_per_peer() + np.unchoke_rate_per_peer());
}

EventCategory Engine::step() {
    const double rate = total_rate();
    const double t_next = clock_ + rng_.exponential(rate);
    emit_samples_until(t_next);
    advance_clock_to(t_next);
    return dispatch(rate);
}

void Engine::advance_clock_to(double t) {
    pop_integral_ += (t - clock_) * static_cast<double>(state_.size());
    clock_ = t;
}

EventCategory Engine::dispatch(double rate) {
    const auto& np = config_.params;
    const int n = state_.n_swarms();
    const int x = state_.size();

    // Category walk: one uniform draw over the stacked clock widths, in the
    // order arrivals (by swarm), seed clock(s), tit-for-tat block, unchoke
    // block. Rounding spill lands on the last positive block.
    const double tft_block = x * np.tft_rate_per_peer();
    const double unchoke_block = x * np.unchoke_rate_per_peer();
    double u = rng_.uniform01() * rate;

    for (int w = 0; w < n; ++w) {
        const double width = config_.swarms[static_cast<std::size_t>(w)].lambda;
        if (u < width) {
            resolve_arrival(w);
            return EventCategory::arrival;
        }
        u -= width;
    }

    auto seed_target_shared = [&]() -> int {
        if (x == 0) return -1;
        return static_cast<int>(rng_.uniform_index(static_cast<std::size_t>(x)));
    };
    auto seed_target_in = [&](int w) -> int {
        const auto& mem = state_.members(w);
        if (mem.empty()) return -1;
        return mem[rng_.uniform_index(mem.size())];
    };

    const bool last_is_unchoke = unchoke_block > 0;
    const bool last_is_tft = !last_is_unchoke && tft_block > 0;

    if (np.mode == Mode::shared) {
        const double width = np.L * np.U;
        if (u < width || (!last_is_unchoke && !last_is_tft)) {
            const int target = seed_target_shared();
            if (target < 0) {
                ++counters_.seed_ticks;
                ++counters_.noop_ticks;
            } else {
                resolve_seed_tick(target);
            }
            return EventCategory::seed_tick;
        }
        u -= width;
    } else {
        for (int w = 0; w < n; ++w) {
            const double width = np.L * np.seed_split[static_cast<std::size_t>(w)];
            const bool last_block = !last_is_unchoke && !last_is_tft && w == n - 1;
            if (u < width || last_block) {
                const int target = seed_target_in(w);
                if (target < 0) {
                    ++counters_.seed_ticks;
                    ++counters_.noop_ticks;
                } else {
                    resolve_seed_tick(target);
                }
                return EventCategory::seed_tick;
            }
            u -= width;
        }
    }

    if (tft_block > 0 && (u < tft_block || !last_is_unchoke)) {
        const int i = static_cast<int>(rng_.uniform_index(static_cast<std::size_t>(x)));
        const int j = pick_counterpart(i);
        if (j < 0) {
            ++counters_.tft_ticks;
            ++counters_.noop_ticks;
        } else {
            resolve_tit_for_tat(i, j);
        }
        return EventCategory::tft_tick;
    }
    u -= tft_block;

    assert(unchoke_block > 0);
    const int i = static_cast<int>(rng_.uniform_index(static_cast<std::size_t>(x)));
    const int j = pick_counterpart(i);
    if (j < 0) {
        ++counters_.unchoke_ticks;
        ++counters_.noop_ticks;
    } else {
        resolve_unchoke(i, j);
    }
    return EventCategory::unchoke_tick;
}

int Engine::pick_counterpart(int initiator) {
    if (config_.params.mode == Mode::shared) {
        const int x = state_.size();
        if (x <= 1) return -1;
        int j = static_cast<int>(rng_.uniform_index(static_cast<std::size_t>(x - 1)));
        if (j >= initiator) ++j;
        return j;
    }
    const auto& mem = state_.members(state_.peer(initiator).swarm);
    if (mem.size() <= 1) return -1;
    std::size_t pos = rng_.uniform_index(mem.size() - 1);
    if (pos >= static_cast<std::size_t>(state_.peer(initiator).pos_in_swarm)) ++pos;
    return mem[pos];
}

TrajectoryRecord Engine::run() {
    emit_samples_until(0.0);
    const double t_end = config_.t_end;
    while (clock_ < t_end) {
        if (flushed_ && state_.size() == 0 && lambda_total_ == 0.0) break;
        const double rate = total_rate();
        const double t_next = clock_ + rng_.exponential(rate);
        if (t_next > t_end) break;
        emit_samples_until(t_next);
        advance_clock_to(t_next);
        dispatch(rate);
    }
    advance_clock_to(t_end);
    emit_samples_until(t_end);
    flush_exposure();

    TrajectoryRecord rec;
    rec.config = config_;
    rec.samples = std::move(samples_);
    rec.sojourns = std::move(sojourns_);
    rec.counters = counters_;
    rec.all_pieces_time = all_pieces_time_;
    rec.flush_time = flush_time_;
    rec.flushed = flushed_;
    rec.end_time = t_end;
    rec.population_time_integral = pop_integral_;
    for (int w = 0; w < state_.n_swarms(); ++w)
        rec.final_population.push_back(state_.table(w).population());
    if (push_rates_) {
        push_rates_->horizon = t_end;
        rec.push_rates = std::move(push_rates_);
        push_rates_.reset();
    }
    return rec;
}

void Engine::resolve_arrival(int swarm) {
    flush_exposure();
    ++counters_.arrivals;
    state_.add_peer(swarm, PieceSet{}, clock_);
}

void Engine::resolve_seed_tick(int target_index) {
    flush_exposure();
    ++counters_.seed_ticks;
    const Peer& target = state_.peer(target_index);
    const int w = target.swarm;
    ++counters_.commits;
    record_commit_by_seed(config_.params.mode == Mode::autonomous ? w : -1);
    PushContext ctx{&state_, master_file_, w, target.cache};
    const Transfer tr = transferable_piece(ctx, config_.params, config_.policy, rng_);
    apply_transfer(target_index, tr);
    if (state_.complete(target_index)) depart(target_index);
}

void Engine::resolve_tit_for_tat(int first_index, int second_index) {
    assert(first_index != second_index);
    flush_exposure();
    ++counters_.tft_ticks;
    const int w1 = state_.peer(first_index).swarm;
    const int w2 = state_.peer(second_index).swarm;
    const PieceSet s1 = state_.peer(first_index).cache;
    const PieceSet s2 = state_.peer(second_index).cache;
    const PieceSet shown1 = state_.uploads_to(w1, w2) ? s1 : PieceSet{};  // 1 reveals to 2
    const PieceSet shown2 = state_.uploads_to(w2, w1) ? s2 : PieceSet{};  // 2 reveals to 1

    const bool commit1 = commit_decision(shown2, s2, w1, s1);
    const bool commit2 = commit_decision(shown1, s1, w2, s2);

    Transfer to2, to1;
    if (commit1) {
        ++counters_.commits;
        record_commit_by_peer(w1, s1);
        to2 = transferable_piece(PushContext{&state_, shown1, w2, s2}, config_.params,
                                 config_.policy, rng_);
    }
    if (commit2) {
        ++counters_.commits;
        record_commit_by_peer(w2, s2);
        to1 = transferable_piece(PushContext{&state_, shown2, w1, s1}, config_.params,
                                 config_.policy, rng_);
    }
    if (commit1) apply_transfer(second_index, to2);
    if (commit2) apply_transfer(first_index, to1);
    maybe_depart_pair(first_index, second_index);
}

void Engine::resolve_unchoke(int initiator_index, int target_index) {
    assert(initiator_index != target_index);
    flush_exposure();
    ++counters_.unchoke_ticks;
    const int wi = state_.peer(initiator_index).swarm;
    const int wt = state_.peer(target_index).swarm;
    const PieceSet si = state_.peer(initiator_index).cache;
    const PieceSet st = state_.peer(target_index).cache;
    const PieceSet shown = state_.uploads_to(wi, wt) ? si : PieceSet{};
    ++counters_.commits;  // the unchoke link is an unconditional push-contact
    record_commit_by_peer(wi, si);
    const Transfer tr =
        transferable_piece(PushContext{&state_, shown, wt, st}, config_.params, config_.policy, rng_);
    apply_transfer(target_index, tr);
    if (state_.complete(target_index)) depart(target_index);
}

bool Engine::commit_decision(const PieceSet& counterpart_revealed, const PieceSet& counterpart_cache,
                             int own_swarm, const PieceSet& own_cache) {
    const PieceSet& own_file = config_.swarms[static_cast<std::size_t>(own_swarm)].file;
    if (!((counterpart_revealed & own_file) - own_cache).empty()) return true;  // it benefits
    if (config_.params.scalability_mode && counterpart_cache.empty()) return true;
    return rng_.bernoulli(config_.params.p);
}

void Engine::apply_transfer(int target_index, const Transfer& transfer) {
    if (transfer.suppressed) ++counters_.suppressed;
    if (transfer.piece < 0) {
        ++counters_.empty_transfers;
        return;
    }
    state_.give_piece(target_index, transfer.piece);
    note_piece(state_.peer(target_index).swarm, transfer.piece);
    if (transfer.rare)
        ++counters_.transfers_rare;
    else if (transfer.nonrare)
        ++counters_.transfers_nonrare;
    else if (transfer.extra)
        ++counters_.transfers_extra;
}

void Engine::note_piece(int swarm, int piece) {
    auto& got = introduced_[static_cast<std::size_t>(swarm)];
    got.set(piece);
    if (all_pieces_time_[static_cast<std::size_t>(swarm)] < 0 &&
        (config_.swarms[static_cast<std::size_t>(swarm)].file - got).empty())
        all_pieces_time_[static_cast<std::size_t>(swarm)] = clock_;
}

void Engine::depart(int index) {
    const Peer& p = state_.peer(index);
    sojourns_.push_back(Sojourn{p.swarm, p.arrival_time, clock_});
    state_.remove_peer(index);
    ++counters_.departures;
    if (state_.size() == 0 && !flushed_) {
        flushed_ = true;
        flush_time_ = clock_;
    }
}

void Engine::maybe_depart_pair(int first_index, int second_index) {
    const bool first_done = state_.complete(first_index);
    const bool second_done = state_.complete(second_index);
    if (first_done && second_done) {
        depart(std::max(first_index, second_index));
        depart(std::min(first_index, second_index));
    } else if (first_done) {
        depart(first_index);
    } else if (second_done) {
        depart(second_index);
    }
}

void Engine::emit_samples_until(double t_limit) {
    while (config_.sample_interval * static_cast<double>(sample_index_) <= t_limit) {
        take_sample(config_.sample_interval * static_cast<double>(sample_index_));
        ++sample_index_;
    }
}

void Engine::take_sample(double t) {
    const int n = state_.n_swarms();
    Sample s;
    s.t = t;
    s.population.resize(static_cast<std::size_t>(n));
    s.nu_min.resize(static_cast<std::size_t>(n));
    s.nu_max.resize(static_cast<std::size_t>(n));
    s.mbar.resize(static_cast<std::size_t>(n));
    s.total.resize(static_cast<std::size_t>(n));
    s.total_mismatch.resize(static_cast<std::size_t>(n));
    if (config_.record_chunk_vectors) s.chunk_counts.resize(static_cast<std::size_t>(n));
    for (int w = 0; w < n; ++w) {
        const ChunkTable& table = state_.table(w);
        const auto wi = static_cast<std::size_t>(w);
        s.population[wi] = table.population();
        s.nu_min[wi] = table.nu_min();
        s.nu_max[wi] = table.nu_max();
        s.mbar[wi] = table.mbar();
        s.total[wi] = table.total();
        s.total_mismatch[wi] = table.total_mismatch();
        if (config_.record_chunk_vectors)
            table.downloadable().for_each(
                [&](int piece) { s.chunk_counts[wi].push_back(table.count(piece)); });
    }
    samples_.push_back(std::move(s));
}

void Engine::flush_exposure() {
    if (!push_rates_) return;
    const double dt = clock_ - exposure_t_;
    exposure_t_ = clock_;
    if (dt <= 0) return;
    const auto& np = config_.params;
    const double dp = np.delta_p();
    const double d1 = np.delta_1();
    const int n = state_.n_swarms();
    for (int w = 0; w < n; ++w) {
        auto& cells = push_rates_->cells[static_cast<std::size_t>(w)];
        double seed_term, scale;
        if (np.mode == Mode::shared) {
            const int x = state_.size();
            seed_term = x >= 1 ? np.L * np.U : 0.0;
            scale = x >= 2 ? static_cast<double>(x) / (x - 1) : 0.0;
        } else {
            const int xw = static_cast<int>(state_.members(w).size());
            seed_term = xw >= 1 ? np.L * np.seed_split[static_cast<std::size_t>(w)] : 0.0;
            scale = xw >= 2 ? static_cast<double>(xw) / (xw - 1) : 0.0;
        }
        std::size_t j = 0;
        state_.table(w).file().for_each([&](int piece) {
            double holders = state_.table(w).count(piece);
            if (np.mode == Mode::shared) holders += static_cast<double>(state_.complementary_count(w, piece));
            cells[j].lower_integral += dt * (seed_term + dp * scale * holders);
            cells[j].upper_integral += dt * (seed_term + d1 * scale * holders);
            ++j;
        });
    }
}

void Engine::record_commit_by_peer(int pusher_swarm, const PieceSet& pusher_cache) {
    if (!push_rates_) return;
    const auto& np = config_.params;
    if (np.mode == Mode::shared) {
        const int x = state_.size();
        const double weight = x >= 2 ? static_cast<double>(x) / (x - 1) : 1.0;
        for (int w = 0; w < state_.n_swarms(); ++w) {
            if (!state_.uploads_to(pusher_swarm, w)) continue;
            bump_cells(w, pusher_cache, weight);
        }
    } else {
        const int xw = static_cast<int>(state_.members(pusher_swarm).size());
        const double weight = xw >= 2 ? static_cast<double>(xw) / (xw - 1) : 1.0;
        bump_cells(pusher_swarm, pusher_cache, weight);
    }
}

void Engine::record_commit_by_seed(int dedicated_swarm) {
    if (!push_rates_) return;
    if (dedicated_swarm >= 0) {
        bump_cells(dedicated_swarm, master_file_, 1.0);
        return;
    }
    for (int w = 0; w < state_.n_swarms(); ++w) bump_cells(w, master_file_, 1.0);
}

void Engine::bump_cells(int swarm, const PieceSet& held, double weight) {
    auto& cells = push_rates_->cells[static_cast<std::size_t>(swarm)];
    std::size_t j = 0;
    state_.table(swarm).file().for_each([&](int piece) {
        if (held.test(piece)) cells[j].weighted_commits += weight;
        ++j;
    });
}

TrajectoryRecord run(const RunConfig& config) { return Engine(config).run(); }

}  // namespace swarmlab
