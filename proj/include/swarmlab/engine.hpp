#pragma once

#include <optional>
#include <string>
#include <vector>

#include "swarmlab/network_state.hpp"
#include "swarmlab/policy.hpp"
#include "swarmlab/rng.hpp"
#include "swarmlab/types.hpp"

namespace swarmlab {

enum class EventCategory { arrival, seed_tick, tft_tick, unchoke_tick };

struct EventCounters {
    long long arrivals = 0;
    long long seed_ticks = 0;
    long long tft_ticks = 0;
    long long unchoke_ticks = 0;
    long long noop_ticks = 0;  // tick that found no eligible counterpart
    long long commits = 0;     // push commitments, seed included
    long long transfers_rare = 0;
    long long transfers_nonrare = 0;
    long long suppressed = 0;  // non-rare draws rejected by the sharing factor
    long long transfers_extra = 0;
    long long empty_transfers = 0;  // commitment whose transferable set was empty
    long long departures = 0;
};

struct Sample {
    double t = 0;
    std::vector<int> population;
    std::vector<int> nu_min;
    std::vector<int> nu_max;
    std::vector<int> mbar;
    std::vector<long long> total;           // sum of chunk counts over the file
    std::vector<long long> total_mismatch;  // K * nu_max - total
    std::vector<std::vector<int>> chunk_counts;  // per-piece, only when recorded
};

struct Sojourn {
    int swarm = 0;
    double arrival_time = 0;
    double departure_time = 0;
};

// Push-rate envelope bookkeeping for one (swarm, file-piece) pair: the
// xi1-weighted count of push commitments by ally holders of the piece, and
// the exact pathwise integrals of the lower/upper rate envelopes.
struct EnvelopeCell {
    double weighted_commits = 0;
    double lower_integral = 0;
    double upper_integral = 0;
};

struct PushRateRecord {
    // cells[w][j] follows swarm w's file pieces in ascending piece order.
    std::vector<std::vector<EnvelopeCell>> cells;
    double horizon = 0;
};

struct TrajectoryRecord {
    RunConfig config;  // resolved copy used for the run
    std::vector<Sample> samples;
    std::vector<Sojourn> sojourns;
    EventCounters counters;
    std::vector<double> all_pieces_time;  // first time every file piece existed; -1 if never
    double flush_time = -1;               // first time the roster emptied; -1 if never
    bool flushed = false;
    double end_time = 0;
    double population_time_integral = 0;  // integral of |x| dt over [0, end_time]
    std::vector<int> final_population;    // per swarm
    std::optional<PushRateRecord> push_rates;
};

// Event-driven simulator for the multi-swarm exchange model. All randomness
// flows through one stream in a fixed draw order per event:
//   1. exponential(total_rate) for the inter-event time,
//   2. one uniform for the event-category walk (arrivals by swarm, then the
//      seed clock(s), then the tit-for-tat block, then the unchoke block),
//   3. uniform initiator index (peer ticks) or target index (seed ticks),
//   4. uniform counterpart index, skipped when no counterpart exists,
//   5. resolution draws: tit-for-tat commit Bernoullis for peer 1 then peer 2
//      (each skipped when the peer benefits or the commit is forced), then the
//      transferable-set draws for direction 1->2, then 2->1.
class Engine {
public:
    explicit Engine(const RunConfig& config);  // throws std::invalid_argument when invalid

    double clock() const { return clock_; }
    const NetworkState& state() const { return state_; }
    NetworkState& state_mut() { return state_; }
    Rng& rng() { return rng_; }
    const EventCounters& counters() const { return counters_; }
    const RunConfig& config() const { return config_; }

    // Superposition of every active Poisson clock at the current state.
    double total_rate() const;

    // Advances to the next event and resolves it; emits due samples first.
    EventCategory step();

    // Runs until t_end (or until the roster empties in a zero-arrival run)
    // and moves the accumulated record out.
    TrajectoryRecord run();

    // Single-event entry points used by targeted tests; each resolves at the
    // current clock against the current state.
    void resolve_arrival(int swarm);
    void resolve_seed_tick(int target_index);
    void resolve_tit_for_tat(int first_index, int second_index);
    void resolve_unchoke(int initiator_index, int target_index);

private:
    EventCategory dispatch(double rate);  // category walk + resolution at the current clock
    void advance_clock_to(double t);      // accumulates the population time integral
    int pick_counterpart(int initiator);  // -1 when none eligible
    void bump_cells(int swarm, const PieceSet& held, double weight);
    void emit_samples_until(double t_limit);
    void take_sample(double t);
    void flush_exposure();  // envelope integrals over [exposure_t_, clock_]
    void record_commit_by_peer(int pusher_swarm, const PieceSet& pusher_cache);
    void record_commit_by_seed(int dedicated_swarm);  // -1 in shared mode
    void apply_transfer(int target_index, const Transfer& transfer);
    void note_piece(int swarm, int piece);
    void depart(int index);
    void maybe_depart_pair(int first_index, int second_index);
    bool commit_decision(const PieceSet& counterpart_revealed, const PieceSet& counterpart_cache,
                         int own_swarm, const PieceSet& own_cache);

    RunConfig config_;
    NetworkState state_;
    Rng rng_;
    double clock_ = 0;
    double lambda_total_ = 0;
    int master_k_ = 0;
    PieceSet master_file_;
    EventCounters counters_;
    std::vector<Sojourn> sojourns_;
    std::vector<Sample> samples_;
    long long sample_index_ = 0;
    std::vector<PieceSet> introduced_;  // pieces ever present, per swarm
    std::vector<double> all_pieces_time_;
    double flush_time_ = -1;
    bool flushed_ = false;
    double pop_integral_ = 0;
    std::optional<PushRateRecord> push_rates_;
    double exposure_t_ = 0;
};

// Validates, simulates, returns the record.
TrajectoryRecord run(const RunConfig& config);

}  // namespace swarmlab
