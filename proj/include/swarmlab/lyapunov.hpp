#pragma once

#include <optional>
#include <string>
#include <vector>

#include "swarmlab/engine.hpp"
#include "swarmlab/network_state.hpp"
#include "swarmlab/types.hpp"

namespace swarmlab {

// Per-swarm drift-analysis constants. `lambda` and `seed_rate` are the arrival
// mass and seed bandwidth the recipe used for this swarm: the whole network's
// in shared mode, the swarm's own share in autonomous mode (where each swarm
// is treated as an independent network).
struct SwarmConstants {
    int k = 0;
    double c1 = 0;
    double c2 = 0;
    double c3 = 0;
    double delta = 0;
    double c_one = 0;  // max_W K_W C1_W in shared mode, K_W C1_W in autonomous
    double d_w = 0;    // D constant, d_w = d_w1 + d_w2 * [has other allies]
    double d_w1 = 0;
    double d_w2 = 0;
    double n_w1 = 0;  // rare-region population floor behind the c3 bound
    double lambda = 0;
    double seed_rate = 0;
};

struct LyapunovConfig {
    double eta = 0.5;
    double epsilon_prime = 0;
    double epsilon = 0;  // 2 * epsilon_prime
    double delta_p = 0;
    double delta_1 = 0;
    double xi2 = 0;
    std::vector<SwarmConstants> swarms;
};

// Envelope-ratio constant: 1 + (2(L-1)mu + mu_hat) / (2(L-1)mu p + mu_hat)
// with the unchoke link, 1 + 1/p without; +infinity when the denominator
// vanishes.
double xi2_of(const NetworkParams& params);

// Smallest floor on (K - eta) nu_max - sum_{i != rarest} nu^(i) that forces
// theta + g <= -epsilon in the rare-piece drift region. Requires
// theta2 >= 2(1-eta)^2 and delta_p > 0.
double n_w1(double theta, double theta1, double theta2, double epsilon, double eta,
            double seed_rate, double delta_p, int k);

// Builds the constant set in recipe order: c1 = 8K^2; c_one; c2 minimal for
// the seed-drain floor; delta maximal under its four ceilings; c3 maximal of
// its two floors. Throws std::domain_error when delta_p = 0 (the envelopes
// collapse) or when a D constant overflows double range (tiny alpha with
// allies present).
LyapunovConfig derive_constants(const NetworkParams& params,
                                const std::vector<SwarmSpec>& swarms, double eta,
                                double epsilon_prime);

// Re-checks every recipe inequality on a constant set; empty means all hold.
std::vector<std::string> check_recipe(const LyapunovConfig& cfg, const NetworkParams& params,
                                      const std::vector<SwarmSpec>& swarms);

struct LyapunovTerms {
    double v1 = 0;  // ((M - eta nu_max)^+)^2
    double v2 = 0;  // c1 (K |x|_W - P)
    double v3 = 0;  // c2 (c3 - P)^+

    double total() const { return v1 + v2 + v3; }
};

// Terms from one swarm's aggregates: population, max chunk count, held-piece
// total P, and total mismatch M = K nu_max - P.
LyapunovTerms lyapunov_terms(const SwarmConstants& c, double eta, int population, int nu_max,
                             long long total, long long total_mismatch);

// Full-state value; optionally writes the per-swarm decomposition.
double lyapunov_value(const NetworkState& state, const LyapunovConfig& cfg,
                      std::vector<LyapunovTerms>* per_swarm = nullptr);

// Value reconstructed from one trajectory sample.
double lyapunov_at_sample(const Sample& sample, const LyapunovConfig& cfg);

struct DriftPoint {
    double t = 0;
    double value = 0;  // V at t
    double drift = 0;  // (V(t + window) - V(t)) / window
};

// Windowed drift estimates along the sample grid. The window is rounded to a
// whole number of sample intervals; throws std::invalid_argument when it is
// not positive or exceeds the recorded span.
std::vector<DriftPoint> empirical_drift(const TrajectoryRecord& record,
                                        const LyapunovConfig& cfg, double window);

enum class EnvelopeVerdict { consistent, violated, inconclusive };

struct EnvelopeCellReport {
    int swarm = 0;
    int piece = 0;
    double observed = 0;    // xi1-weighted push-commit count by ally holders
    double lower_mean = 0;  // exact pathwise integral of the lower envelope
    double upper_mean = 0;  // exact pathwise integral of the upper envelope
    EnvelopeVerdict verdict = EnvelopeVerdict::inconclusive;
};

struct EnvelopeReport {
    double confidence = 0.99;
    bool ratio_ok = true;  // upper integral <= xi2 * lower integral, pathwise
    int consistent = 0;
    int violated = 0;
    int inconclusive = 0;
    std::vector<EnvelopeCellReport> cells;
};

// Checks that each piece's weighted push-commit count falls inside the
// [lower, upper] envelope band at 99% confidence. Each peer commit was
// weighted by |x|/(|x|-1) at commit time and each seed commit by 1, so the
// expected weighted count is exactly the pathwise integral of the push rate,
// which the model pins between the two envelope integrals. Cells whose upper
// mean is below a minimum expected count come back inconclusive rather than
// pass/fail. Throws std::invalid_argument when the record carries no
// push-rate bookkeeping.
EnvelopeReport rate_envelope_check(const TrajectoryRecord& record);

}  // namespace swarmlab
