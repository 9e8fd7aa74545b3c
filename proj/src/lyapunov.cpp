#include "swarmlab/lyapunov.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace swarmlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double seed_rate_for(const NetworkParams& params, int w) {
    if (params.mode == Mode::shared) return params.L * params.U;
    return params.L * params.seed_split[static_cast<std::size_t>(w)];
}

double lambda_for(const NetworkParams& params, const std::vector<SwarmSpec>& swarms, int w) {
    if (params.mode == Mode::autonomous) return swarms[static_cast<std::size_t>(w)].lambda;
    double sum = 0;
    for (const auto& s : swarms) sum += s.lambda;
    return sum;
}

// D = D1 + D2 [other allies]; computed in log space so that tiny alpha yields
// a clean overflow diagnosis instead of inf/nan constants.
void fill_d(SwarmConstants& c, const SwarmSpec& spec, double eta, double xi2, double lu,
            double delta_p) {
    if (spec.beta <= 0.0) return;
    const double k = spec.k();
    c.d_w1 = 12.0 * std::exp(-2.0) / (eta * eta) * xi2 * (lu + delta_p) * spec.beta * spec.beta *
             std::pow(k, 7);
    if (spec.allies.size() > 1) {
        const double base = std::log(3.0) - 2.0 - std::log(eta) + std::log(xi2) +
                            std::log(lu + delta_p) + std::log(spec.beta) + 5.0 * std::log(k);
        const double lbk = std::log(spec.beta * k);
        double tail;
        if (spec.alpha > 0.0)
            tail = lbk / spec.alpha;
        else
            tail = lbk > 0.0 ? kInf : (lbk < 0.0 ? -kInf : 0.0);
        const double log_d2 = base + tail;
        if (log_d2 > 700.0)
            throw std::domain_error("swarm '" + spec.id +
                                    "': D constant overflows double range; alpha is too small "
                                    "for a swarm with other allies");
        c.d_w2 = std::exp(log_d2);
    }
    c.d_w = c.d_w1 + c.d_w2;
}

}  // namespace

double xi2_of(const NetworkParams& params) {
    if (params.y_opt) {
        const double numer = 2.0 * (params.L - 1) * params.mu + params.mu_hat;
        const double denom = 2.0 * (params.L - 1) * params.mu * params.p + params.mu_hat;
        return denom > 0.0 ? 1.0 + numer / denom : kInf;
    }
    return params.p > 0.0 ? 1.0 + 1.0 / params.p : kInf;
}

double n_w1(double theta, double theta1, double theta2, double epsilon, double eta,
            double seed_rate, double delta_p, int k) {
    assert(theta2 >= 2.0 * (1.0 - eta) * (1.0 - eta));
    (void)theta2;
    const double unit = std::min(seed_rate, 2.0 * (1.0 - eta) * delta_p);
    if (!(unit > 0.0)) throw std::domain_error("n_w1 requires a positive push-rate floor");
    const double need = (theta + epsilon) * theta1 * k / (2.0 * (1.0 - eta)) -
                        2.0 * (1.0 - eta) * (seed_rate - 2.0 * (1.0 - eta) * delta_p);
    return std::max(0.0, need / unit);
}

LyapunovConfig derive_constants(const NetworkParams& params,
                                const std::vector<SwarmSpec>& swarms, double eta,
                                double epsilon_prime) {
    if (!(eta > 0.0) || !(eta < 1.0)) throw std::domain_error("eta must lie in (0, 1)");
    if (!(epsilon_prime > 0.0)) throw std::domain_error("epsilon_prime must be positive");
    LyapunovConfig cfg;
    cfg.eta = eta;
    cfg.epsilon_prime = epsilon_prime;
    cfg.epsilon = 2.0 * epsilon_prime;
    cfg.delta_p = params.delta_p();
    cfg.delta_1 = params.delta_1();
    cfg.xi2 = xi2_of(params);
    if (!(cfg.delta_p > 0.0))
        throw std::domain_error(
            "the constant recipe needs delta_p > 0 (a soft tit-for-tat or unchoke link)");

    const int n = static_cast<int>(swarms.size());
    cfg.swarms.resize(static_cast<std::size_t>(n));

    double shared_c_one = 0;
    for (const auto& s : swarms)
        shared_c_one = std::max(shared_c_one, static_cast<double>(s.k()) * 8.0 * s.k() * s.k());

    for (int w = 0; w < n; ++w) {
        const SwarmSpec& spec = swarms[static_cast<std::size_t>(w)];
        SwarmConstants& c = cfg.swarms[static_cast<std::size_t>(w)];
        const double k = spec.k();
        c.k = spec.k();
        c.lambda = lambda_for(params, swarms, w);
        c.seed_rate = seed_rate_for(params, w);
        c.c1 = 8.0 * k * k;
        c.c_one = params.mode == Mode::shared ? shared_c_one : k * c.c1;
        fill_d(c, spec, eta, cfg.xi2, c.seed_rate, cfg.delta_p);

        const double drain = c.lambda * c.c_one + c.d_w + cfg.epsilon;
        c.c2 = 4.0 * k * drain / c.seed_rate;

        const double k2xi = k * k * cfg.xi2;
        c.delta = std::min({0.5 * (1.0 - eta),
                            c.c1 * (1.0 - eta) / (16.0 * k2xi * c.c2),
                            c.c2 * (1.0 - eta) / (8.0 * k2xi),
                            0.25 * (1.0 - eta) / (1.0 + k2xi)});

        c.n_w1 = n_w1(c.lambda * c.c_one + c.d_w, k, 0.5 * c.c1, cfg.epsilon, eta, c.seed_rate,
                      cfg.delta_p, c.k);
        const double floor1 = 2.0 + k * c.n_w1 / (1.0 - eta);
        const double floor2 =
            2.0 + k * (k - eta) / ((1.0 - eta) * (1.0 - eta)) *
                      (2.0 + 8.0 * k * (c.lambda * c.c_one + cfg.epsilon) / (c.c1 * cfg.delta_p));
        c.c3 = std::max(floor1, floor2);
    }
    return cfg;
}

std::vector<std::string> check_recipe(const LyapunovConfig& cfg, const NetworkParams& params,
                                      const std::vector<SwarmSpec>& swarms) {
    std::vector<std::string> bad;
    auto fail = [&bad](const std::string& who, const std::string& what) {
        bad.push_back(who + ": " + what);
    };
    if (cfg.epsilon != 2.0 * cfg.epsilon_prime) bad.push_back("epsilon != 2 epsilon_prime");
    if (cfg.xi2 != xi2_of(params)) bad.push_back("xi2 does not match the link parameters");
    const double eta = cfg.eta;
    for (std::size_t w = 0; w < swarms.size(); ++w) {
        const SwarmSpec& spec = swarms[w];
        const SwarmConstants& c = cfg.swarms[w];
        const double k = spec.k();
        if (c.c1 < 8.0 * k * k) fail(spec.id, "c1 below 8 K^2");
        if (0.25 / k * c.seed_rate * c.c2 < c.lambda * c.c_one + c.d_w + cfg.epsilon - 1e-9)
            fail(spec.id, "c2 misses the seed-drain floor");
        if (c.delta <= 0.0) fail(spec.id, "delta is not positive");
        if (c.delta > 0.5 * (1.0 - eta) + 1e-12) fail(spec.id, "delta above 0.5 (1 - eta)");
        const double k2xi = k * k * cfg.xi2;
        if (2.0 * c.delta / (1.0 - eta) * k2xi * c.c2 > 0.125 * c.c1 + 1e-9)
            fail(spec.id, "delta breaks the c1 ceiling");
        if (2.0 * c.delta / (1.0 - eta) * k2xi > 0.25 * c.c2 + 1e-9)
            fail(spec.id, "delta breaks the c2 ceiling");
        if (c.delta / (1.0 - eta) * (1.0 + k2xi) > 0.25 + 1e-12)
            fail(spec.id, "delta breaks the frequency ceiling");
        const double n1 = n_w1(c.lambda * c.c_one + c.d_w, k, 0.5 * c.c1, cfg.epsilon, eta,
                               c.seed_rate, cfg.delta_p, c.k);
        if ((c.c3 - 2.0) * (1.0 - eta) / k < n1 - 1e-9) fail(spec.id, "c3 misses the rare floor");
        if (0.125 * c.c1 / k * cfg.delta_p *
                ((c.c3 - 2.0) * (1.0 - eta) * (1.0 - eta) / (k * (k - eta)) - 2.0) <
            c.lambda * c.c_one + cfg.epsilon - 1e-9)
            fail(spec.id, "c3 misses the drain floor");
    }
    return bad;
}

LyapunovTerms lyapunov_terms(const SwarmConstants& c, double eta, int population, int nu_max,
                             long long total, long long total_mismatch) {
    LyapunovTerms t;
    const double excess = static_cast<double>(total_mismatch) - eta * nu_max;
    t.v1 = excess > 0.0 ? excess * excess : 0.0;
    t.v2 = c.c1 * (static_cast<double>(c.k) * population - static_cast<double>(total));
    const double deficit = c.c3 - static_cast<double>(total);
    t.v3 = deficit > 0.0 ? c.c2 * deficit : 0.0;
    return t;
}

double lyapunov_value(const NetworkState& state, const LyapunovConfig& cfg,
                      std::vector<LyapunovTerms>* per_swarm) {
    if (per_swarm) per_swarm->clear();
    double v = 0;
    for (int w = 0; w < state.n_swarms(); ++w) {
        const ChunkTable& table = state.table(w);
        const LyapunovTerms t =
            lyapunov_terms(cfg.swarms[static_cast<std::size_t>(w)], cfg.eta, table.population(),
                           table.nu_max(), table.total(), table.total_mismatch());
        if (per_swarm) per_swarm->push_back(t);
        v += t.total();
    }
    return v;
}

double lyapunov_at_sample(const Sample& sample, const LyapunovConfig& cfg) {
    double v = 0;
    for (std::size_t w = 0; w < cfg.swarms.size(); ++w)
        v += lyapunov_terms(cfg.swarms[w], cfg.eta, sample.population[w], sample.nu_max[w],
                            sample.total[w], sample.total_mismatch[w])
                 .total();
    return v;
}

std::vector<DriftPoint> empirical_drift(const TrajectoryRecord& record,
                                        const LyapunovConfig& cfg, double window) {
    if (!(window > 0.0)) throw std::invalid_argument("drift window must be positive");
    const double interval = record.config.sample_interval;
    const auto steps = static_cast<std::size_t>(std::llround(window / interval));
    if (steps == 0 || steps >= record.samples.size())
        throw std::invalid_argument("drift window exceeds the recorded span");

    std::vector<double> values(record.samples.size());
    for (std::size_t i = 0; i < record.samples.size(); ++i)
        values[i] = lyapunov_at_sample(record.samples[i], cfg);

    std::vector<DriftPoint> out;
    out.reserve(record.samples.size() - steps);
    for (std::size_t i = 0; i + steps < record.samples.size(); ++i) {
        DriftPoint p;
        p.t = record.samples[i].t;
        p.value = values[i];
        p.drift = (values[i + steps] - values[i]) / (record.samples[i + steps].t - record.samples[i].t);
        out.push_back(p);
    }
    return out;
}

EnvelopeReport rate_envelope_check(const TrajectoryRecord& record) {
    if (!record.push_rates)
        throw std::invalid_argument("record carries no push-rate bookkeeping");
    constexpr double kMinExpected = 10.0;
    constexpr double kZ99 = 2.5758;  // two-sided 99% normal quantile

    EnvelopeReport report;
    const double xi2 = xi2_of(record.config.params);
    const auto& cells = record.push_rates->cells;
    for (std::size_t w = 0; w < cells.size(); ++w) {
        const PieceSet& file = record.config.swarms[w].file;
        for (std::size_t j = 0; j < cells[w].size(); ++j) {
            const EnvelopeCell& cell = cells[w][j];
            EnvelopeCellReport r;
            r.swarm = static_cast<int>(w);
            r.piece = file.nth(static_cast<int>(j));
            r.observed = cell.weighted_commits;
            r.lower_mean = cell.lower_integral;
            r.upper_mean = cell.upper_integral;
            if (std::isfinite(xi2) && cell.upper_integral > xi2 * cell.lower_integral * (1.0 + 1e-9))
                report.ratio_ok = false;
            if (cell.upper_integral < kMinExpected) {
                r.verdict = EnvelopeVerdict::inconclusive;
                ++report.inconclusive;
            } else {
                // Commit weights never exceed 2, so the count variance is at
                // most 4x the expected number of commits (itself <= the mean).
                const double slack_lo = kZ99 * 2.0 * std::sqrt(std::max(cell.lower_integral, 1.0));
                const double slack_hi = kZ99 * 2.0 * std::sqrt(std::max(cell.upper_integral, 1.0));
                const bool ok = cell.weighted_commits >= cell.lower_integral - slack_lo &&
                                cell.weighted_commits <= cell.upper_integral + slack_hi;
                r.verdict = ok ? EnvelopeVerdict::consistent : EnvelopeVerdict::violated;
                ++(ok ? report.consistent : report.violated);
            }
            report.cells.push_back(r);
        }
    }
    return report;
}

}  // namespace swarmlab
