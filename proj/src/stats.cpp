#include "swarmlab/stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace swarmlab {

namespace {

double log_beta(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// Continued fraction for the regularized incomplete beta (modified Lentz).
double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-16;
    constexpr double kTiny = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0, d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

double reg_inc_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double bt = std::exp(a * std::log(x) + b * std::log1p(-x) - log_beta(a, b));
    if (x < (a + 1.0) / (a + b + 2.0)) return bt * betacf(a, b, x) / a;
    return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

// P(|T_df| > t) for t >= 0.
double two_sided_tail(double t, double df) {
    return reg_inc_beta(0.5 * df, 0.5, df / (df + t * t));
}

}  // namespace

double t_quantile(double confidence, int df) {
    if (!(confidence > 0.0) || !(confidence < 1.0))
        throw std::invalid_argument("confidence must lie in (0, 1)");
    if (df < 1) throw std::invalid_argument("degrees of freedom must be positive");
    const double tail = 1.0 - confidence;
    double lo = 0.0, hi = 1.0;
    while (two_sided_tail(hi, df) > tail) hi *= 2.0;  // bracket the root
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (two_sided_tail(mid, df) > tail ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

MeanCi mean_ci(const std::vector<double>& values, double confidence) {
    if (values.empty()) throw std::invalid_argument("mean_ci needs at least one value");
    MeanCi out;
    out.n = static_cast<int>(values.size());
    out.confidence = confidence;
    double sum = 0;
    for (double v : values) sum += v;
    out.mean = sum / out.n;
    if (out.n < 2) {
        out.half_width = std::numeric_limits<double>::infinity();
        return out;
    }
    double ss = 0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.stddev = std::sqrt(ss / (out.n - 1));
    out.half_width = t_quantile(confidence, out.n - 1) * out.stddev / std::sqrt(out.n);
    return out;
}

LinearFit linear_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size()) throw std::invalid_argument("linear_fit needs paired samples");
    const auto n = xs.size();
    if (n < 2) throw std::invalid_argument("linear_fit needs at least two points");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("linear_fit needs two distinct x values");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0, ss_tot = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = ys[i] - fit.intercept - fit.slope * xs[i];
        ss_res += e * e;
        ss_tot += (ys[i] - my) * (ys[i] - my);
    }
    fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace swarmlab
