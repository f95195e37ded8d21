#include "smoothcert/estimation.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "smoothcert/errors.hpp"

namespace smoothcert {

namespace {

// Continued fraction for the incomplete beta function (modified Lentz).
double beta_continued_fraction(double a, double b, double x) {
    constexpr int kMaxIterations = 300;
    constexpr double kEps = 3e-16;
    constexpr double kTiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIterations; ++m) {
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

} // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(x >= 0.0) || !(x <= 1.0)) {
        throw DomainError("regularized_incomplete_beta: x must lie in [0,1]");
    }
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                             a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    // The continued fraction converges fast only on one side of the mean;
    // use the symmetry I_x(a,b) = 1 - I_{1-x}(b,a) on the other.
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_continued_fraction(a, b, x) / a;
    }
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double clopper_pearson_lower(std::uint32_t successes, std::uint32_t n, double alpha) {
    if (n == 0) {
        throw DomainError("clopper_pearson_lower: n must be positive");
    }
    if (successes > n) {
        throw DomainError("clopper_pearson_lower: successes " + std::to_string(successes) +
                          " exceeds n " + std::to_string(n));
    }
    if (!(alpha > 0.0) || !(alpha < 1.0)) {
        throw DomainError("clopper_pearson_lower: alpha must lie in (0,1), got " +
                          std::to_string(alpha));
    }
    if (successes == 0) {
        return 0.0;
    }
    // Solve I_p(k, n-k+1) = alpha. I_p is strictly increasing in p, so plain
    // bisection on [0,1] is guaranteed; ~50 halvings reach 1e-15.
    const double a = static_cast<double>(successes);
    const double b = static_cast<double>(n - successes) + 1.0;
    double lo = 0.0;
    double hi = 1.0;
    for (int iter = 0; iter < 200 && hi - lo > 1e-12; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (regularized_incomplete_beta(a, b, mid) < alpha) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double bonferroni_alpha(double alpha, std::uint32_t n_tests) {
    if (n_tests == 0) {
        throw DomainError("bonferroni_alpha: n_tests must be positive");
    }
    if (!(alpha > 0.0) || !(alpha < 1.0)) {
        throw DomainError("bonferroni_alpha: alpha must lie in (0,1)");
    }
    return alpha / static_cast<double>(n_tests);
}

VoteCounts VoteCounts::validated(std::vector<std::uint32_t> counts) {
    if (counts.empty()) {
        throw DimensionError("VoteCounts: need at least one label");
    }
    const std::uint64_t total = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
    if (total == 0) {
        throw DomainError("VoteCounts: n_samples must be at least 1");
    }
    VoteCounts votes;
    votes.counts = std::move(counts);
    votes.n_samples = static_cast<std::uint32_t>(total);
    return votes;
}

std::uint32_t top_label(const VoteCounts& votes) {
    std::uint32_t best = 0;
    for (std::uint32_t label = 1; label < votes.counts.size(); ++label) {
        if (votes.counts[label] > votes.counts[best]) {
            best = label;
        }
    }
    return best;
}

} // namespace smoothcert
