#pragma once

#include <cstdint>
#include <vector>

namespace smoothcert {

// Monte Carlo label frequencies over N smoothing draws.
struct VoteCounts {
    std::vector<std::uint32_t> counts; // per label, length = number of classes
    std::uint32_t n_samples = 0;       // must equal the sum of counts

    static VoteCounts validated(std::vector<std::uint32_t> counts);
};

// Regularized incomplete beta function I_x(a, b), continued-fraction
// evaluation with the symmetry transformation. Exposed because the
// Clopper-Pearson inversion and its tests both need it.
double regularized_incomplete_beta(double a, double b, double x);

// One-sided exact binomial lower confidence bound: the alpha-quantile of
// Beta(successes, n - successes + 1), i.e. the p at which observing at least
// `successes` out of n has tail probability exactly alpha. Returns 0 when
// successes = 0. Bisection on the incomplete beta to 1e-12.
double clopper_pearson_lower(std::uint32_t successes, std::uint32_t n, double alpha);

// Evenly split a global significance level across n_tests simultaneous tests.
double bonferroni_alpha(double alpha, std::uint32_t n_tests);

// Argmax over vote counts; ties break toward the smallest label index.
std::uint32_t top_label(const VoteCounts& votes);

} // namespace smoothcert
