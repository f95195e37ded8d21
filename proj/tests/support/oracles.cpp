#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace smoothcert::oracles {

std::vector<Region> brute_force_regions(const NoiseSpec& spec, std::uint32_t r) {
    std::map<int, Region, std::greater<int>> merged;
    std::vector<std::uint32_t> outcome(r, 0);
    const std::uint32_t d = spec.domain_size;
    while (true) {
        double p = 1.0;
        double q = 1.0;
        int exponent = 0;
        for (std::uint32_t t = 0; t < r; ++t) {
            p *= outcome[t] == 0 ? spec.beta : spec.theta;
            q *= outcome[t] == 1 ? spec.beta : spec.theta;
            if (outcome[t] == 0) ++exponent;
            if (outcome[t] == 1) --exponent;
        }
        auto [it, inserted] = merged.try_emplace(exponent, Region{exponent, 0.0, 0.0});
        it->second.p_mass += p;
        it->second.q_mass += q;

        // base-d odometer
        std::uint32_t pos = 0;
        while (pos < r && ++outcome[pos] == d) {
            outcome[pos] = 0;
            ++pos;
        }
        if (pos == r) break;
    }
    std::vector<Region> regions;
    regions.reserve(merged.size());
    for (const auto& [k, region] : merged) regions.push_back(region);
    return regions;
}

double knapsack_min_q(double p_lower, const std::vector<Region>& regions) {
    const std::size_t m = regions.size();
    double best = 1.0; // taking everything always satisfies the constraint
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
        double p_subset = 0.0;
        double q_subset = 0.0;
        for (std::size_t t = 0; t < m; ++t) {
            if (mask & (std::uint64_t{1} << t)) {
                p_subset += regions[t].p_mass;
                q_subset += regions[t].q_mass;
            }
        }
        if (p_subset >= p_lower) {
            best = std::min(best, q_subset);
            continue;
        }
        for (std::size_t t = 0; t < m; ++t) {
            if (mask & (std::uint64_t{1} << t)) continue;
            const double need = p_lower - p_subset;
            if (need <= regions[t].p_mass && regions[t].p_mass > 0.0) {
                best = std::min(best, q_subset + need * regions[t].q_mass / regions[t].p_mass);
            }
        }
    }
    return best;
}

double binomial_tail_at_least(std::uint32_t n, std::uint32_t k, double p) {
    if (k == 0) return 1.0;
    if (p <= 0.0) return 0.0;
    if (p >= 1.0) return 1.0;
    double tail = 0.0;
    for (std::uint32_t j = k; j <= n; ++j) {
        const double log_term = std::lgamma(n + 1.0) - std::lgamma(j + 1.0) -
                                std::lgamma(n - j + 1.0) + j * std::log(p) +
                                (n - j) * std::log1p(-p);
        tail += std::exp(log_term);
    }
    return std::min(tail, 1.0);
}

double exact_smoothed_prob(const std::function<std::uint32_t(const EncodedVector&)>& f,
                           const EncodedVector& v, const NoiseSpec& spec, std::uint32_t label) {
    const std::uint32_t d = spec.domain_size;
    const std::size_t n = v.size();
    EncodedVector noise{std::vector<Symbol>(n, 0), d};
    double total = 0.0;
    while (true) {
        double mass = 1.0;
        for (std::size_t t = 0; t < n; ++t) {
            mass *= noise.symbols[t] == 0 ? spec.beta : spec.theta;
        }
        if (f(modular_add(v, noise)) == label) total += mass;

        std::size_t pos = 0;
        while (pos < n && ++noise.symbols[pos] == d) {
            noise.symbols[pos] = 0;
            ++pos;
        }
        if (pos == n) break;
    }
    return total;
}

} // namespace smoothcert::oracles
