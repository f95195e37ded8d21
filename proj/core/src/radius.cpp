#include "smoothcert/radius.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "smoothcert/errors.hpp"

namespace smoothcert {

namespace {

// Direct product evaluation. Binomial coefficients stay exactly representable
// in a double up to r ~ 30; beyond that the log-space path takes over.
constexpr std::uint32_t kDirectPathLimit = 30;

double binomial(std::uint32_t n, std::uint32_t k) {
    if (k > n) return 0.0;
    k = std::min(k, n - k);
    double c = 1.0;
    for (std::uint32_t t = 0; t < k; ++t) {
        c = c * static_cast<double>(n - t) / static_cast<double>(t + 1);
    }
    return c;
}

double log_binomial(std::uint32_t n, std::uint32_t k) {
    return std::lgamma(static_cast<double>(n) + 1.0) -
           std::lgamma(static_cast<double>(k) + 1.0) -
           std::lgamma(static_cast<double>(n - k) + 1.0);
}

// Mass of the (i, j) cell under the distribution centred on the original
// input. The perturbed-input mass is the same expression with beta and theta
// swapped, which is how both columns get filled below.
double cell_mass(const NoiseSpec& spec, std::uint32_t r, std::uint32_t i, std::uint32_t j,
                 double keep, double move) {
    const std::uint32_t rest = r - i - j;
    const double other = (spec.domain_size - 2) * spec.theta;
    if (rest > 0 && other == 0.0) {
        return 0.0; // d = 2: no third symbol to land on
    }
    if (r <= kDirectPathLimit) {
        double mass = binomial(r, i) * binomial(r - i, j);
        mass *= std::pow(keep, static_cast<double>(i)) * std::pow(move, static_cast<double>(j));
        if (rest > 0) mass *= std::pow(other, static_cast<double>(rest));
        return mass;
    }
    double log_mass = log_binomial(r, i) + log_binomial(r - i, j) +
                      i * std::log(keep) + j * std::log(move);
    if (rest > 0) log_mass += rest * std::log(other);
    return std::exp(log_mass);
}

} // namespace

RegionTable region_masses(const NoiseSpec& spec, std::uint32_t r) {
    // Exponent k = i - j appears for multiple (i, j) cells; accumulate and merge.
    std::map<int, Region, std::greater<int>> merged;
    for (std::uint32_t i = 0; i <= r; ++i) {
        for (std::uint32_t j = 0; j + i <= r; ++j) {
            const double p = cell_mass(spec, r, i, j, spec.beta, spec.theta);
            const double q = cell_mass(spec, r, i, j, spec.theta, spec.beta);
            if (p == 0.0 && q == 0.0) continue;
            const int k = static_cast<int>(i) - static_cast<int>(j);
            auto [it, inserted] = merged.try_emplace(k, Region{k, 0.0, 0.0});
            it->second.p_mass += p;
            it->second.q_mass += q;
        }
    }
    RegionTable table{r, spec, {}};
    table.regions.reserve(merged.size());
    for (const auto& [k, region] : merged) {
        table.regions.push_back(region);
    }
    return table;
}

double min_adversarial_prob(double p_lower, const RegionTable& table) {
    if (!(p_lower >= 0.0) || !(p_lower <= 1.0)) {
        throw DomainError("min_adversarial_prob: p_lower must lie in [0,1], got " +
                          std::to_string(p_lower));
    }
    double remaining = p_lower;
    double q = 0.0;
    for (const Region& region : table.regions) {
        if (remaining <= 0.0) break;
        if (region.p_mass <= remaining) {
            q += region.q_mass;
            remaining -= region.p_mass;
        } else {
            q += remaining * (region.q_mass / region.p_mass);
            remaining = 0.0;
        }
    }
    return q;
}

std::optional<std::uint32_t> certified_radius(double p_lower, const NoiseSpec& spec) {
    if (!(p_lower >= 0.0) || !(p_lower <= 1.0)) {
        throw DomainError("certified_radius: p_lower must lie in [0,1], got " +
                          std::to_string(p_lower));
    }
    if (p_lower <= 0.5) {
        return std::nullopt;
    }
    if (p_lower >= 1.0) {
        throw DomainError("certified_radius: p_lower = 1 certifies every radius; "
                          "a finite answer requires p_lower < 1");
    }
    // Thresholds are monotone in r and radii at realistic operating points are
    // tiny, so a linear scan from r = 0 is both simplest and fast. r = 0 always
    // certifies (the bound equals p_lower > 1/2).
    std::uint32_t r = 0;
    while (min_adversarial_prob(p_lower, region_masses(spec, r + 1)) > 0.5) {
        ++r;
    }
    return r;
}

double radius_threshold(std::uint32_t r, const NoiseSpec& spec) {
    const RegionTable table = region_masses(spec, r);
    double cum_p = 0.0;
    double cum_q = 0.0;
    for (const Region& region : table.regions) {
        if (region.q_mass > 0.0 && cum_q + region.q_mass >= 0.5) {
            return cum_p + (0.5 - cum_q) * (region.p_mass / region.q_mass);
        }
        cum_p += region.p_mass;
        cum_q += region.q_mass;
    }
    // Unreachable for a valid table (total Q mass is 1), kept for safety.
    return 1.0;
}

} // namespace smoothcert
