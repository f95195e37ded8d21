#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "smoothcert/noise.hpp"

namespace smoothcert {

// One likelihood-ratio region for r perturbed coordinates. Outcomes where the
// noise restores the original symbol on i coordinates and lands on the
// adversary's symbol on j coordinates all share the ratio rho^(i-j) with
// rho = beta/theta; regions with equal exponent are merged, so only the
// exponent and the two masses survive.
struct Region {
    int ratio_exponent; // i - j
    double p_mass;      // probability under noise around the original input
    double q_mass;      // probability under noise around the perturbed input
};

// All regions for a given perturbation size, sorted by ratio_exponent
// descending (equivalently by P/Q ratio descending).
struct RegionTable {
    std::uint32_t r;
    NoiseSpec spec;
    std::vector<Region> regions;
};

// Builds the region decomposition for r perturbed coordinates:
//   p(i,j) = C(r,i) C(r-i,j) beta^i theta^j ((d-2) theta)^(r-i-j)
//   q(i,j) = same with the roles of beta and theta swapped
// merged over equal i-j. r = 0 gives the single region (0, 1, 1).
RegionTable region_masses(const NoiseSpec& spec, std::uint32_t r);

// The Neyman-Pearson lower bound: the minimum of Q(A) over all events A with
// P(A) >= p_lower. Greedy fill in descending ratio order; the optimum takes
// whole regions plus a fractional piece of the last one (fractional knapsack).
double min_adversarial_prob(double p_lower, const RegionTable& table);

// Largest r such that min_adversarial_prob(p_lower, region_masses(spec, r))
// stays strictly above 1/2, i.e. the certified l0 radius. nullopt when
// p_lower <= 1/2 (no majority, nothing certified, not even radius 0).
// p_lower must be < 1: at exactly 1 no finite radius exists.
std::optional<std::uint32_t> certified_radius(double p_lower, const NoiseSpec& spec);

// The infimum p for which radius r is certified: certified_radius(p) >= r
// if and only if p > radius_threshold(r, spec). Closed form from the greedy
// fill (locate the region where cumulative Q crosses 1/2, solve the linear
// segment).
double radius_threshold(std::uint32_t r, const NoiseSpec& spec);

} // namespace smoothcert
