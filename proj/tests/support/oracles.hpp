#pragma once

// Independent reference implementations the unit and acceptance suites check
// the library against. Everything here recomputes results from first
// principles (exhaustive enumeration, direct tail sums) and must not call the
// code paths it validates.

#include <cstdint>
#include <functional>
#include <vector>

#include "smoothcert/noise.hpp"
#include "smoothcert/radius.hpp"

namespace smoothcert::oracles {

// Region masses by enumerating all d^r noise outcomes over the r perturbed
// coordinates (original symbol 0, adversary's symbol 1 in each), grouping by
// likelihood-ratio exponent. Exponential cost, fine for r <= ~10.
std::vector<Region> brute_force_regions(const NoiseSpec& spec, std::uint32_t r);

// Exact fractional-knapsack optimum by trying every region subset plus a
// fractional piece of every remaining region. Usable up to ~20 regions.
double knapsack_min_q(double p_lower, const std::vector<Region>& regions);

// Pr[Binomial(n, p) >= k], direct log-space summation.
double binomial_tail_at_least(std::uint32_t n, std::uint32_t k, double p);

// Exact probability that f(v xor-noise) = label under the smoothing channel,
// by enumerating all d^|v| noise vectors. |v| must stay small (<= ~12 at d=2).
double exact_smoothed_prob(const std::function<std::uint32_t(const EncodedVector&)>& f,
                           const EncodedVector& v, const NoiseSpec& spec, std::uint32_t label);

} // namespace smoothcert::oracles
