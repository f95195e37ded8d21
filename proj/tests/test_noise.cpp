#include <doctest.h>

#include <cmath>
#include <thread>
#include <vector>

#include "smoothcert/errors.hpp"
#include "smoothcert/noise.hpp"
#include "smoothcert/rng.hpp"

using namespace smoothcert;

namespace {

EncodedVector vec(std::vector<Symbol> symbols, std::uint32_t d) {
    return EncodedVector::validated(std::move(symbols), d);
}

} // namespace

TEST_CASE("NoiseSpec derives theta and rejects degenerate betas") {
    const NoiseSpec spec(0.9, 2);
    CHECK(spec.theta == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(std::abs(spec.beta + (spec.domain_size - 1) * spec.theta - 1.0) < 1e-12);

    const NoiseSpec wide(0.7, 4);
    CHECK(wide.theta == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(wide.ratio() > 1.0);

    CHECK_THROWS_AS(NoiseSpec(0.5, 2), DomainError);  // beta = 1/d degenerates the ratio
    CHECK_THROWS_AS(NoiseSpec(0.4, 2), DomainError);
    CHECK_THROWS_AS(NoiseSpec(1.0, 2), DomainError);
    CHECK_THROWS_AS(NoiseSpec(0.9, 1), DomainError);
}

TEST_CASE("EncodedVector rejects out-of-domain symbols") {
    CHECK_THROWS_AS(EncodedVector::validated({0, 2}, 2), DomainError);
    CHECK_NOTHROW(EncodedVector::validated({0, 1}, 2));
}

TEST_CASE("modular_add follows per-coordinate modular arithmetic") {
    CHECK(modular_add(vec({1}, 2), vec({1}, 2)).symbols == std::vector<Symbol>{0});
    CHECK(modular_add(vec({3, 0}, 10), vec({9, 0}, 10)).symbols == std::vector<Symbol>{2, 0});

    const EncodedVector v = vec({4, 0, 7, 1}, 9);
    const EncodedVector zero = vec({0, 0, 0, 0}, 9);
    CHECK(modular_add(v, zero).symbols == v.symbols);

    CHECK_THROWS_AS(modular_add(vec({1}, 2), vec({1, 0}, 2)), DimensionError);
    CHECK_THROWS_AS(modular_add(vec({1}, 2), vec({1}, 3)), DomainError);
}

TEST_CASE("modular_negate inverts modular_add") {
    SplitMix64 rng(123);
    for (int trial = 0; trial < 50; ++trial) {
        const std::uint32_t d = 2 + static_cast<std::uint32_t>(rng.next_below(9));
        std::vector<Symbol> vs(17), ds(17);
        for (auto& s : vs) s = static_cast<Symbol>(rng.next_below(d));
        for (auto& s : ds) s = static_cast<Symbol>(rng.next_below(d));
        const EncodedVector v = vec(vs, d);
        const EncodedVector delta = vec(ds, d);
        const EncodedVector roundtrip = modular_add(modular_add(v, delta), modular_negate(delta));
        CHECK(roundtrip.symbols == v.symbols);
    }
}

TEST_CASE("sample_noise edge cases and determinism") {
    const NoiseSpec spec(0.9, 2);
    CHECK(sample_noise(spec, 0, 42).symbols.empty());

    const EncodedVector a = sample_noise(spec, 1000, 7);
    const EncodedVector b = sample_noise(spec, 1000, 7);
    CHECK(a.symbols == b.symbols);
    CHECK(sample_noise(spec, 1000, 8).symbols != a.symbols);
}

TEST_CASE("sample_noise marginal matches beta") {
    const NoiseSpec spec(0.9, 2);
    const std::size_t n = 1000000;
    const EncodedVector draw = sample_noise(spec, n, 7);
    std::size_t zeros = 0;
    for (Symbol s : draw.symbols) {
        if (s == 0) ++zeros;
    }
    const double fraction = static_cast<double>(zeros) / static_cast<double>(n);
    CHECK(std::abs(fraction - 0.9) < 0.001); // 99.9% binomial CI half-width at 10^6 draws
}

TEST_CASE("sample_noise independent of thread and call order") {
    const NoiseSpec spec(0.8, 4);
    const EncodedVector reference = sample_noise(spec, 4096, 99);

    // interleave other draws between repeats
    (void)sample_noise(spec, 17, 5);
    const EncodedVector again = sample_noise(spec, 4096, 99);
    CHECK(again.symbols == reference.symbols);

    EncodedVector from_thread_1, from_thread_2;
    std::thread t1([&] { from_thread_1 = sample_noise(spec, 4096, 99); });
    std::thread t2([&] { from_thread_2 = sample_noise(spec, 4096, 99); });
    t1.join();
    t2.join();
    CHECK(from_thread_1.symbols == reference.symbols);
    CHECK(from_thread_2.symbols == reference.symbols);
}

TEST_CASE("sampled histogram passes chi-square against (beta, theta, ...)") {
    struct Case {
        double beta;
        std::uint32_t d;
        double critical; // chi-square 0.999 quantile at d-1 dof
    };
    // 0.999 quantiles: 1 dof 10.828, 3 dof 16.266, 4 dof 18.467
    const Case cases[] = {{0.9, 2, 10.828}, {0.7, 4, 16.266}, {0.5, 5, 18.467}};
    for (const Case& c : cases) {
        CAPTURE(c.beta);
        CAPTURE(c.d);
        const NoiseSpec spec(c.beta, c.d);
        const std::size_t n = 200000;
        const EncodedVector draw = sample_noise(spec, n, 1234);
        std::vector<std::size_t> observed(c.d, 0);
        for (Symbol s : draw.symbols) ++observed[s];
        double chi2 = 0.0;
        for (std::uint32_t s = 0; s < c.d; ++s) {
            const double expected = (s == 0 ? spec.beta : spec.theta) * static_cast<double>(n);
            const double diff = static_cast<double>(observed[s]) - expected;
            chi2 += diff * diff / expected;
        }
        CHECK(chi2 < c.critical);
    }
}

TEST_CASE("apply_noise equals modular_add of sampled noise") {
    const NoiseSpec spec(0.75, 4);
    const EncodedVector v = vec({0, 1, 2, 3, 3, 2, 1, 0}, 4);
    const std::uint64_t seed = 31337;
    const EncodedVector direct = apply_noise(v, spec, seed);
    const EncodedVector manual = modular_add(v, sample_noise(spec, v.size(), seed));
    CHECK(direct.symbols == manual.symbols);

    CHECK_THROWS_AS(apply_noise(vec({0}, 2), spec, 1), DomainError);
}

TEST_CASE("apply_noise marginals: keep with beta, move with theta") {
    const NoiseSpec spec(0.7, 4); // theta = 0.1
    const EncodedVector v = vec({2, 0, 3}, 4);
    const std::size_t trials = 100000;
    std::vector<std::vector<std::size_t>> counts(v.size(), std::vector<std::size_t>(4, 0));
    for (std::size_t s = 0; s < trials; ++s) {
        const EncodedVector noised = apply_noise(v, spec, 900000 + s);
        for (std::size_t j = 0; j < v.size(); ++j) ++counts[j][noised.symbols[j]];
    }
    for (std::size_t j = 0; j < v.size(); ++j) {
        for (Symbol t = 0; t < 4; ++t) {
            const double expected = t == v.symbols[j] ? spec.beta : spec.theta;
            const double observed = static_cast<double>(counts[j][t]) / trials;
            CHECK(std::abs(observed - expected) < 0.01);
        }
    }
}
