#include <doctest.h>

#include "hbtree/rng.hpp"

#include <cmath>

using namespace hbtree;

namespace {
Seed test_seed(std::uint64_t n) { return derive_seed(Seed{}, "test_rng", n); }
} // namespace

TEST_CASE("same seed gives identical output") {
    SeededStream a(test_seed(0)), b(test_seed(0));
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
    CHECK(a.counter() == 1000);

    SeededStream c(test_seed(0)), d(test_seed(0));
    CHECK(c.uniform_matrix(33, 65) == d.uniform_matrix(33, 65));
    CHECK(c.uniform_vector(100) == d.uniform_vector(100));
}

TEST_CASE("word slicing does not change the stream") {
    SeededStream a(test_seed(1)), b(test_seed(1));
    std::vector<std::uint64_t> words(700);
    a.fill_words(words);
    for (std::size_t i = 0; i < words.size(); ++i) CHECK(words[i] == b.next_u64());
    CHECK(a.counter() == b.counter());
}

TEST_CASE("different seeds differ") {
    SeededStream a(test_seed(2)), b(test_seed(3));
    CHECK(a.uniform_vector(256) != b.uniform_vector(256));
    // derivation is domain separated over labels and indices
    CHECK(derive_seed(test_seed(0), "x", 0) != derive_seed(test_seed(0), "x", 1));
    CHECK(derive_seed(test_seed(0), "x", 0) != derive_seed(test_seed(0), "y", 0));
    CHECK(derive_seed(test_seed(0), "x", 0) != test_seed(0));
}

TEST_CASE("uniform bits are balanced") {
    SeededStream s(test_seed(4));
    const BitVector v = s.uniform_vector(100000);
    const double frac = static_cast<double>(v.weight()) / 100000.0;
    CHECK(frac >= 0.495);
    CHECK(frac <= 0.505);
}

TEST_CASE("bernoulli sampling") {
    SeededStream s(test_seed(5));
    CHECK(s.bernoulli_vector(1000, NoiseRate::zero()) == BitVector(1000));

    const BitVector v = s.bernoulli_vector(100000, NoiseRate::from_double(0.25));
    const double frac = static_cast<double>(v.weight()) / 100000.0;
    CHECK(frac >= 0.245);
    CHECK(frac <= 0.255);

    const BitVector w = s.bernoulli_vector(100000, NoiseRate::from_double(0.125));
    const double frac8 = static_cast<double>(w.weight()) / 100000.0;
    CHECK(frac8 >= 0.121);
    CHECK(frac8 <= 0.129);
}

TEST_CASE("AND-of-layers matches threshold sampling statistically") {
    // oracle: per bit draw a 2-bit uniform integer, emit 1 iff it is 0
    SeededStream oracle(test_seed(6));
    const std::size_t n = 100000;
    std::size_t oracle_weight = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (oracle.uniform_below(4) == 0) ++oracle_weight;

    SeededStream s(test_seed(7));
    const std::size_t and_weight = s.bernoulli_vector(n, NoiseRate::from_double(0.25)).weight();

    // two-sample proportion z-test at 4 sigma
    const double p1 = static_cast<double>(oracle_weight) / n;
    const double p2 = static_cast<double>(and_weight) / n;
    const double pooled = (p1 + p2) / 2.0;
    const double se = std::sqrt(2.0 * pooled * (1.0 - pooled) / n);
    CHECK(std::abs(p1 - p2) <= 4.0 * se);
}

TEST_CASE("noise rate validation") {
    CHECK(NoiseRate::from_double(0.25).log2_denominator() == 2);
    CHECK(NoiseRate::from_double(0.125).log2_denominator() == 3);
    CHECK(NoiseRate::from_double(0.0).is_zero());
    CHECK(NoiseRate::from_double(0.25).value() == 0.25);
    CHECK_THROWS_AS(NoiseRate::from_double(0.5), std::invalid_argument);
    CHECK_THROWS_AS(NoiseRate::from_double(0.3), std::invalid_argument);
    CHECK_THROWS_AS(NoiseRate::from_double(-0.1), std::invalid_argument);
    CHECK_THROWS_AS(NoiseRate::inverse_power_of_two(1), std::invalid_argument);
}

TEST_CASE("uniform_below stays in range and is deterministic") {
    SeededStream a(test_seed(8)), b(test_seed(8));
    for (int i = 0; i < 2000; ++i) {
        const std::uint64_t n = 1 + (static_cast<std::uint64_t>(i) * 37) % 1000;
        const std::uint64_t x = a.uniform_below(n);
        CHECK(x < n);
        CHECK(x == b.uniform_below(n));
    }
    CHECK_THROWS_AS(a.uniform_below(0), std::invalid_argument);
}

TEST_CASE("seed hex round trip") {
    const Seed s = test_seed(9);
    CHECK(Seed::from_hex(s.to_hex()) == s);
    CHECK(s.to_hex().size() == 64);
    CHECK_THROWS_AS(Seed::from_hex("abc"), std::invalid_argument);
    CHECK_THROWS_AS(Seed::from_hex(std::string(64, 'g')), std::invalid_argument);
}

TEST_CASE("sampled outputs are canonical") {
    SeededStream s(test_seed(10));
    for (std::size_t len : {1u, 63u, 64u, 65u, 100001u}) {
        CHECK(s.uniform_vector(len).padding_is_zero());
        CHECK(s.bernoulli_vector(len, NoiseRate::from_double(0.25)).padding_is_zero());
    }
}
