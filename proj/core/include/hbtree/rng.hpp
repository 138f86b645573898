#pragma once

#include "hbtree/bitvec.hpp"

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

namespace hbtree {

// 256-bit seed value; every stream, master secret and derived key in the
// system is rooted in one of these.
struct Seed {
    std::array<std::uint8_t, 32> bytes{};

    std::string to_hex() const;
    static Seed from_hex(std::string_view s);
    bool operator==(const Seed&) const = default;
};

// Domain-separated child seed: HMAC-SHA256(parent, label || le64(index)).
Seed derive_seed(const Seed& parent, std::string_view label, std::uint64_t index = 0);

// Exact dyadic noise rate: either zero or 2^-k for k in [2,32]. Sampling ANDs
// k uniform bit layers, so no floating-point bias enters the noise.
class NoiseRate {
public:
    NoiseRate() = default;

    static NoiseRate zero() { return NoiseRate(); }
    static NoiseRate inverse_power_of_two(unsigned k);
    // Accepts 0.0 or an exact 2^-k, rejects everything else (and eps >= 0.5).
    static NoiseRate from_double(double eps);

    bool is_zero() const { return k_ == 0; }
    unsigned log2_denominator() const { return k_; }
    double value() const;
    bool operator==(const NoiseRate&) const = default;

private:
    unsigned k_ = 0; // 0 encodes eps = 0
};

// Deterministic random stream: ChaCha20 keystream keyed by the seed, zero
// nonce. counter() counts 64-bit draws, so identical (seed, counter) prefixes
// give identical outputs regardless of how the draws were sliced.
class SeededStream {
public:
    explicit SeededStream(const Seed& seed);
    SeededStream(SeededStream&&) noexcept;
    SeededStream& operator=(SeededStream&&) noexcept;
    ~SeededStream();

    SeededStream(const SeededStream&) = delete;
    SeededStream& operator=(const SeededStream&) = delete;

    const Seed& seed() const { return seed_; }
    std::uint64_t counter() const { return counter_; }

    std::uint64_t next_u64();
    void fill_words(std::span<std::uint64_t> out);

    // Uniform in [0, n); rejection sampled.
    std::uint64_t uniform_below(std::uint64_t n);

    BitVector uniform_vector(std::size_t len);
    BitMatrix uniform_matrix(std::size_t rows, std::size_t cols);

    // len independent Bernoulli(eps) bits.
    BitVector bernoulli_vector(std::size_t len, NoiseRate eps);

private:
    void refill();

    Seed seed_;
    std::uint64_t counter_ = 0;
    struct CipherState;
    std::unique_ptr<CipherState> cipher_;
    std::array<std::uint64_t, 512> buf_;
    std::size_t buf_pos_ = 0, buf_len_ = 0;
};

// Free-function aliases for the sampling operations.
inline BitVector sample_uniform_vector(SeededStream& s, std::size_t len) {
    return s.uniform_vector(len);
}
inline BitMatrix sample_uniform_matrix(SeededStream& s, std::size_t rows, std::size_t cols) {
    return s.uniform_matrix(rows, cols);
}
inline BitVector sample_noise(SeededStream& s, std::size_t r, NoiseRate eps) {
    return s.bernoulli_vector(r, eps);
}

} // namespace hbtree
