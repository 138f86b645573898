#include "hbtree/rng.hpp"

#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace hbtree {

namespace {
int hex_nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw std::invalid_argument("bad hex digit in seed");
}
} // namespace

std::string Seed::to_hex() const {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(64);
    for (std::uint8_t b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xf]);
    }
    return out;
}

Seed Seed::from_hex(std::string_view s) {
    if (s.size() != 64) throw std::invalid_argument("seed must be 64 hex chars");
    Seed out;
    for (std::size_t i = 0; i < 32; ++i)
        out.bytes[i] = static_cast<std::uint8_t>((hex_nibble(s[2 * i]) << 4) | hex_nibble(s[2 * i + 1]));
    return out;
}

Seed derive_seed(const Seed& parent, std::string_view label, std::uint64_t index) {
    std::vector<std::uint8_t> msg(label.size() + 8);
    std::memcpy(msg.data(), label.data(), label.size());
    for (int i = 0; i < 8; ++i)
        msg[label.size() + i] = static_cast<std::uint8_t>(index >> (8 * i));

    Seed out;
    unsigned out_len = 0;
    if (!HMAC(EVP_sha256(), parent.bytes.data(), static_cast<int>(parent.bytes.size()),
              msg.data(), msg.size(), out.bytes.data(), &out_len) ||
        out_len != out.bytes.size())
        throw std::runtime_error("HMAC-SHA256 failed");
    return out;
}

NoiseRate NoiseRate::inverse_power_of_two(unsigned k) {
    if (k < 2 || k > 32) throw std::invalid_argument("noise rate must be 2^-k with k in [2,32]");
    NoiseRate n;
    n.k_ = k;
    return n;
}

NoiseRate NoiseRate::from_double(double eps) {
    if (eps == 0.0) return zero();
    if (!(eps > 0.0) || eps >= 0.5) throw std::invalid_argument("noise rate must be in [0, 0.5)");
    const double k = -std::log2(eps);
    const double rounded = std::round(k);
    if (std::abs(k - rounded) > 1e-12 || std::ldexp(1.0, -static_cast<int>(rounded)) != eps)
        throw std::invalid_argument("noise rate must be an exact 2^-k");
    return inverse_power_of_two(static_cast<unsigned>(rounded));
}

double NoiseRate::value() const {
    return k_ == 0 ? 0.0 : std::ldexp(1.0, -static_cast<int>(k_));
}

struct SeededStream::CipherState {
    EVP_CIPHER_CTX* ctx = nullptr;
    ~CipherState() {
        if (ctx) EVP_CIPHER_CTX_free(ctx);
    }
};

SeededStream::SeededStream(const Seed& seed) : seed_(seed), cipher_(std::make_unique<CipherState>()) {
    cipher_->ctx = EVP_CIPHER_CTX_new();
    std::array<std::uint8_t, 16> iv{}; // zero nonce; the key is never reused elsewhere
    if (!cipher_->ctx ||
        EVP_EncryptInit_ex(cipher_->ctx, EVP_chacha20(), nullptr, seed_.bytes.data(), iv.data()) != 1)
        throw std::runtime_error("ChaCha20 init failed");
}

SeededStream::SeededStream(SeededStream&&) noexcept = default;
SeededStream& SeededStream::operator=(SeededStream&&) noexcept = default;
SeededStream::~SeededStream() = default;

void SeededStream::refill() {
    static const std::array<std::uint8_t, sizeof(buf_)> kZeros{};
    int out_len = 0;
    if (EVP_EncryptUpdate(cipher_->ctx, reinterpret_cast<std::uint8_t*>(buf_.data()), &out_len,
                          kZeros.data(), static_cast<int>(kZeros.size())) != 1 ||
        out_len != static_cast<int>(kZeros.size()))
        throw std::runtime_error("ChaCha20 keystream failed");
    buf_pos_ = 0;
    buf_len_ = buf_.size();
}

std::uint64_t SeededStream::next_u64() {
    if (buf_pos_ == buf_len_) refill();
    ++counter_;
    return buf_[buf_pos_++];
}

void SeededStream::fill_words(std::span<std::uint64_t> out) {
    for (std::size_t done = 0; done < out.size();) {
        if (buf_pos_ == buf_len_) refill();
        const std::size_t n = std::min(out.size() - done, buf_len_ - buf_pos_);
        std::memcpy(out.data() + done, buf_.data() + buf_pos_, n * sizeof(std::uint64_t));
        buf_pos_ += n;
        done += n;
    }
    counter_ += out.size();
}

std::uint64_t SeededStream::uniform_below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_below(0)");
    if ((n & (n - 1)) == 0) return next_u64() & (n - 1);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    for (;;) {
        const std::uint64_t x = next_u64();
        if (x < limit) return x % n;
    }
}

BitVector SeededStream::uniform_vector(std::size_t len) {
    BitVector v(len);
    fill_words(v.words());
    v.clear_padding();
    return v;
}

BitMatrix SeededStream::uniform_matrix(std::size_t rows, std::size_t cols) {
    BitMatrix m(rows, cols);
    fill_words(m.all_words());
    m.clear_padding();
    return m;
}

BitVector SeededStream::bernoulli_vector(std::size_t len, NoiseRate eps) {
    BitVector v(len);
    if (eps.is_zero() || len == 0) return v;
    fill_words(v.words());
    std::vector<std::uint64_t> layer(v.word_count());
    for (unsigned j = 1; j < eps.log2_denominator(); ++j) {
        fill_words(layer);
        auto w = v.words();
        for (std::size_t i = 0; i < layer.size(); ++i) w[i] &= layer[i];
    }
    v.clear_padding();
    return v;
}

} // namespace hbtree
