#pragma once

#include <bit>
#include <cstdint>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hbtree {

// Packed GF(2) vector. Bit i lives in word i/64 at position i%64; bits past
// size() are always zero (canonical form), so operator== and weight() work
// directly on the packed words.
class BitVector {
public:
    BitVector() = default;
    explicit BitVector(std::size_t len) : len_(len), words_(word_count_for(len), 0) {}

    static std::size_t word_count_for(std::size_t bits) { return (bits + 63) / 64; }

    std::size_t size() const { return len_; }
    bool empty() const { return len_ == 0; }
    std::size_t word_count() const { return words_.size(); }

    bool get(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1u; }
    void set(std::size_t i, bool v) {
        const std::uint64_t mask = std::uint64_t{1} << (i % 64);
        if (v) words_[i / 64] |= mask; else words_[i / 64] &= ~mask;
    }

    std::span<const std::uint64_t> words() const { return words_; }
    std::span<std::uint64_t> words() { return words_; }

    // Zeroes any bits past size(); every mutating op that writes whole words
    // must call this before handing the vector back.
    void clear_padding() {
        if (len_ % 64 != 0 && !words_.empty())
            words_.back() &= (std::uint64_t{1} << (len_ % 64)) - 1;
    }

    bool padding_is_zero() const {
        if (len_ % 64 == 0 || words_.empty()) return true;
        return (words_.back() & ~((std::uint64_t{1} << (len_ % 64)) - 1)) == 0;
    }

    std::size_t weight() const {
        std::size_t w = 0;
        for (std::uint64_t x : words_) w += std::popcount(x);
        return w;
    }

    BitVector& operator^=(const BitVector& o);
    friend BitVector operator^(BitVector a, const BitVector& b) { a ^= b; return a; }
    bool operator==(const BitVector&) const = default;

    // "len:hex" with the packed words dumped byte-wise little-endian.
    std::string to_hex() const;
    static BitVector from_hex(std::string_view s);

private:
    std::size_t len_ = 0;
    std::vector<std::uint64_t> words_;
};

// XOR-fold of a&b followed by a single popcount gives the GF(2) inner product.
inline bool parity_and(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < a.size(); ++i) acc ^= a[i] & b[i];
    return std::popcount(acc) & 1u;
}

inline bool dot(const BitVector& a, const BitVector& b);
std::size_t hamming_distance(const BitVector& a, const BitVector& b);

// Row-major packed GF(2) matrix; each row starts on a word boundary so row
// spans can be handed straight to parity_and.
class BitMatrix {
public:
    BitMatrix() = default;
    BitMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), row_words_(BitVector::word_count_for(cols)),
          words_(rows * row_words_, 0) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t row_words() const { return row_words_; }

    std::span<const std::uint64_t> row(std::size_t i) const {
        return {words_.data() + i * row_words_, row_words_};
    }
    std::span<std::uint64_t> row(std::size_t i) {
        return {words_.data() + i * row_words_, row_words_};
    }
    std::span<std::uint64_t> all_words() { return words_; }
    std::span<const std::uint64_t> all_words() const { return words_; }

    bool get(std::size_t i, std::size_t j) const { return (row(i)[j / 64] >> (j % 64)) & 1u; }
    void set(std::size_t i, std::size_t j, bool v) {
        const std::uint64_t mask = std::uint64_t{1} << (j % 64);
        if (v) row(i)[j / 64] |= mask; else row(i)[j / 64] &= ~mask;
    }

    void clear_padding();
    BitVector row_vector(std::size_t i) const;
    void set_row(std::size_t i, const BitVector& v);

    bool operator==(const BitMatrix&) const = default;

    // "rows x cols:hex", rows concatenated.
    std::string to_hex() const;
    static BitMatrix from_hex(std::string_view s);

private:
    std::size_t rows_ = 0, cols_ = 0, row_words_ = 0;
    std::vector<std::uint64_t> words_;
};

// result[i] = <row_i, v> over GF(2).
BitVector mat_vec_mul(const BitMatrix& m, const BitVector& v);
// Same but using only the first row_limit rows (the traversal stage works on
// the top r_tr rows of the shared challenge).
BitVector mat_vec_mul_top(const BitMatrix& m, std::size_t row_limit, const BitVector& v);

BitMatrix transpose(const BitMatrix& m);
BitMatrix identity_matrix(std::size_t n);

inline bool dot(const BitVector& a, const BitVector& b) {
    return parity_and(a.words(), b.words());
}

} // namespace hbtree
