#include "hbtree/bitvec.hpp"

#include <charconv>
#include <stdexcept>

namespace hbtree {

namespace {

void append_word_hex(std::string& out, std::uint64_t w) {
    static const char* digits = "0123456789abcdef";
    for (int byte = 0; byte < 8; ++byte) {
        const std::uint8_t b = static_cast<std::uint8_t>(w >> (8 * byte));
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xf]);
    }
}

int hex_nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw std::invalid_argument("bad hex digit");
}

std::vector<std::uint64_t> parse_word_hex(std::string_view s, std::size_t expect_words) {
    if (s.size() != expect_words * 16)
        throw std::invalid_argument("hex payload length mismatch");
    std::vector<std::uint64_t> words(expect_words, 0);
    for (std::size_t w = 0; w < expect_words; ++w) {
        std::uint64_t x = 0;
        for (int byte = 0; byte < 8; ++byte) {
            const int hi = hex_nibble(s[w * 16 + 2 * byte]);
            const int lo = hex_nibble(s[w * 16 + 2 * byte + 1]);
            x |= static_cast<std::uint64_t>((hi << 4) | lo) << (8 * byte);
        }
        words[w] = x;
    }
    return words;
}

std::size_t parse_size(std::string_view s) {
    std::size_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw std::invalid_argument("bad size field");
    return v;
}

} // namespace

BitVector& BitVector::operator^=(const BitVector& o) {
    if (len_ != o.len_) throw std::invalid_argument("BitVector xor: length mismatch");
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] ^= o.words_[i];
    return *this;
}

std::string BitVector::to_hex() const {
    std::string out = std::to_string(len_);
    out.push_back(':');
    for (std::uint64_t w : words_) append_word_hex(out, w);
    return out;
}

BitVector BitVector::from_hex(std::string_view s) {
    const auto colon = s.find(':');
    if (colon == std::string_view::npos) throw std::invalid_argument("missing ':'");
    BitVector v;
    v.len_ = parse_size(s.substr(0, colon));
    v.words_ = parse_word_hex(s.substr(colon + 1), word_count_for(v.len_));
    if (!v.padding_is_zero()) throw std::invalid_argument("nonzero padding bits");
    return v;
}

std::size_t hamming_distance(const BitVector& a, const BitVector& b) {
    if (a.size() != b.size()) throw std::invalid_argument("hamming_distance: length mismatch");
    std::size_t d = 0;
    auto wa = a.words(), wb = b.words();
    for (std::size_t i = 0; i < wa.size(); ++i) d += std::popcount(wa[i] ^ wb[i]);
    return d;
}

void BitMatrix::clear_padding() {
    if (cols_ % 64 == 0 || rows_ == 0) return;
    const std::uint64_t mask = (std::uint64_t{1} << (cols_ % 64)) - 1;
    for (std::size_t i = 0; i < rows_; ++i) row(i)[row_words_ - 1] &= mask;
}

BitVector BitMatrix::row_vector(std::size_t i) const {
    BitVector v(cols_);
    auto src = row(i);
    auto dst = v.words();
    for (std::size_t w = 0; w < row_words_; ++w) dst[w] = src[w];
    return v;
}

void BitMatrix::set_row(std::size_t i, const BitVector& v) {
    if (v.size() != cols_) throw std::invalid_argument("set_row: width mismatch");
    auto src = v.words();
    auto dst = row(i);
    for (std::size_t w = 0; w < row_words_; ++w) dst[w] = src[w];
}

std::string BitMatrix::to_hex() const {
    std::string out = std::to_string(rows_);
    out.push_back('x');
    out += std::to_string(cols_);
    out.push_back(':');
    for (std::uint64_t w : words_) append_word_hex(out, w);
    return out;
}

BitMatrix BitMatrix::from_hex(std::string_view s) {
    const auto x = s.find('x');
    const auto colon = s.find(':');
    if (x == std::string_view::npos || colon == std::string_view::npos || x > colon)
        throw std::invalid_argument("bad matrix header");
    BitMatrix m(parse_size(s.substr(0, x)), parse_size(s.substr(x + 1, colon - x - 1)));
    m.words_ = parse_word_hex(s.substr(colon + 1), m.rows_ * m.row_words_);
    BitMatrix check = m;
    check.clear_padding();
    if (!(check == m)) throw std::invalid_argument("nonzero padding bits");
    return m;
}

BitVector mat_vec_mul(const BitMatrix& m, const BitVector& v) {
    return mat_vec_mul_top(m, m.rows(), v);
}

BitVector mat_vec_mul_top(const BitMatrix& m, std::size_t row_limit, const BitVector& v) {
    if (m.cols() != v.size()) throw std::invalid_argument("mat_vec_mul: dimension mismatch");
    if (row_limit > m.rows()) throw std::invalid_argument("mat_vec_mul: row limit out of range");
    BitVector out(row_limit);
    auto vw = v.words();
    auto ow = out.words();
    for (std::size_t i = 0; i < row_limit; ++i)
        if (parity_and(m.row(i), vw)) ow[i / 64] |= std::uint64_t{1} << (i % 64);
    return out;
}

BitMatrix transpose(const BitMatrix& m) {
    BitMatrix t(m.cols(), m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (m.get(i, j)) t.set(j, i, true);
    return t;
}

BitMatrix identity_matrix(std::size_t n) {
    BitMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.set(i, i, true);
    return m;
}

} // namespace hbtree
