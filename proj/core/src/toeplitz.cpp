#include "hbtree/toeplitz.hpp"

#include <stdexcept>

namespace hbtree {

ToeplitzMatrix::ToeplitzMatrix(std::size_t rows, std::size_t cols, BitVector diag_seed)
    : rows_(rows), cols_(cols), diag_(std::move(diag_seed)) {
    if (rows == 0 || cols == 0) {
        if (diag_.size() != 0) throw std::invalid_argument("toeplitz: empty dims need empty seed");
        return;
    }
    if (diag_.size() != rows + cols - 1)
        throw std::invalid_argument("toeplitz: diag seed must have rows+cols-1 bits");
}

BitMatrix ToeplitzMatrix::expand() const {
    BitMatrix m(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            if (get(i, j)) m.set(i, j, true);
    return m;
}

ToeplitzMatrix ToeplitzMatrix::compress(const BitMatrix& m) {
    if (m.rows() == 0 || m.cols() == 0) return ToeplitzMatrix(m.rows(), m.cols(), BitVector());
    BitVector seed(m.rows() + m.cols() - 1);
    // seed index k = i - j + cols - 1; first row covers k <= cols-1, first
    // column the rest.
    for (std::size_t j = 0; j < m.cols(); ++j) seed.set(m.cols() - 1 - j, m.get(0, j));
    for (std::size_t i = 1; i < m.rows(); ++i) seed.set(i + m.cols() - 1, m.get(i, 0));
    ToeplitzMatrix t(m.rows(), m.cols(), seed);
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (t.get(i, j) != m.get(i, j))
                throw std::invalid_argument("compress: matrix is not Toeplitz");
    return t;
}

BitVector vec_mat_mul(const BitVector& v, const ToeplitzMatrix& m) {
    if (v.size() != m.rows()) throw std::invalid_argument("vec_mat_mul: dimension mismatch");
    BitVector out(m.cols());
    if (m.rows() == 0 || m.cols() == 0) return out;

    const auto vw = v.words();
    const auto sw = m.diag_seed().words();
    const std::size_t nw = vw.size();
    auto ow = out.words();

    for (std::size_t j = 0; j < m.cols(); ++j) {
        const std::size_t offset = m.cols() - 1 - j;
        const std::size_t base = offset / 64;
        const unsigned sh = offset % 64;
        std::uint64_t acc = 0;
        for (std::size_t w = 0; w < nw; ++w) {
            std::uint64_t win = sw[base + w] >> sh;
            if (sh != 0 && base + w + 1 < sw.size()) win |= sw[base + w + 1] << (64 - sh);
            // v's zero padding masks any seed bits past the window end
            acc ^= vw[w] & win;
        }
        if (std::popcount(acc) & 1u) ow[j / 64] |= std::uint64_t{1} << (j % 64);
    }
    return out;
}

} // namespace hbtree
