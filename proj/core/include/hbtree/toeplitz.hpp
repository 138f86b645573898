#pragma once

#include "hbtree/bitvec.hpp"

namespace hbtree {

// Binary Toeplitz matrix stored as its diagonal seed: entry (i,j) equals
// diag_seed[i - j + cols - 1], so rows+cols-1 bits define the whole matrix.
class ToeplitzMatrix {
public:
    ToeplitzMatrix() = default;
    ToeplitzMatrix(std::size_t rows, std::size_t cols, BitVector diag_seed);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    const BitVector& diag_seed() const { return diag_; }

    bool get(std::size_t i, std::size_t j) const { return diag_.get(i - j + cols_ - 1); }

    BitMatrix expand() const;
    static ToeplitzMatrix compress(const BitMatrix& m);

private:
    std::size_t rows_ = 0, cols_ = 0;
    BitVector diag_;
};

// v^T * T for v of length rows(); result has length cols(). Column j is the
// inner product of v with the seed window starting at cols-1-j, extracted by
// word shifts, so the dense expansion is never materialized.
BitVector vec_mat_mul(const BitVector& v, const ToeplitzMatrix& m);

} // namespace hbtree
