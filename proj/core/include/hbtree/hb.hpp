#pragma once

#include "hbtree/bitvec.hpp"
#include "hbtree/rng.hpp"
#include "hbtree/toeplitz.hpp"

namespace hbtree {

// Parallel HB+ secrets: x is k_x bits, y is k_y bits (only one of the two
// needs the long length).
struct HbPlusKeys {
    BitVector x;
    BitVector y;
};

// HB# swaps the types: secrets are r-column Toeplitz matrices, challenges are
// vectors.
struct HbSharpKeys {
    ToeplitzMatrix x_m; // k_x rows, r cols
    ToeplitzMatrix y_m; // k_y rows, r cols
};

struct VerifyResult {
    bool accepted = false;
    std::size_t distance = 0;
};

// z = A*x xor noise (parallel HB, all rounds at once).
BitVector hb_tag_respond(const BitMatrix& a_m, const BitVector& x, const BitVector& noise);

// z = A*x xor B*y xor noise.
BitVector hbplus_tag_respond(const BitMatrix& a_m, const BitMatrix& b_m,
                             const HbPlusKeys& keys, const BitVector& noise);

// z' = A*x xor B*y.
BitVector hbplus_reader_expected(const BitMatrix& a_m, const BitMatrix& b_m,
                                 const HbPlusKeys& keys);

// z = a*X xor b*Y xor noise.
BitVector hbsharp_tag_respond(const BitVector& a_v, const BitVector& b_v,
                              const HbSharpKeys& keys, const BitVector& noise);

// Accept iff hamming_distance(z, z_exp) <= tau; the distance always comes
// back for diagnostics (the simulator and the tree descent both want it).
VerifyResult verify_threshold(const BitVector& z, const BitVector& z_exp, std::size_t tau);

// Rejection-sample noise until its weight is <= tau (KS05 variant; opt-in,
// the plain sampler is the default everywhere).
BitVector sample_noise_checked(SeededStream& s, std::size_t r, NoiseRate eps, std::size_t tau);

} // namespace hbtree
