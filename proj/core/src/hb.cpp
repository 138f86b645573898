#include "hbtree/hb.hpp"

#include <stdexcept>

namespace hbtree {

BitVector hb_tag_respond(const BitMatrix& a_m, const BitVector& x, const BitVector& noise) {
    if (noise.size() != a_m.rows()) throw std::invalid_argument("hb: noise length != r");
    BitVector z = mat_vec_mul(a_m, x);
    z ^= noise;
    return z;
}

BitVector hbplus_tag_respond(const BitMatrix& a_m, const BitMatrix& b_m,
                             const HbPlusKeys& keys, const BitVector& noise) {
    if (a_m.rows() != b_m.rows()) throw std::invalid_argument("hbplus: challenge row counts differ");
    if (noise.size() != a_m.rows()) throw std::invalid_argument("hbplus: noise length != r");
    BitVector z = mat_vec_mul(a_m, keys.x);
    z ^= mat_vec_mul(b_m, keys.y);
    z ^= noise;
    return z;
}

BitVector hbplus_reader_expected(const BitMatrix& a_m, const BitMatrix& b_m,
                                 const HbPlusKeys& keys) {
    if (a_m.rows() != b_m.rows()) throw std::invalid_argument("hbplus: challenge row counts differ");
    BitVector z = mat_vec_mul(a_m, keys.x);
    z ^= mat_vec_mul(b_m, keys.y);
    return z;
}

BitVector hbsharp_tag_respond(const BitVector& a_v, const BitVector& b_v,
                              const HbSharpKeys& keys, const BitVector& noise) {
    if (keys.x_m.cols() != keys.y_m.cols())
        throw std::invalid_argument("hbsharp: secrets disagree on response length");
    if (noise.size() != keys.x_m.cols()) throw std::invalid_argument("hbsharp: noise length != r");
    BitVector z = vec_mat_mul(a_v, keys.x_m);
    z ^= vec_mat_mul(b_v, keys.y_m);
    z ^= noise;
    return z;
}

VerifyResult verify_threshold(const BitVector& z, const BitVector& z_exp, std::size_t tau) {
    const std::size_t dist = hamming_distance(z, z_exp);
    return {dist <= tau, dist};
}

BitVector sample_noise_checked(SeededStream& s, std::size_t r, NoiseRate eps, std::size_t tau) {
    for (;;) {
        BitVector v = s.bernoulli_vector(r, eps);
        if (v.weight() <= tau) return v;
    }
}

} // namespace hbtree
