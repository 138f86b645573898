#include "hbtree/params.hpp"

#include <stdexcept>

namespace hbtree {

std::uint64_t ProtocolParams::capacity() const {
    constexpr std::uint64_t kMax = std::uint64_t{1} << 48;
    std::uint64_t cap = 1;
    for (std::uint32_t i = 0; i < d; ++i) {
        if (beta != 0 && cap > kMax / beta)
            throw std::invalid_argument("params: beta^d exceeds supported capacity");
        cap *= beta;
    }
    return cap;
}

void ProtocolParams::validate() const {
    if (!eps.is_zero() && !(eps.value() > 0.0 && eps.value() < 0.5))
        throw std::invalid_argument("params: eps must be in (0, 0.5) or zero-noise test mode");
    if (k_x == 0 || k_y == 0) throw std::invalid_argument("params: key lengths must be positive");
    if (r == 0) throw std::invalid_argument("params: r must be positive");
    if (tau > r) throw std::invalid_argument("params: tau must be <= r");
    if (r_tr == 0 || r_tr > r) throw std::invalid_argument("params: r_tr must be in [1, r]");
    if (beta < 2) throw std::invalid_argument("params: beta must be >= 2");
    if (d < 1) throw std::invalid_argument("params: d must be >= 1");
    if (s < 1) throw std::invalid_argument("params: s must be >= 1");
    capacity(); // range check
}

} // namespace hbtree
