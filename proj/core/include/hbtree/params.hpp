#pragma once

#include "hbtree/rng.hpp"

#include <cstdint>

namespace hbtree {

// Every symbol of the protocol's parameter table plus the traversal response
// length and the repeat bound: eps, k_x, k_y, r, r_tr, tau, d, beta, s.
struct ProtocolParams {
    NoiseRate eps = NoiseRate::from_double(0.25);
    std::uint32_t k_x = 80;
    std::uint32_t k_y = 256;
    std::uint32_t r = 80;     // authentication response length
    std::uint32_t r_tr = 80;  // tree-traversal response length
    std::uint32_t tau = 20;
    std::uint32_t d = 2;      // tree depth (0 only valid for the cost model)
    std::uint64_t beta = 2;   // branching factor
    std::uint32_t s = 1;      // max protocol repetitions

    // beta^d, throwing if it would not fit a sane population bound.
    std::uint64_t capacity() const;

    // Enforces the protocol invariants (throws std::invalid_argument).
    // eps = 0 is tolerated as zero-noise test mode.
    void validate() const;

    bool operator==(const ProtocolParams&) const = default;
};

} // namespace hbtree
