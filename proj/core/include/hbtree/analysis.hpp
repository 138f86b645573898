#pragma once

#include "hbtree/params.hpp"

#include <cstdint>
#include <vector>

namespace hbtree::analysis {

// Extended precision: binomial tails down to 1e-9 at r=212 and pmf
// normalization at r=512 need more headroom than double term products give.
using Real = long double;

// P_t(i) = C(r,i) eps^i (1-eps)^(r-i): distance distribution of the true
// child's prediction vs a noisy response.
Real pt_pmf(std::uint32_t i, std::uint32_t r, Real eps);
// P_f(i) = C(r,i) / 2^r: distance distribution of a false child.
Real pf_pmf(std::uint32_t i, std::uint32_t r);

// FRR of the authentication stage: P[Bin(r, eps) > tau].
Real frr_auth(std::uint32_t r, std::uint32_t tau, Real eps);
// FAR of the authentication stage: P[Bin(r, 1/2) <= tau].
Real far_auth(std::uint32_t r, std::uint32_t tau);

// P[false child strictly closer], binary tree: sum_i P_t(i) * F_f(i-1).
Real false_branch_binary(std::uint32_t r, Real eps);

// General branching factor: sum_i P_t(i) * [1 - (1 - F_f(i-1))^E]. The
// printed exponent is beta; the true count of false siblings is beta-1
// (difference < 1.5% for beta >= 100).
enum class SiblingExponent { kBetaAsPrinted, kBetaMinusOne };
Real false_branch_general(std::uint32_t r, Real eps, std::uint64_t beta,
                          SiblingExponent exponent = SiblingExponent::kBetaAsPrinted);

// Gaussian approximation of the binary false-branch probability at eps=1/4:
// erfc(sqrt(r/14)) as printed; the statistically standard form carries an
// extra 1/2.
enum class TailConvention { kAsPrinted, kHalfErfc };
Real false_branch_normal_approx(std::uint32_t r, Real eps = 0.25L,
                                TailConvention convention = TailConvention::kAsPrinted);

// Moments of the weight difference Delta_ft at eps = 1/4: mean r/4, variance
// 7r/16 (true-child weight: mean r/4, var 3r/16; false: mean r/2, var r/4).
struct GaussianMoments {
    Real mu;
    Real sigma_sq;
};
GaussianMoments delta_ft_moments(std::uint32_t r);

// Linear union bound for the whole protocol: d*p_fb + frr_auth, clamped.
Real combined_frr(std::uint32_t d, Real p_fb, Real frr_a);

// Up-to-s repetition: FRR gamma^s, FAR s*delta, expected cost factor
// sum_{j<s} gamma^j (< 1/(1-gamma)).
struct IteratedRates {
    Real frr;
    Real far;
    Real expected_cost_factor;
};
IteratedRates iterated_rates(Real gamma, Real delta, std::uint32_t s);

// Single-run bit-operation/communication/memory model, compute and comm
// scaled by the expected repeat factor; memory is static.
struct CostReport {
    Real reader_bitops;
    Real tag_bitops;
    Real comm_bits;
    Real tag_mem_bits;
    Real expected_repeat_factor;
};
CostReport cost_model(const ProtocolParams& params);

// Smallest r with false_branch_general(r, eps, beta) <= target.
std::uint32_t min_response_length(std::uint64_t beta, Real target, Real eps);

struct CurvePoint {
    std::uint64_t beta;
    std::uint32_t r;
};
// (beta, min r) for every integer beta in [beta_min, beta_max].
std::vector<CurvePoint> response_length_curve(Real target, std::uint64_t beta_min,
                                              std::uint64_t beta_max, Real eps);

struct PlanResult {
    ProtocolParams params;
    Real p_false_branch;      // per level at r_tr
    Real frr_auth_single;
    Real far_single;
    Real frr_single;          // combined, one run
    Real predicted_frr;       // after s repeats
    Real predicted_far;
    CostReport cost;
};

// Parameter planner: beta = ceil(n^(1/d)); k_x = 80 and k_y per noise level
// (330 at eps=1/4, 440 at eps=1/8); minimal r whose max tau under the
// single-run FAR budget keeps frr_auth in the 0.05 class; minimal r_tr with
// d*p_fb within the traversal budget. Throws if the targets are infeasible
// within s repeats.
PlanResult plan_parameters(std::uint64_t n, Real target_frr, Real target_far, Real eps,
                           std::uint32_t d, std::uint32_t s = 4);

} // namespace hbtree::analysis
