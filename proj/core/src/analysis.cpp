#include "hbtree/analysis.hpp"

#include <cmath>
#include <stdexcept>

namespace hbtree::analysis {

namespace {

constexpr std::uint32_t kMaxR = 1 << 16;

void check_r(std::uint32_t r) {
    if (r == 0 || r > kMaxR) throw std::invalid_argument("analysis: r out of range");
}

void check_eps(Real eps) {
    if (!(eps > 0.0L) || !(eps < 0.5L))
        throw std::invalid_argument("analysis: eps must be in (0, 0.5)");
}

// pmf rows by multiplicative recurrence; long double has enough exponent
// range that even 2^-4096 starting points stay normal.
std::vector<Real> pt_row(std::uint32_t r, Real eps) {
    std::vector<Real> row(r + 1);
    row[0] = std::pow(1.0L - eps, static_cast<Real>(r));
    const Real ratio = eps / (1.0L - eps);
    for (std::uint32_t i = 0; i < r; ++i)
        row[i + 1] = row[i] * ratio * static_cast<Real>(r - i) / static_cast<Real>(i + 1);
    return row;
}

std::vector<Real> pf_row(std::uint32_t r) {
    std::vector<Real> row(r + 1);
    row[0] = std::exp2(-static_cast<Real>(r));
    for (std::uint32_t i = 0; i < r; ++i)
        row[i + 1] = row[i] * static_cast<Real>(r - i) / static_cast<Real>(i + 1);
    return row;
}

// Neumaier-compensated sum; the tails we report live 9 orders of magnitude
// below the discarded mass.
Real compensated_sum(const std::vector<Real>& v, std::size_t from, std::size_t to) {
    Real sum = 0.0L, comp = 0.0L;
    for (std::size_t i = from; i < to; ++i) {
        const Real t = sum + v[i];
        if (std::fabs(sum) >= std::fabs(v[i]))
            comp += (sum - t) + v[i];
        else
            comp += (v[i] - t) + sum;
        sum = t;
    }
    return sum + comp;
}

} // namespace

Real pt_pmf(std::uint32_t i, std::uint32_t r, Real eps) {
    check_r(r);
    check_eps(eps);
    if (i > r) throw std::invalid_argument("analysis: i > r");
    return pt_row(r, eps)[i];
}

Real pf_pmf(std::uint32_t i, std::uint32_t r) {
    check_r(r);
    if (i > r) throw std::invalid_argument("analysis: i > r");
    return pf_row(r)[i];
}

Real frr_auth(std::uint32_t r, std::uint32_t tau, Real eps) {
    check_r(r);
    check_eps(eps);
    if (tau > r) throw std::invalid_argument("analysis: tau > r");
    const auto row = pt_row(r, eps);
    return compensated_sum(row, tau + 1, r + 1);
}

Real far_auth(std::uint32_t r, std::uint32_t tau) {
    check_r(r);
    if (tau > r) throw std::invalid_argument("analysis: tau > r");
    const auto row = pf_row(r);
    return compensated_sum(row, 0, tau + 1);
}

Real false_branch_binary(std::uint32_t r, Real eps) {
    if (r == 0) return 0.0L;
    return false_branch_general(r, eps, 2, SiblingExponent::kBetaMinusOne);
}

Real false_branch_general(std::uint32_t r, Real eps, std::uint64_t beta,
                          SiblingExponent exponent) {
    if (r == 0) return 0.0L;
    check_r(r);
    check_eps(eps);
    if (beta < 2) throw std::invalid_argument("analysis: beta must be >= 2");
    const Real e = exponent == SiblingExponent::kBetaAsPrinted ? static_cast<Real>(beta)
                                                               : static_cast<Real>(beta - 1);
    const auto pt = pt_row(r, eps);
    const auto pf = pf_row(r);

    Real acc = 0.0L, comp = 0.0L;
    Real cum = pf[0]; // F_f(i-1)
    for (std::uint32_t i = 1; i <= r; ++i) {
        const Real c = cum < 1.0L ? cum : 1.0L;
        // 1 - (1 - c)^e without cancellation for tiny c
        const Real loser = c >= 1.0L ? 1.0L : -std::expm1(e * std::log1p(-c));
        const Real term = pt[i] * loser;
        const Real t = acc + term;
        if (std::fabs(acc) >= std::fabs(term))
            comp += (acc - t) + term;
        else
            comp += (term - t) + acc;
        acc = t;
        cum += pf[i];
    }
    return acc + comp;
}

Real false_branch_normal_approx(std::uint32_t r, Real eps, TailConvention convention) {
    check_r(r);
    if (eps != 0.25L)
        throw std::invalid_argument("normal approximation is derived for eps = 1/4 only");
    const Real v = std::erfc(std::sqrt(static_cast<Real>(r) / 14.0L));
    return convention == TailConvention::kAsPrinted ? v : 0.5L * v;
}

GaussianMoments delta_ft_moments(std::uint32_t r) {
    check_r(r);
    return {static_cast<Real>(r) / 4.0L, 7.0L * static_cast<Real>(r) / 16.0L};
}

Real combined_frr(std::uint32_t d, Real p_fb, Real frr_a) {
    if (p_fb < 0.0L || p_fb > 1.0L || frr_a < 0.0L || frr_a > 1.0L)
        throw std::invalid_argument("combined_frr: inputs must be probabilities");
    const Real v = static_cast<Real>(d) * p_fb + frr_a;
    return v > 1.0L ? 1.0L : v;
}

IteratedRates iterated_rates(Real gamma, Real delta, std::uint32_t s) {
    if (!(gamma >= 0.0L) || gamma >= 1.0L)
        throw std::invalid_argument("iterated_rates: gamma must be in [0, 1)");
    if (s < 1) throw std::invalid_argument("iterated_rates: s must be >= 1");
    IteratedRates out;
    out.frr = std::pow(gamma, static_cast<Real>(s));
    out.far = static_cast<Real>(s) * delta;
    out.expected_cost_factor = 0.0L;
    Real g = 1.0L;
    for (std::uint32_t j = 0; j < s; ++j) {
        out.expected_cost_factor += g;
        g *= gamma;
    }
    return out;
}

CostReport cost_model(const ProtocolParams& params) {
    const Real eps = static_cast<Real>(params.eps.value());
    const Real kx = params.k_x, ky = params.k_y, r = params.r, rtr = params.r_tr;
    const Real d = params.d;
    const Real beta = static_cast<Real>(params.beta);

    const Real p_fb =
        params.d == 0 ? 0.0L : false_branch_general(params.r_tr, eps, params.beta);
    const Real frr_a = frr_auth(params.r, params.tau, eps);
    const Real gamma = combined_frr(params.d, p_fb, frr_a);
    const Real factor = iterated_rates(gamma, 0.0L, params.s).expected_cost_factor;

    CostReport rep;
    rep.expected_repeat_factor = factor;
    rep.tag_bitops = (d * ky * rtr + (kx + ky) * r) * factor;
    rep.reader_bitops = (beta * d * ky * rtr + (kx + ky) * r) * factor;
    rep.comm_bits = (r * (kx + ky) + rtr * d) * factor;
    rep.tag_mem_bits = kx + (d + 1.0L) * ky;
    return rep;
}

std::uint32_t min_response_length(std::uint64_t beta, Real target, Real eps) {
    if (!(target > 0.0L) || target > 1.0L)
        throw std::invalid_argument("min_response_length: target must be in (0, 1]");
    for (std::uint32_t r = 1; r <= kMaxR; ++r)
        if (false_branch_general(r, eps, beta) <= target) return r;
    throw std::runtime_error("min_response_length: no r found");
}

std::vector<CurvePoint> response_length_curve(Real target, std::uint64_t beta_min,
                                              std::uint64_t beta_max, Real eps) {
    if (beta_min < 2 || beta_max < beta_min)
        throw std::invalid_argument("response_length_curve: bad beta range");
    std::vector<CurvePoint> out;
    out.reserve(beta_max - beta_min + 1);
    std::uint32_t r = 1; // the curve is nondecreasing in beta, warm-start
    for (std::uint64_t beta = beta_min; beta <= beta_max; ++beta) {
        while (false_branch_general(r, eps, beta) > target) ++r;
        out.push_back({beta, r});
    }
    return out;
}

PlanResult plan_parameters(std::uint64_t n, Real target_frr, Real target_far, Real eps,
                           std::uint32_t d, std::uint32_t s) {
    check_eps(eps);
    if (n < 1) throw std::invalid_argument("plan: population must be positive");
    if (d < 1) throw std::invalid_argument("plan: d must be >= 1");
    if (s < 1) throw std::invalid_argument("plan: s must be >= 1");
    if (!(target_frr > 0.0L) || !(target_far > 0.0L))
        throw std::invalid_argument("plan: targets must be positive");

    ProtocolParams p;
    p.d = d;
    p.s = s;
    // smallest beta with beta^d >= n
    std::uint64_t beta = 2;
    while (true) {
        Real cap = 1.0L;
        for (std::uint32_t i = 0; i < d; ++i) cap *= static_cast<Real>(beta);
        if (cap >= static_cast<Real>(n)) break;
        ++beta;
    }
    p.beta = beta < 2 ? 2 : beta;

    p.k_x = 80;
    if (eps == 0.25L)
        p.k_y = 330;
    else if (eps == 0.125L)
        p.k_y = 440;
    else
        throw std::invalid_argument("plan: key sizing is tabulated for eps in {1/8, 1/4} only");
    p.eps = NoiseRate::from_double(static_cast<double>(eps));

    // Single-run budgets. The FAR budget takes a 0.8 safety factor off the
    // even split target_far/s; the auth FRR must stay in the 0.05 class so
    // that s repeats push the combined rate past target_frr.
    const Real far_budget = 0.8L * target_far / static_cast<Real>(s);
    const Real frr_class = 0.0503L;

    bool found = false;
    for (std::uint32_t r = 1; r <= 512 && !found; ++r) {
        // max tau under the FAR budget
        const auto pf = pf_row(r);
        Real cum = 0.0L;
        std::int64_t tau = -1;
        for (std::uint32_t i = 0; i <= r; ++i) {
            if (cum + pf[i] > far_budget) break;
            cum += pf[i];
            tau = i;
        }
        if (tau < 0) continue;
        const Real fr = frr_auth(r, static_cast<std::uint32_t>(tau), eps);
        if (fr <= frr_class) {
            p.r = r;
            p.tau = static_cast<std::uint32_t>(tau);
            found = true;
        }
    }
    if (!found) throw std::invalid_argument("plan: no (r, tau) meets the single-run budgets");

    const Real frr_a = frr_auth(p.r, p.tau, eps);
    const Real far_1 = far_auth(p.r, p.tau);

    // Smallest traversal length with d*p_fb inside the traversal budget
    // (0.92 * frr_auth pins the "d * Pr[false branch] roughly FRR(auth)" rule).
    const Real traversal_budget = 0.92L * frr_a;
    std::uint32_t rtr = 1;
    while (static_cast<Real>(d) * false_branch_general(rtr, eps, p.beta) > traversal_budget) {
        if (++rtr > p.r) throw std::invalid_argument("plan: traversal budget unreachable");
    }
    p.r_tr = rtr;

    PlanResult res;
    res.p_false_branch = false_branch_general(rtr, eps, p.beta);
    res.frr_auth_single = frr_a;
    res.far_single = far_1;
    res.frr_single = combined_frr(d, res.p_false_branch, frr_a);
    const IteratedRates it = iterated_rates(res.frr_single, far_1, s);
    res.predicted_frr = it.frr;
    res.predicted_far = it.far;
    if (res.predicted_frr > target_frr || res.predicted_far > target_far)
        throw std::invalid_argument("plan: targets infeasible within s repeats");
    res.params = p;
    res.cost = cost_model(p);
    return res;
}

} // namespace hbtree::analysis
