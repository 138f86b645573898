#include <doctest.h>

#include "hbtree/analysis.hpp"

#include <cmath>

using namespace hbtree;
using namespace hbtree::analysis;

namespace {

// expected values frozen from a 30-digit arbitrary-precision evaluation of
// the same formulas, computed independently of this implementation
constexpr double kFrr212 = 0.0500275083785252;
constexpr double kFrr86 = 0.0363459168614474;
constexpr double kFrr80 = 0.440293675602503;
constexpr double kFrr96 = 0.355506690746998;
constexpr double kFar212 = 1.62404685967484e-9;
constexpr double kFar86 = 1.60319017554077e-9;
constexpr double kFar80 = 4.29027993352481e-6;
constexpr double kFar48_13 = 0.00104405366699822;
constexpr double kEq1_80 = 0.000314938959860094;
constexpr double kEq1_144 = 2.89369462220804e-6;
constexpr double kEq1_31 = 0.0134093200664122;
constexpr double kEq1_40 = 0.00658495709921116;
constexpr double kEq2_102_1000 = 0.0220407593331287;
constexpr double kEq2_83_100 = 0.0150133065443982;
constexpr double kEq2_40_1000 = 0.0153067469101767;
constexpr double kEq2_32_100 = 0.0108525556025803;
constexpr double kEq2_96_100 = 0.00647884072458967;
constexpr double kEq2_40_8 = 0.0400338261824385;
constexpr double kErfc80 = 0.000723232716430193;
constexpr double kErfc144 = 5.74471191915686e-6;

bool near_rel(Real got, double want, double rel) {
    return std::fabs(static_cast<double>(got) - want) <= rel * std::fabs(want);
}

} // namespace

TEST_CASE("pmf spot values") {
    CHECK(static_cast<double>(pt_pmf(1, 4, 0.25L)) == doctest::Approx(0.421875).epsilon(1e-14));
    CHECK(static_cast<double>(pt_pmf(2, 5, 0.25L)) == doctest::Approx(0.263671875).epsilon(1e-14));
    CHECK(static_cast<double>(pf_pmf(3, 7)) == doctest::Approx(0.2734375).epsilon(1e-14));
    CHECK(static_cast<double>(pf_pmf(0, 64)) ==
          doctest::Approx(std::ldexp(1.0, -64)).epsilon(1e-14));
    CHECK_THROWS_AS(pt_pmf(5, 4, 0.25L), std::invalid_argument);
    CHECK_THROWS_AS(pt_pmf(1, 4, 0.6L), std::invalid_argument);
}

TEST_CASE("pmfs are normalized up to r = 512") {
    for (std::uint32_t r : {1u, 7u, 64u, 212u, 512u}) {
        for (Real eps : {0.25L, 0.125L, 0.3L}) {
            Real sum = 0.0L;
            for (std::uint32_t i = 0; i <= r; ++i) sum += pt_pmf(i, r, eps);
            CHECK(std::fabs(static_cast<double>(sum) - 1.0) <= 1e-12);
        }
        Real sum = 0.0L;
        for (std::uint32_t i = 0; i <= r; ++i) sum += pf_pmf(i, r);
        CHECK(std::fabs(static_cast<double>(sum) - 1.0) <= 1e-12);
    }
}

TEST_CASE("authentication error rates match the frozen oracle") {
    CHECK(near_rel(frr_auth(212, 63, 0.25L), kFrr212, 1e-12));
    CHECK(near_rel(frr_auth(86, 16, 0.125L), kFrr86, 1e-12));
    CHECK(near_rel(frr_auth(80, 20, 0.25L), kFrr80, 1e-12));
    CHECK(near_rel(frr_auth(96, 25, 0.25L), kFrr96, 1e-12));
    CHECK(frr_auth(80, 80, 0.25L) == 0.0L);

    CHECK(near_rel(far_auth(212, 63), kFar212, 1e-12));
    CHECK(near_rel(far_auth(86, 16), kFar86, 1e-12));
    CHECK(near_rel(far_auth(80, 20), kFar80, 1e-12));
    CHECK(near_rel(far_auth(48, 13), kFar48_13, 1e-12));
    CHECK(std::fabs(static_cast<double>(far_auth(80, 80)) - 1.0) <= 1e-12);
}

TEST_CASE("binary false-branch values and ordering") {
    CHECK(near_rel(false_branch_binary(80, 0.25L), kEq1_80, 1e-12));
    CHECK(near_rel(false_branch_binary(144, 0.25L), kEq1_144, 1e-12));
    CHECK(near_rel(false_branch_binary(31, 0.25L), kEq1_31, 1e-12));
    CHECK(near_rel(false_branch_binary(40, 0.25L), kEq1_40, 1e-12));
    CHECK(false_branch_binary(0, 0.25L) == 0.0L);
    CHECK(false_branch_binary(144, 0.25L) < false_branch_binary(80, 0.25L));
}

TEST_CASE("general false-branch values match the frozen oracle") {
    CHECK(near_rel(false_branch_general(102, 0.25L, 1000), kEq2_102_1000, 1e-12));
    CHECK(near_rel(false_branch_general(83, 0.25L, 100), kEq2_83_100, 1e-12));
    CHECK(near_rel(false_branch_general(40, 0.125L, 1000), kEq2_40_1000, 1e-12));
    CHECK(near_rel(false_branch_general(32, 0.125L, 100), kEq2_32_100, 1e-12));
    CHECK(near_rel(false_branch_general(96, 0.25L, 100), kEq2_96_100, 1e-12));
    CHECK(near_rel(false_branch_general(40, 0.25L, 8), kEq2_40_8, 1e-12));
}

TEST_CASE("exponent 1 equals the binary formula exactly") {
    for (std::uint32_t r : {8u, 31u, 80u, 144u})
        CHECK(false_branch_general(r, 0.25L, 2, SiblingExponent::kBetaMinusOne) ==
              false_branch_binary(r, 0.25L));
}

TEST_CASE("false-branch monotone in r and beta") {
    for (std::uint32_t r = 20; r < 120; r += 10)
        CHECK(false_branch_general(r + 10, 0.25L, 100) < false_branch_general(r, 0.25L, 100));
    for (std::uint64_t beta : {2ull, 8ull, 64ull, 512ull})
        CHECK(false_branch_general(64, 0.25L, beta) < false_branch_general(64, 0.25L, beta * 2));
}

TEST_CASE("normal approximation printed values and conventions") {
    CHECK(near_rel(false_branch_normal_approx(80), kErfc80, 1e-12));
    CHECK(near_rel(false_branch_normal_approx(144), kErfc144, 1e-12));
    CHECK(false_branch_normal_approx(80, 0.25L, TailConvention::kHalfErfc) ==
          0.5L * false_branch_normal_approx(80));
    CHECK_THROWS_AS(false_branch_normal_approx(80, 0.125L), std::invalid_argument);

    // against the published reference values, with convention tolerance
    CHECK(near_rel(false_branch_normal_approx(80), 6.97e-4, 0.10));
    CHECK(near_rel(false_branch_normal_approx(144), 5.38e-6, 0.10));

    // same order of magnitude as the exact formula over the working range
    for (std::uint32_t r = 40; r <= 200; r += 16) {
        const Real ratio = false_branch_normal_approx(r) / false_branch_binary(r, 0.25L);
        CHECK(ratio > 1.0L);
        CHECK(ratio < 5.0L);
    }
}

TEST_CASE("delta moments") {
    const auto m = delta_ft_moments(80);
    CHECK(static_cast<double>(m.mu) == 20.0);
    CHECK(static_cast<double>(m.sigma_sq) == 35.0);
}

TEST_CASE("combined false-reject rate") {
    CHECK(near_rel(combined_frr(2, 0.025L, 0.038L), 0.088, 1e-12));
    CHECK(near_rel(combined_frr(2, 0.0353L, 0.361L), 0.4316, 1e-12));
    CHECK(near_rel(combined_frr(3, 0.0071L, 0.361L), 0.3823, 1e-12));
    CHECK(combined_frr(2, 0.0L, 0.25L) == 0.25L);
    CHECK(combined_frr(3, 0.5L, 0.9L) == 1.0L);
    CHECK_THROWS_AS(combined_frr(2, -0.1L, 0.5L), std::invalid_argument);
}

TEST_CASE("iterated rates") {
    const auto it = iterated_rates(0.088L, 1.62e-9L, 4);
    CHECK(near_rel(it.frr, 5.99695e-5, 1e-4));
    CHECK(near_rel(it.far, 4 * 1.62e-9, 1e-12));
    CHECK(near_rel(it.expected_cost_factor, 1.096425472, 1e-8));
    CHECK(it.expected_cost_factor < 1.0L / (1.0L - 0.088L));

    const auto one = iterated_rates(0.3L, 0.001L, 1);
    CHECK(one.frr == 0.3L);
    CHECK(one.far == 0.001L);
    CHECK(one.expected_cost_factor == 1.0L);
    CHECK_THROWS_AS(iterated_rates(1.0L, 0.0L, 2), std::invalid_argument);
}

TEST_CASE("cost model reproduces the planner table rows") {
    struct Row {
        double eps;
        std::uint32_t d;
        std::uint64_t beta;
        std::uint32_t ky, r, rtr, tau;
        double crdr, ctag, comm, mem;
    };
    // frozen from the independent oracle run of this exact pipeline
    const Row rows[] = {
        {0.25, 2, 1000, 330, 212, 102, 63, 74403692.0, 170249.96, 96167.385, 1070},
        {0.25, 3, 100, 330, 212, 83, 63, 9175536.4, 186838.44, 96318.646, 1400},
        {0.125, 2, 1000, 440, 86, 40, 16, 37773289.0, 85653.716, 48014.095, 1400},
        {0.125, 3, 100, 440, 86, 32, 16, 4584513.2, 93393.164, 48131.417, 1840},
    };
    for (const auto& row : rows) {
        ProtocolParams p;
        p.eps = NoiseRate::from_double(row.eps);
        p.k_x = 80;
        p.k_y = row.ky;
        p.r = row.r;
        p.r_tr = row.rtr;
        p.tau = row.tau;
        p.d = row.d;
        p.beta = row.beta;
        p.s = 4;
        const CostReport c = cost_model(p);
        CHECK(near_rel(c.reader_bitops, row.crdr, 1e-6));
        CHECK(near_rel(c.tag_bitops, row.ctag, 1e-6));
        CHECK(near_rel(c.comm_bits, row.comm, 1e-6));
        CHECK(static_cast<double>(c.tag_mem_bits) == row.mem);
        CHECK(c.expected_repeat_factor >= 1.0L);
        CHECK(c.expected_repeat_factor <= 4.0L);
    }
}

TEST_CASE("cost model degenerates to plain parallel HB+ at d = 0") {
    ProtocolParams p;
    p.eps = NoiseRate::from_double(0.25);
    p.k_x = 80;
    p.k_y = 256;
    p.r = 80;
    p.r_tr = 80;
    p.tau = 20;
    p.d = 0;
    p.beta = 2;
    p.s = 1;
    const CostReport c = cost_model(p);
    CHECK(static_cast<double>(c.tag_bitops) == (80.0 + 256.0) * 80.0);
    CHECK(static_cast<double>(c.reader_bitops) == (80.0 + 256.0) * 80.0);
    CHECK(static_cast<double>(c.comm_bits) == (80.0 + 256.0) * 80.0);
}

TEST_CASE("min response length search") {
    CHECK(min_response_length(1000, 0.1L, 0.25L) == 74);
    CHECK(min_response_length(1000, 1.0L, 0.25L) == 1);
    CHECK_THROWS_AS(min_response_length(1000, 0.0L, 0.25L), std::invalid_argument);

    // frozen curve samples, target 0.1 and 0.01
    CHECK(min_response_length(2, 0.1L, 0.25L) == 14);
    CHECK(min_response_length(10, 0.1L, 0.25L) == 30);
    CHECK(min_response_length(100, 0.1L, 0.25L) == 52);
    CHECK(min_response_length(10000, 0.1L, 0.25L) == 96);
    CHECK(min_response_length(2, 0.01L, 0.25L) == 43);
    CHECK(min_response_length(100, 0.01L, 0.25L) == 90);
    CHECK(min_response_length(1000, 0.01L, 0.25L) == 116);
    CHECK(min_response_length(10000, 0.01L, 0.25L) == 141);
}

TEST_CASE("response length curve is monotone and matches point queries") {
    const auto curve = response_length_curve(0.1L, 2, 300, 0.25L);
    REQUIRE(curve.size() == 299);
    for (std::size_t i = 1; i < curve.size(); ++i) CHECK(curve[i].r >= curve[i - 1].r);
    for (std::size_t i = 0; i < curve.size(); i += 37)
        CHECK(curve[i].r == min_response_length(curve[i].beta, 0.1L, 0.25L));
}

TEST_CASE("planner reproduces all four concrete parameter rows") {
    struct Want {
        double eps;
        std::uint32_t d;
        std::uint64_t beta;
        std::uint32_t ky, r, tau, rtr;
    };
    const Want rows[] = {
        {0.25, 2, 1000, 330, 212, 63, 102},
        {0.25, 3, 100, 330, 212, 63, 83},
        {0.125, 2, 1000, 440, 86, 16, 40},
        {0.125, 3, 100, 440, 86, 16, 32},
    };
    for (const auto& w : rows) {
        const PlanResult res =
            plan_parameters(1000000, 1e-4L, 1e-8L, static_cast<Real>(w.eps), w.d);
        CHECK(res.params.beta == w.beta);
        CHECK(res.params.k_x == 80);
        CHECK(res.params.k_y == w.ky);
        CHECK(res.params.r == w.r);
        CHECK(res.params.tau == w.tau);
        CHECK(res.params.r_tr == w.rtr);
        CHECK(res.params.s == 4);
        CHECK(res.predicted_frr <= 1e-4L);
        CHECK(res.predicted_far <= 1e-8L);
    }
}

TEST_CASE("planner closure: predictions reproduce from its own outputs") {
    const PlanResult res = plan_parameters(1000000, 1e-4L, 1e-8L, 0.25L, 2);
    const ProtocolParams& p = res.params;
    const Real eps = static_cast<Real>(p.eps.value());
    CHECK(res.frr_auth_single == frr_auth(p.r, p.tau, eps));
    CHECK(res.far_single == far_auth(p.r, p.tau));
    CHECK(res.p_false_branch == false_branch_general(p.r_tr, eps, p.beta));
    CHECK(res.frr_single == combined_frr(p.d, res.p_false_branch, res.frr_auth_single));
    const auto it = iterated_rates(res.frr_single, res.far_single, p.s);
    CHECK(res.predicted_frr == it.frr);
    CHECK(res.predicted_far == it.far);
    CHECK(res.cost.expected_repeat_factor == it.expected_cost_factor);
}

TEST_CASE("planner structural cases") {
    // n = 4, d = 2 degenerates to the binary tree
    const PlanResult res = plan_parameters(4, 0.01L, 1e-7L, 0.25L, 2);
    CHECK(res.params.beta == 2);
    CHECK(res.params.d == 2);

    // infeasible targets throw
    CHECK_THROWS_AS(plan_parameters(1000000, 1e-30L, 1e-8L, 0.25L, 2, 1), std::invalid_argument);
    CHECK_THROWS_AS(plan_parameters(1000000, 1e-4L, 1e-8L, 0.3L, 2), std::invalid_argument);
}

TEST_CASE("beta derivation is the integer d-th root ceiling") {
    CHECK(plan_parameters(1000000, 1e-4L, 1e-8L, 0.25L, 2).params.beta == 1000);
    CHECK(plan_parameters(1000000, 1e-4L, 1e-8L, 0.25L, 3).params.beta == 100);
    CHECK(plan_parameters(999, 1e-4L, 1e-8L, 0.25L, 2).params.beta == 32);
    CHECK(plan_parameters(1025, 1e-4L, 1e-8L, 0.25L, 2).params.beta == 33);
}
