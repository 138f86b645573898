#pragma once

#include "hbtree/tree.hpp"

#include <functional>
#include <optional>
#include <string>

namespace hbtree::sim {

// One Monte Carlo experiment. JSON configs map onto this 1:1; unknown keys
// are rejected so sweep automation fails fast.
struct SimConfig {
    enum class Baseline { kTreeHb, kExhaustiveHb, kTreePrf };
    enum class Experiment { kErrorRates, kPrivacy };
    enum class Adversary { kRandomGuess, kKeyKnowing };

    std::string config_id = "experiment";
    ProtocolParams params;
    std::uint64_t n_tags = 1;
    std::uint64_t trials = 1000;
    double impostor_fraction = 0.0;
    std::uint32_t q_sessions = 2;
    Seed root_seed;
    Baseline baseline = Baseline::kTreeHb;
    Experiment experiment = Experiment::kErrorRates;
    Adversary adversary = Adversary::kRandomGuess;
    std::uint32_t workers = 1;
    bool collect_level_stats = true;

    void validate() const;
    static SimConfig from_json_text(const std::string& text);
    static SimConfig from_json_file(const std::string& path);
    std::string to_json_text() const;
};

// One protocol execution as the aggregator sees it.
struct TrialReport {
    ProtocolOutcome outcome;
    bool legitimate = true;
    std::uint32_t wrong_branch_levels = 0; // <= params.d
    double wall_nanos = 0.0;
};

struct RateEstimate {
    double estimate = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    std::uint64_t count = 0;
    std::uint64_t trials = 0;
};

// 95% Wilson score interval; behaves at rare-event rates where the normal
// interval collapses.
RateEstimate wilson_interval(std::uint64_t successes, std::uint64_t trials);

struct AggregateStats {
    std::string config_id;
    std::uint64_t trials = 0;
    std::uint64_t legit_trials = 0;
    std::uint64_t impostor_trials = 0;

    RateEstimate frr_hat;
    RateEstimate far_hat;
    RateEstimate per_level_false_branch_hat; // strict-closer events / on-path levels
    RateEstimate departure_per_level_hat;    // realized wrong branches incl. tie-breaks
    double mean_repeats = 0.0;

    // privacy game
    RateEstimate guess_correct;
    double advantage = 0.0;
    double advantage_ci_lo = 0.0;
    double advantage_ci_hi = 0.0;

    OpCounts total_ops;
    std::uint64_t verifications = 0; // exhaustive search: N per trial
    std::uint64_t prf_evals = 0;     // PRF baseline: reader evaluations

    // wall-clock diagnostics; never part of emitted reports (reports must be
    // byte-identical across reruns and worker counts)
    double mean_wall_ns = 0.0;
    double stdev_wall_ns = 0.0;
};

AggregateStats simulate_tree_protocol(const SimConfig& cfg);
AggregateStats simulate_exhaustive_search(const SimConfig& cfg);
AggregateStats simulate_tree_prf_baseline(const SimConfig& cfg);

// Privacy game: coin b, sessions alternate between two virtual tags that are
// (t0, t1) on heads and (t0, t0) on tails; the adversary sees which virtual
// tag produced each transcript and guesses the coin.
struct PrivacySession {
    std::uint32_t virtual_index = 0; // 0 = left, 1 = right
    Transcript transcript;
};

struct PrivacyContext {
    const ProtocolParams* params = nullptr;
    const TagCredential* candidate0 = nullptr;
    const TagCredential* candidate1 = nullptr;
};

// Returns the guessed coin (0 = tails/same tag, 1 = heads/two tags).
using PrivacyAdversary = std::function<int(const PrivacyContext&,
                                           std::span<const PrivacySession>,
                                           SeededStream& coin_stream)>;

PrivacyAdversary random_guess_adversary();
// Distance-tests each right-hand transcript against both candidate key sets.
// A sanity upper bound on leakage, not a security claim.
PrivacyAdversary key_knowing_adversary();

AggregateStats privacy_experiment(const SimConfig& cfg, const PrivacyAdversary& adversary);

// Dispatch on cfg.experiment / cfg.baseline.
AggregateStats run_simulation(const SimConfig& cfg);

} // namespace hbtree::sim
