#include "hbtree/sim.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <thread>

namespace hbtree::sim {

namespace {

using json = nlohmann::ordered_json;

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed,
                         const char* where) {
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* k : allowed)
            if (item.key() == k) { ok = true; break; }
        if (!ok)
            throw std::invalid_argument(std::string("config: unknown key '") + item.key() +
                                        "' in " + where);
    }
}

struct TrialAccumulator {
    std::uint64_t legit = 0, legit_rejects = 0;
    std::uint64_t impostors = 0, impostor_accepts = 0;
    std::uint64_t repeats = 0;
    LevelObservation levels;
    OpCounts ops;
    std::uint64_t verifications = 0;
    std::uint64_t prf_evals = 0;
    double wall_sum = 0.0, wall_sumsq = 0.0;
    std::uint64_t wall_n = 0;

    void add_wall(double ns) {
        wall_sum += ns;
        wall_sumsq += ns * ns;
        ++wall_n;
    }

    void merge(const TrialAccumulator& o) {
        legit += o.legit;
        legit_rejects += o.legit_rejects;
        impostors += o.impostors;
        impostor_accepts += o.impostor_accepts;
        repeats += o.repeats;
        levels += o.levels;
        ops += o.ops;
        verifications += o.verifications;
        prf_evals += o.prf_evals;
        wall_sum += o.wall_sum;
        wall_sumsq += o.wall_sumsq;
        wall_n += o.wall_n;
    }
};

// Runs body(trial_index, acc) over [0, trials) on cfg.workers threads with
// contiguous ranges; merging is order-insensitive so any worker count gives
// identical aggregates.
template <typename Body>
TrialAccumulator run_trials(const SimConfig& cfg, std::uint64_t trials, const Body& body) {
    const std::uint32_t workers = std::max<std::uint32_t>(1, cfg.workers);
    if (workers == 1 || trials < 2 * workers) {
        TrialAccumulator acc;
        for (std::uint64_t i = 0; i < trials; ++i) body(i, acc);
        return acc;
    }
    std::vector<TrialAccumulator> accs(workers);
    std::vector<std::thread> pool;
    const std::uint64_t per = (trials + workers - 1) / workers;
    for (std::uint32_t w = 0; w < workers; ++w) {
        const std::uint64_t lo = w * per;
        const std::uint64_t hi = std::min(trials, lo + per);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi, w] {
            for (std::uint64_t i = lo; i < hi; ++i) body(i, accs[w]);
        });
    }
    for (auto& t : pool) t.join();
    TrialAccumulator total;
    for (const auto& a : accs) total.merge(a);
    return total;
}

AggregateStats finish_stats(const SimConfig& cfg, const TrialAccumulator& acc) {
    AggregateStats st;
    st.config_id = cfg.config_id;
    st.trials = acc.legit + acc.impostors;
    st.legit_trials = acc.legit;
    st.impostor_trials = acc.impostors;
    st.frr_hat = wilson_interval(acc.legit_rejects, acc.legit);
    st.far_hat = wilson_interval(acc.impostor_accepts, acc.impostors);
    st.per_level_false_branch_hat =
        wilson_interval(acc.levels.strict_false_events, acc.levels.on_path_levels);
    st.departure_per_level_hat =
        wilson_interval(acc.levels.departures, acc.levels.on_path_levels);
    st.mean_repeats = st.trials ? static_cast<double>(acc.repeats) / st.trials : 0.0;
    st.total_ops = acc.ops;
    st.verifications = acc.verifications;
    st.prf_evals = acc.prf_evals;
    if (acc.wall_n) {
        st.mean_wall_ns = acc.wall_sum / acc.wall_n;
        const double var =
            std::max(0.0, acc.wall_sumsq / acc.wall_n - st.mean_wall_ns * st.mean_wall_ns);
        st.stdev_wall_ns = std::sqrt(var);
    }
    return st;
}

std::uint64_t impostor_count(const SimConfig& cfg) {
    return static_cast<std::uint64_t>(
        std::llround(cfg.impostor_fraction * static_cast<double>(cfg.trials)));
}

} // namespace

void SimConfig::validate() const {
    params.validate();
    if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
    if (n_tags < 1) throw std::invalid_argument("config: n_tags must be >= 1");
    if (impostor_fraction < 0.0 || impostor_fraction > 1.0)
        throw std::invalid_argument("config: impostor_fraction must be in [0,1]");
    if (workers < 1) throw std::invalid_argument("config: workers must be >= 1");
    if (baseline != Baseline::kExhaustiveHb && n_tags > params.capacity())
        throw std::invalid_argument("config: n_tags exceeds beta^d");
    if (experiment == Experiment::kPrivacy && n_tags < 2)
        throw std::invalid_argument("config: privacy game needs at least two tags");
}

SimConfig SimConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config: bad JSON: ") + e.what());
    }
    reject_unknown_keys(j,
                        {"config_id", "params", "n_tags", "trials", "impostor_fraction",
                         "q_sessions", "root_seed", "baseline", "experiment", "adversary",
                         "workers", "collect_level_stats"},
                        "top level");
    SimConfig cfg;
    try {
        if (j.contains("config_id")) cfg.config_id = j.at("config_id").get<std::string>();
        if (j.contains("params")) {
            const json& p = j.at("params");
            reject_unknown_keys(p, {"eps", "k_x", "k_y", "r", "r_tr", "tau", "d", "beta", "s"},
                                "params");
            if (p.contains("eps")) cfg.params.eps = NoiseRate::from_double(p.at("eps").get<double>());
            if (p.contains("k_x")) cfg.params.k_x = p.at("k_x").get<std::uint32_t>();
            if (p.contains("k_y")) cfg.params.k_y = p.at("k_y").get<std::uint32_t>();
            if (p.contains("r")) cfg.params.r = p.at("r").get<std::uint32_t>();
            cfg.params.r_tr = p.contains("r_tr") ? p.at("r_tr").get<std::uint32_t>() : cfg.params.r;
            if (p.contains("tau")) cfg.params.tau = p.at("tau").get<std::uint32_t>();
            if (p.contains("d")) cfg.params.d = p.at("d").get<std::uint32_t>();
            if (p.contains("beta")) cfg.params.beta = p.at("beta").get<std::uint64_t>();
            if (p.contains("s")) cfg.params.s = p.at("s").get<std::uint32_t>();
        }
        if (j.contains("n_tags")) cfg.n_tags = j.at("n_tags").get<std::uint64_t>();
        if (j.contains("trials")) cfg.trials = j.at("trials").get<std::uint64_t>();
        if (j.contains("impostor_fraction"))
            cfg.impostor_fraction = j.at("impostor_fraction").get<double>();
        if (j.contains("q_sessions")) cfg.q_sessions = j.at("q_sessions").get<std::uint32_t>();
        if (j.contains("root_seed")) cfg.root_seed = Seed::from_hex(j.at("root_seed").get<std::string>());
        if (j.contains("workers")) cfg.workers = j.at("workers").get<std::uint32_t>();
        if (j.contains("collect_level_stats"))
            cfg.collect_level_stats = j.at("collect_level_stats").get<bool>();
        if (j.contains("baseline")) {
            const std::string b = j.at("baseline").get<std::string>();
            if (b == "tree_hb") cfg.baseline = Baseline::kTreeHb;
            else if (b == "exhaustive_hb") cfg.baseline = Baseline::kExhaustiveHb;
            else if (b == "tree_prf") cfg.baseline = Baseline::kTreePrf;
            else throw std::invalid_argument("config: baseline must be tree_hb|exhaustive_hb|tree_prf");
        }
        if (j.contains("experiment")) {
            const std::string e = j.at("experiment").get<std::string>();
            if (e == "error_rates") cfg.experiment = Experiment::kErrorRates;
            else if (e == "privacy") cfg.experiment = Experiment::kPrivacy;
            else throw std::invalid_argument("config: experiment must be error_rates|privacy");
        }
        if (j.contains("adversary")) {
            const std::string a = j.at("adversary").get<std::string>();
            if (a == "random") cfg.adversary = Adversary::kRandomGuess;
            else if (a == "key_knowing") cfg.adversary = Adversary::kKeyKnowing;
            else throw std::invalid_argument("config: adversary must be random|key_knowing");
        }
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

SimConfig SimConfig::from_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_json_text(text);
}

std::string SimConfig::to_json_text() const {
    json p;
    p["eps"] = params.eps.value();
    p["k_x"] = params.k_x;
    p["k_y"] = params.k_y;
    p["r"] = params.r;
    p["r_tr"] = params.r_tr;
    p["tau"] = params.tau;
    p["d"] = params.d;
    p["beta"] = params.beta;
    p["s"] = params.s;
    json j;
    j["config_id"] = config_id;
    j["params"] = p;
    j["n_tags"] = n_tags;
    j["trials"] = trials;
    j["impostor_fraction"] = impostor_fraction;
    j["q_sessions"] = q_sessions;
    j["root_seed"] = root_seed.to_hex();
    j["baseline"] = baseline == Baseline::kTreeHb        ? "tree_hb"
                    : baseline == Baseline::kExhaustiveHb ? "exhaustive_hb"
                                                          : "tree_prf";
    j["experiment"] = experiment == Experiment::kErrorRates ? "error_rates" : "privacy";
    j["adversary"] = adversary == Adversary::kRandomGuess ? "random" : "key_knowing";
    j["workers"] = workers;
    j["collect_level_stats"] = collect_level_stats;
    return j.dump(2);
}

RateEstimate wilson_interval(std::uint64_t successes, std::uint64_t trials) {
    RateEstimate e;
    e.count = successes;
    e.trials = trials;
    if (trials == 0) {
        e.ci_hi = 1.0;
        return e;
    }
    const double z = 1.959963984540054; // 95%
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    e.estimate = p;
    e.ci_lo = std::max(0.0, center - half);
    e.ci_hi = std::min(1.0, center + half);
    return e;
}

AggregateStats simulate_tree_protocol(const SimConfig& cfg) {
    cfg.validate();
    SeededStream sys(derive_seed(cfg.root_seed, "system"));
    TreeDirectory dir = TreeDirectory::setup_system(cfg.n_tags, cfg.params, sys);
    SeededStream reg(derive_seed(cfg.root_seed, "registration"));
    std::vector<TagCredential> creds;
    creds.reserve(cfg.n_tags);
    for (std::uint64_t t = 0; t < cfg.n_tags; ++t) creds.push_back(dir.register_tag(t, reg));

    const std::uint64_t impostors = impostor_count(cfg);
    const auto acc = run_trials(cfg, cfg.trials, [&](std::uint64_t i, TrialAccumulator& a) {
        const Seed trial_seed = derive_seed(cfg.root_seed, "trial", i);
        TrialReport report;
        report.legitimate = i >= impostors;
        LevelObservation obs;
        const auto t0 = std::chrono::steady_clock::now();
        if (report.legitimate) {
            const TagCredential& cred = creds[i % cfg.n_tags];
            report.outcome = run_protocol_iterated(dir, cred, trial_seed,
                                                   cfg.collect_level_stats ? &obs : nullptr);
        } else {
            SeededStream keys(derive_seed(trial_seed, "keys"));
            const TagCredential cred = make_impostor_credential(cfg.params, keys);
            report.outcome = run_protocol_iterated(dir, cred, trial_seed);
        }
        const auto t1 = std::chrono::steady_clock::now();
        report.wall_nanos = std::chrono::duration<double, std::nano>(t1 - t0).count();
        if (report.legitimate) {
            // levels of the last run's descent that left the true path
            const auto true_path = dir.path_of_leaf(creds[i % cfg.n_tags].true_leaf);
            for (std::uint32_t level = 0; level < cfg.params.d; ++level)
                if (report.outcome.path[level] != true_path[level]) ++report.wrong_branch_levels;
        }

        if (report.legitimate) {
            a.legit += 1;
            a.legit_rejects += report.outcome.accepted ? 0 : 1;
            a.levels += obs;
        } else {
            a.impostors += 1;
            a.impostor_accepts += report.outcome.accepted ? 1 : 0;
        }
        a.repeats += report.outcome.repeats_used;
        a.ops += report.outcome.ops;
        a.add_wall(report.wall_nanos);
    });
    return finish_stats(cfg, acc);
}

AggregateStats simulate_exhaustive_search(const SimConfig& cfg) {
    cfg.validate();
    const ProtocolParams& p = cfg.params;
    // flat registry: one (x, y) pair per tag
    BitMatrix xs(cfg.n_tags, p.k_x), ys(cfg.n_tags, p.k_y);
    for (std::uint64_t t = 0; t < cfg.n_tags; ++t) {
        SeededStream s(derive_seed(cfg.root_seed, "es-tag", t));
        xs.set_row(t, s.uniform_vector(p.k_x));
        ys.set_row(t, s.uniform_vector(p.k_y));
    }

    const std::uint64_t impostors = impostor_count(cfg);
    const auto acc = run_trials(cfg, cfg.trials, [&](std::uint64_t i, TrialAccumulator& a) {
        const Seed trial_seed = derive_seed(cfg.root_seed, "trial", i);
        SeededStream tag(derive_seed(trial_seed, "tag"));
        SeededStream reader(derive_seed(trial_seed, "reader"));
        const bool impostor = i < impostors;
        const auto t0 = std::chrono::steady_clock::now();

        HbPlusKeys tag_keys;
        if (impostor) {
            tag_keys.x = tag.uniform_vector(p.k_x);
            tag_keys.y = tag.uniform_vector(p.k_y);
        } else {
            const std::uint64_t t = i % cfg.n_tags;
            tag_keys.x = xs.row_vector(t);
            tag_keys.y = ys.row_vector(t);
        }
        const BitMatrix b_m = tag.uniform_matrix(p.r, p.k_y);
        const BitMatrix a_m = reader.uniform_matrix(p.r, p.k_x);
        const BitVector noise = tag.bernoulli_vector(p.r, p.eps);
        const BitVector z = hbplus_tag_respond(a_m, b_m, tag_keys, noise);

        // check against every registered tag, no early exit: the cost model
        // under comparison charges all N verifications
        bool any_accept = false;
        const std::size_t zw = z.word_count();
        std::vector<std::uint64_t> zexp(zw);
        const auto zwords = z.words();
        for (std::uint64_t t = 0; t < cfg.n_tags; ++t) {
            std::fill(zexp.begin(), zexp.end(), 0);
            const auto xt = xs.row(t);
            const auto yt = ys.row(t);
            for (std::uint32_t i = 0; i < p.r; ++i) {
                const bool bit = parity_and(a_m.row(i), xt) ^ parity_and(b_m.row(i), yt);
                if (bit) zexp[i / 64] |= std::uint64_t{1} << (i % 64);
            }
            std::size_t dist = 0;
            for (std::size_t w = 0; w < zw; ++w) dist += std::popcount(zexp[w] ^ zwords[w]);
            if (dist <= p.tau) any_accept = true;
        }
        if (impostor) {
            a.impostors += 1;
            a.impostor_accepts += any_accept ? 1 : 0;
        } else {
            a.legit += 1;
            a.legit_rejects += any_accept ? 0 : 1;
        }
        a.repeats += 1;
        a.verifications += cfg.n_tags;
        a.ops.reader_matvec += 2 * cfg.n_tags;
        a.ops.tag_matvec += 2;
        a.ops.bits_sent += static_cast<std::uint64_t>(p.r) * p.k_y + p.r;
        a.ops.bits_received += static_cast<std::uint64_t>(p.r) * p.k_x;
        const auto t1 = std::chrono::steady_clock::now();
        a.add_wall(std::chrono::duration<double, std::nano>(t1 - t0).count());
    });
    return finish_stats(cfg, acc);
}

AggregateStats simulate_tree_prf_baseline(const SimConfig& cfg) {
    cfg.validate();
    const ProtocolParams& p = cfg.params;
    constexpr std::uint32_t kPrfBits = 128; // key and output size (AES-128 class)
    SeededStream sys(derive_seed(cfg.root_seed, "system"));
    std::array<std::uint64_t, 4> raw{};
    sys.fill_words(raw);
    Seed master;
    std::memcpy(master.bytes.data(), raw.data(), master.bytes.size());

    // Same tree shape as the HB scheme, but per-node 128-bit PRF keys.
    const std::uint64_t capacity = p.capacity();
    if (cfg.n_tags > capacity) throw std::invalid_argument("prf baseline: n_tags exceeds beta^d");

    auto node_prf_key = [&](std::span<const std::uint32_t> path) {
        std::string label = "prfnode";
        for (std::uint32_t idx : path) {
            label.push_back('/');
            label += std::to_string(idx);
        }
        return derive_seed(master, label);
    };
    auto prf_output = [&](const Seed& key, const std::array<std::uint8_t, 16>& nonce) {
        // HMAC-backed PRF, truncated to 128 bits
        const Seed out = derive_seed(
            key, std::string_view(reinterpret_cast<const char*>(nonce.data()), nonce.size()));
        std::array<std::uint8_t, 16> trunc{};
        std::copy(out.bytes.begin(), out.bytes.begin() + 16, trunc.begin());
        return trunc;
    };

    // leaf t <- tag t via shuffled assignment
    SeededStream reg(derive_seed(cfg.root_seed, "registration"));
    std::vector<std::uint64_t> leaves(capacity);
    for (std::uint64_t i = 0; i < capacity; ++i) leaves[i] = i;
    std::vector<std::uint64_t> leaf_of_tag(cfg.n_tags);
    for (std::uint64_t t = 0; t < cfg.n_tags; ++t) {
        const std::uint64_t pick = reg.uniform_below(leaves.size());
        leaf_of_tag[t] = leaves[pick];
        leaves[pick] = leaves.back();
        leaves.pop_back();
    }
    auto path_of_leaf = [&](std::uint64_t leaf) {
        std::vector<std::uint32_t> path(p.d);
        for (std::uint32_t level = p.d; level-- > 0;) {
            path[level] = static_cast<std::uint32_t>(leaf % p.beta);
            leaf /= p.beta;
        }
        return path;
    };

    const std::uint64_t impostors = impostor_count(cfg);
    const auto acc = run_trials(cfg, cfg.trials, [&](std::uint64_t i, TrialAccumulator& a) {
        const Seed trial_seed = derive_seed(cfg.root_seed, "trial", i);
        SeededStream tag(derive_seed(trial_seed, "tag"));
        SeededStream reader(derive_seed(trial_seed, "reader"));
        const bool impostor = i < impostors;
        const auto t0 = std::chrono::steady_clock::now();

        // reader broadcasts the nonce
        std::array<std::uint8_t, 16> nonce{};
        std::array<std::uint64_t, 2> nw{};
        reader.fill_words(nw);
        std::memcpy(nonce.data(), nw.data(), nonce.size());

        // tag's per-level outputs
        std::vector<std::array<std::uint8_t, 16>> outputs(p.d);
        if (impostor) {
            for (auto& o : outputs) {
                std::array<std::uint64_t, 2> w{};
                tag.fill_words(w);
                std::memcpy(o.data(), w.data(), o.size());
            }
        } else {
            const auto path = path_of_leaf(leaf_of_tag[i % cfg.n_tags]);
            for (std::uint32_t level = 1; level <= p.d; ++level)
                outputs[level - 1] =
                    prf_output(node_prf_key(std::span(path.data(), level)), nonce);
        }

        // reader: exact-equality match over all beta children per level
        std::vector<std::uint32_t> path;
        bool matched_all = true;
        for (std::uint32_t level = 0; level < p.d && matched_all; ++level) {
            bool found = false;
            std::uint32_t match = 0;
            path.push_back(0);
            for (std::uint64_t c = 0; c < p.beta; ++c) {
                path.back() = static_cast<std::uint32_t>(c);
                if (prf_output(node_prf_key(path), nonce) == outputs[level] && !found) {
                    found = true;
                    match = static_cast<std::uint32_t>(c);
                }
            }
            a.prf_evals += p.beta;
            if (found)
                path.back() = match;
            else
                matched_all = false;
        }

        if (impostor) {
            a.impostors += 1;
            a.impostor_accepts += matched_all ? 1 : 0;
        } else {
            a.legit += 1;
            a.legit_rejects += matched_all ? 0 : 1;
        }
        a.repeats += 1;
        a.ops.bits_sent += static_cast<std::uint64_t>(p.d) * kPrfBits;
        a.ops.bits_received += kPrfBits;
        const auto t1 = std::chrono::steady_clock::now();
        a.add_wall(std::chrono::duration<double, std::nano>(t1 - t0).count());
    });
    return finish_stats(cfg, acc);
}

PrivacyAdversary random_guess_adversary() {
    return [](const PrivacyContext&, std::span<const PrivacySession>, SeededStream& coin) {
        return static_cast<int>(coin.next_u64() & 1u);
    };
}

PrivacyAdversary key_knowing_adversary() {
    return [](const PrivacyContext& ctx, std::span<const PrivacySession> sessions,
              SeededStream&) {
        const ProtocolParams& p = *ctx.params;
        std::int64_t votes = 0; // >0 favours "two tags"
        for (const auto& s : sessions) {
            if (s.virtual_index != 1) continue;
            const TraversalMessage& msg = s.transcript.traversal;
            for (std::uint32_t level = 0; level < p.d; ++level) {
                const BitVector& k0 = ctx.candidate0->path_keys[level];
                const BitVector& k1 = ctx.candidate1->path_keys[level];
                if (k0 == k1) continue;
                const BitVector z0 = mat_vec_mul_top(msg.b_m, p.r_tr, k0);
                const BitVector z1 = mat_vec_mul_top(msg.b_m, p.r_tr, k1);
                const std::size_t d0 = hamming_distance(msg.z_levels[level], z0);
                const std::size_t d1 = hamming_distance(msg.z_levels[level], z1);
                if (d1 < d0) ++votes;
                if (d0 < d1) --votes;
            }
        }
        return votes > 0 ? 1 : 0;
    };
}

AggregateStats privacy_experiment(const SimConfig& cfg, const PrivacyAdversary& adversary) {
    cfg.validate();
    if (cfg.n_tags < 2) throw std::invalid_argument("privacy: need two distinct registered tags");
    SeededStream sys(derive_seed(cfg.root_seed, "system"));
    TreeDirectory dir = TreeDirectory::setup_system(cfg.n_tags, cfg.params, sys);
    SeededStream reg(derive_seed(cfg.root_seed, "registration"));
    std::vector<TagCredential> creds;
    for (std::uint64_t t = 0; t < cfg.n_tags; ++t) creds.push_back(dir.register_tag(t, reg));

    PrivacyContext ctx{&cfg.params, &creds[0], &creds[1]};

    AggregateStats st;
    st.config_id = cfg.config_id;
    st.trials = cfg.trials;
    if (cfg.q_sessions == 0) {
        // no transcripts: any strategy is right with probability exactly 1/2
        st.guess_correct = wilson_interval(0, 0);
        st.advantage = 0.0;
        return st;
    }

    const auto acc = run_trials(cfg, cfg.trials, [&](std::uint64_t g, TrialAccumulator& a) {
        const Seed game_seed = derive_seed(cfg.root_seed, "game", g);
        SeededStream coin_stream(derive_seed(game_seed, "coin"));
        const int coin = static_cast<int>(coin_stream.next_u64() & 1u);
        const TagCredential* right = coin ? &creds[1] : &creds[0];

        std::vector<PrivacySession> sessions;
        sessions.reserve(cfg.q_sessions);
        for (std::uint32_t j = 0; j < cfg.q_sessions; ++j) {
            PrivacySession s;
            s.virtual_index = j % 2;
            const TagCredential* who = s.virtual_index == 0 ? &creds[0] : right;
            run_protocol_once(dir, *who, derive_seed(game_seed, "session", j), &s.transcript);
            sessions.push_back(std::move(s));
        }
        SeededStream guess_stream(derive_seed(game_seed, "guess"));
        const int guess = adversary(ctx, sessions, guess_stream);
        a.legit += 1;
        a.legit_rejects += guess == coin ? 1 : 0; // reuse counter: correct guesses
    });

    st.guess_correct = wilson_interval(acc.legit_rejects, acc.legit);
    st.advantage = 2.0 * st.guess_correct.estimate - 1.0;
    st.advantage_ci_lo = 2.0 * st.guess_correct.ci_lo - 1.0;
    st.advantage_ci_hi = 2.0 * st.guess_correct.ci_hi - 1.0;
    return st;
}

AggregateStats run_simulation(const SimConfig& cfg) {
    if (cfg.experiment == SimConfig::Experiment::kPrivacy)
        return privacy_experiment(cfg, cfg.adversary == SimConfig::Adversary::kKeyKnowing
                                           ? key_knowing_adversary()
                                           : random_guess_adversary());
    switch (cfg.baseline) {
        case SimConfig::Baseline::kTreeHb: return simulate_tree_protocol(cfg);
        case SimConfig::Baseline::kExhaustiveHb: return simulate_exhaustive_search(cfg);
        case SimConfig::Baseline::kTreePrf: return simulate_tree_prf_baseline(cfg);
    }
    throw std::logic_error("unreachable");
}

} // namespace hbtree::sim
