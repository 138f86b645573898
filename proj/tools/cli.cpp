#include "cli.hpp"

#include "hbtree/analysis.hpp"
#include "hbtree/report.hpp"
#include "hbtree/sim.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace hbtree::cli {

namespace {

using json = nlohmann::ordered_json;
using sim::format_double;

struct ParamFlags {
    double eps = 0.25;
    std::uint32_t k_x = 80, k_y = 256, r = 80, r_tr = 0, tau = 20, d = 2, s = 1;
    std::uint64_t beta = 1000;

    void attach(CLI::App* cmd) {
        cmd->add_option("--eps", eps, "noise rate (0 or an exact 2^-k)");
        cmd->add_option("--kx", k_x, "length of the x secrets");
        cmd->add_option("--ky", k_y, "length of the y secrets");
        cmd->add_option("--r", r, "authentication response length");
        cmd->add_option("--rtr", r_tr, "tree-traversal response length (default: r)");
        cmd->add_option("--tau", tau, "acceptance threshold");
        cmd->add_option("--d", d, "tree depth");
        cmd->add_option("--beta", beta, "branching factor");
        cmd->add_option("--s", s, "max protocol repetitions");
    }

    ProtocolParams to_params() const {
        ProtocolParams p;
        p.eps = NoiseRate::from_double(eps);
        p.k_x = k_x;
        p.k_y = k_y;
        p.r = r;
        p.r_tr = r_tr == 0 ? r : r_tr;
        p.tau = tau;
        p.d = d;
        p.beta = beta;
        p.s = s;
        p.validate();
        return p;
    }
};

void write_output(const std::string& body, const std::string& dest) {
    if (dest == "-" || dest.empty()) {
        std::cout << body;
        std::cout.flush();
        return;
    }
    std::ofstream out(dest, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file " + dest);
    out << body;
}

// analyze and plan share one wide-row table: the full parameter set followed
// by every closed-form prediction.
std::string analysis_table(const ProtocolParams& p, bool as_json) {
    using namespace hbtree::analysis;
    const Real eps = static_cast<Real>(p.eps.value());
    const Real frr_a = frr_auth(p.r, p.tau, eps);
    const Real far_a = far_auth(p.r, p.tau);
    const Real pfb = false_branch_general(p.r_tr, eps, p.beta);
    const Real frr1 = combined_frr(p.d, pfb, frr_a);
    const IteratedRates it = iterated_rates(frr1, far_a, p.s);
    const CostReport cost = cost_model(p);

    const std::pair<const char*, double> cols[] = {
        {"eps", p.eps.value()},
        {"d", static_cast<double>(p.d)},
        {"beta", static_cast<double>(p.beta)},
        {"k_x", static_cast<double>(p.k_x)},
        {"k_y", static_cast<double>(p.k_y)},
        {"r", static_cast<double>(p.r)},
        {"r_tr", static_cast<double>(p.r_tr)},
        {"tau", static_cast<double>(p.tau)},
        {"s", static_cast<double>(p.s)},
        {"frr_auth", static_cast<double>(frr_a)},
        {"far_auth", static_cast<double>(far_a)},
        {"p_false_branch", static_cast<double>(pfb)},
        {"frr_single", static_cast<double>(frr1)},
        {"frr_iterated", static_cast<double>(it.frr)},
        {"far_iterated", static_cast<double>(it.far)},
        {"expected_repeat_factor", static_cast<double>(it.expected_cost_factor)},
        {"reader_bitops", static_cast<double>(cost.reader_bitops)},
        {"tag_bitops", static_cast<double>(cost.tag_bitops)},
        {"comm_bits", static_cast<double>(cost.comm_bits)},
        {"tag_mem_bits", static_cast<double>(cost.tag_mem_bits)},
    };
    if (as_json) {
        json j;
        for (const auto& [name, value] : cols) j[name] = value;
        return j.dump(2) + "\n";
    }
    std::string header, row;
    for (const auto& [name, value] : cols) {
        if (!header.empty()) {
            header.push_back(',');
            row.push_back(',');
        }
        header += name;
        row += format_double(value);
    }
    return header + "\n" + row + "\n";
}

int run_analyze(const ParamFlags& flags, const std::string& format, const std::string& out) {
    write_output(analysis_table(flags.to_params(), format == "json"), out);
    return 0;
}

int run_plan(std::uint64_t n, double eps, std::uint32_t depth, double target_frr,
             double target_far, std::uint32_t s, const std::string& format,
             const std::string& out) {
    const auto res = analysis::plan_parameters(n, static_cast<analysis::Real>(target_frr),
                                               static_cast<analysis::Real>(target_far),
                                               static_cast<analysis::Real>(eps), depth, s);
    write_output(analysis_table(res.params, format == "json"), out);
    return 0;
}

int run_curve(const std::string& targets_csv, std::uint64_t beta_min, std::uint64_t beta_max,
              double eps, const std::string& format, const std::string& out) {
    std::vector<double> targets;
    std::stringstream ss{targets_csv};
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        targets.push_back(std::stod(tok));
    }
    if (targets.empty()) throw std::invalid_argument("curve: no targets given");

    if (format == "json") {
        json j = json::array();
        for (double target : targets) {
            const auto curve = analysis::response_length_curve(
                static_cast<analysis::Real>(target), beta_min, beta_max,
                static_cast<analysis::Real>(eps));
            for (const auto& pt : curve) {
                json row;
                row["target"] = target;
                row["beta"] = pt.beta;
                row["r"] = pt.r;
                j.push_back(std::move(row));
            }
        }
        write_output(j.dump(2) + "\n", out);
        return 0;
    }
    std::string body = "target,beta,r\n";
    for (double target : targets) {
        const auto curve = analysis::response_length_curve(static_cast<analysis::Real>(target),
                                                           beta_min, beta_max,
                                                           static_cast<analysis::Real>(eps));
        for (const auto& pt : curve) {
            body += format_double(target);
            body.push_back(',');
            body += std::to_string(pt.beta);
            body.push_back(',');
            body += std::to_string(pt.r);
            body.push_back('\n');
        }
    }
    write_output(body, out);
    return 0;
}

int run_sim(const std::string& config_path, const std::string& seed_hex, std::uint64_t trials,
            std::uint32_t workers, const std::string& format, const std::string& out) {
    sim::SimConfig cfg = sim::SimConfig::from_json_file(config_path);
    if (!seed_hex.empty()) cfg.root_seed = Seed::from_hex(seed_hex);
    if (trials != 0) cfg.trials = trials;
    if (workers != 0) cfg.workers = workers;
    cfg.validate();

    const sim::AggregateStats stats = sim::run_simulation(cfg);
    const sim::Report report = sim::make_report(stats);
    sim::emit_report(report, format == "json" ? sim::ReportFormat::kJson : sim::ReportFormat::kCsv,
                     out);
    if (stats.mean_wall_ns > 0.0)
        std::cerr << "# wall per trial: mean " << stats.mean_wall_ns / 1e3 << " us, stdev "
                  << stats.stdev_wall_ns / 1e3 << " us\n";
    return 0;
}

int run_trace(const ParamFlags& flags, const std::string& seed_hex, const std::string& out) {
    const ProtocolParams p = flags.to_params();
    const Seed root = seed_hex.empty() ? Seed{} : Seed::from_hex(seed_hex);
    SeededStream sys(derive_seed(root, "system"));
    TreeDirectory dir = TreeDirectory::setup_system(1, p, sys);
    SeededStream reg(derive_seed(root, "registration"));
    const TagCredential cred = dir.register_tag(0, reg);

    Transcript tr;
    const ProtocolOutcome outcome = run_protocol_once(dir, cred, derive_seed(root, "trial", 0), &tr);

    json j;
    j["seed"] = root.to_hex();
    j["true_leaf"] = cred.true_leaf;
    j["b"] = tr.traversal.b_m.to_hex();
    json zs = json::array();
    for (const auto& z : tr.traversal.z_levels) zs.push_back(z.to_hex());
    j["z_levels"] = std::move(zs);
    j["a"] = tr.a_m.to_hex();
    j["z"] = tr.z.to_hex();
    j["identified_leaf"] = tr.identified_leaf;
    j["distance"] = tr.distance;
    j["accepted"] = tr.accepted;
    j["repeats_used"] = outcome.repeats_used;
    write_output(j.dump(2) + "\n", out);
    return 0;
}

} // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"HB-family authentication protocols: analysis, planning and simulation"};
    app.require_subcommand(1);

    std::string format = "csv", out = "-", seed_hex, config_path, targets = "0.1,0.01";
    std::uint64_t n = 1000000, beta_min = 2, beta_max = 10000, trials = 0;
    double target_frr = 1e-4, target_far = 1e-8, curve_eps = 0.25, plan_eps = 0.25;
    std::uint32_t depth = 2, plan_s = 4, workers = 0;

    ParamFlags analyze_flags, trace_flags;

    auto* analyze = app.add_subcommand("analyze", "closed-form error rates and costs");
    analyze_flags.attach(analyze);
    analyze->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
    analyze->add_option("--out", out, "output path or - for stdout");

    auto* plan = app.add_subcommand("plan", "parameter planner for a population and targets");
    plan->add_option("--n", n, "population bound");
    plan->add_option("--eps", plan_eps, "noise rate");
    plan->add_option("--depth", depth, "tree depth");
    plan->add_option("--target-frr", target_frr);
    plan->add_option("--target-far", target_far);
    plan->add_option("--s", plan_s, "max repetitions");
    plan->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
    plan->add_option("--out", out);

    auto* curve = app.add_subcommand("curve", "branching factor vs response length curve");
    curve->add_option("--targets", targets, "comma-separated false-branch targets");
    curve->add_option("--beta-min", beta_min);
    curve->add_option("--beta-max", beta_max);
    curve->add_option("--eps", curve_eps);
    curve->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
    curve->add_option("--out", out);

    auto* simcmd = app.add_subcommand("sim", "seeded Monte Carlo experiment from a JSON config");
    simcmd->add_option("--config", config_path, "experiment JSON")->required();
    simcmd->add_option("--seed", seed_hex, "override root seed (64 hex chars)");
    simcmd->add_option("--trials", trials, "override trial count");
    simcmd->add_option("--workers", workers, "override worker count (0 = keep config)");
    simcmd->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
    simcmd->add_option("--out", out);

    auto* trace = app.add_subcommand("trace", "single-run transcript dump");
    trace_flags.attach(trace);
    trace->add_option("--seed", seed_hex);
    trace->add_option("--out", out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return 2;
    }

    try {
        if (*analyze) return run_analyze(analyze_flags, format, out);
        if (*plan) return run_plan(n, plan_eps, depth, target_frr, target_far, plan_s, format, out);
        if (*curve) return run_curve(targets, beta_min, beta_max, curve_eps, format, out);
        if (*simcmd) return run_sim(config_path, seed_hex, trials, workers, format, out);
        if (*trace) return run_trace(trace_flags, seed_hex, out);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

} // namespace hbtree::cli
