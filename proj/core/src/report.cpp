#include "hbtree/report.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <fstream>
#include <iostream>
#include <stdexcept>

namespace hbtree::sim {

namespace {
using json = nlohmann::ordered_json;

void push_rate(std::vector<Report::Row>& rows, const char* name, const RateEstimate& e) {
    if (e.trials == 0) return;
    rows.push_back({name, e.estimate, e.ci_lo, e.ci_hi, e.trials});
}

void push_value(std::vector<Report::Row>& rows, const char* name, double v,
                std::uint64_t trials) {
    rows.push_back({name, v, v, v, trials});
}
} // namespace

std::string format_double(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw std::runtime_error("format_double failed");
    return std::string(buf, p);
}

Report make_report(const AggregateStats& st) {
    Report rep;
    rep.config_id = st.config_id;
    auto& rows = rep.rows;
    push_rate(rows, "frr", st.frr_hat);
    push_rate(rows, "far", st.far_hat);
    push_rate(rows, "false_branch_per_level", st.per_level_false_branch_hat);
    push_rate(rows, "departure_per_level", st.departure_per_level_hat);
    if (st.legit_trials + st.impostor_trials > 0) {
        const std::uint64_t n = st.legit_trials + st.impostor_trials;
        push_value(rows, "mean_repeats", st.mean_repeats, n);
        const double dn = static_cast<double>(n);
        push_value(rows, "reader_matvec_per_trial", st.total_ops.reader_matvec / dn, n);
        push_value(rows, "tag_matvec_per_trial", st.total_ops.tag_matvec / dn, n);
        push_value(rows, "bits_sent_per_trial", st.total_ops.bits_sent / dn, n);
        push_value(rows, "bits_received_per_trial", st.total_ops.bits_received / dn, n);
        if (st.verifications)
            push_value(rows, "verifications_per_trial", st.verifications / dn, n);
        if (st.prf_evals) push_value(rows, "prf_evals_per_trial", st.prf_evals / dn, n);
    }
    if (st.guess_correct.trials > 0) {
        push_rate(rows, "guess_correct", st.guess_correct);
        rows.push_back({"advantage", st.advantage, st.advantage_ci_lo, st.advantage_ci_hi,
                        st.guess_correct.trials});
    } else if (st.trials > 0 && st.legit_trials + st.impostor_trials == 0) {
        // privacy run with q = 0: no information, advantage exactly zero
        rows.push_back({"advantage", 0.0, 0.0, 0.0, st.trials});
    }
    return rep;
}

std::string to_csv(const Report& rep) {
    std::string out = "config_id,metric,estimate,ci_lo,ci_hi,trials\n";
    for (const auto& row : rep.rows) {
        out += rep.config_id;
        out.push_back(',');
        out += row.metric;
        out.push_back(',');
        out += format_double(row.estimate);
        out.push_back(',');
        out += format_double(row.ci_lo);
        out.push_back(',');
        out += format_double(row.ci_hi);
        out.push_back(',');
        out += std::to_string(row.trials);
        out.push_back('\n');
    }
    return out;
}

std::string to_json(const Report& rep) {
    json j;
    j["config_id"] = rep.config_id;
    j["metrics"] = json::array();
    for (const auto& row : rep.rows) {
        json m;
        m["metric"] = row.metric;
        m["estimate"] = row.estimate;
        m["ci_lo"] = row.ci_lo;
        m["ci_hi"] = row.ci_hi;
        m["trials"] = row.trials;
        j["metrics"].push_back(std::move(m));
    }
    return j.dump(2) + "\n";
}

Report report_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("report: bad JSON: ") + e.what());
    }
    Report rep;
    rep.config_id = j.at("config_id").get<std::string>();
    for (const auto& m : j.at("metrics")) {
        Report::Row row;
        row.metric = m.at("metric").get<std::string>();
        row.estimate = m.at("estimate").get<double>();
        row.ci_lo = m.at("ci_lo").get<double>();
        row.ci_hi = m.at("ci_hi").get<double>();
        row.trials = m.at("trials").get<std::uint64_t>();
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

void emit_report(const Report& report, ReportFormat format, const std::string& dest) {
    const std::string body = format == ReportFormat::kCsv ? to_csv(report) : to_json(report);
    if (dest == "-" || dest.empty()) {
        std::cout << body;
        std::cout.flush();
        return;
    }
    std::ofstream out(dest, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file " + dest);
    out << body;
    if (!out) throw std::runtime_error("write failed: " + dest);
}

} // namespace hbtree::sim
