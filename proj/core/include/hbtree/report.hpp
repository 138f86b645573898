#pragma once

#include "hbtree/sim.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace hbtree::sim {

enum class ReportFormat { kCsv, kJson };

// Flat metric table; this is exactly what goes on the wire/disk. Doubles are
// printed with std::to_chars (shortest round-trip), so identical stats give
// byte-identical output.
struct Report {
    struct Row {
        std::string metric;
        double estimate = 0.0;
        double ci_lo = 0.0;
        double ci_hi = 0.0;
        std::uint64_t trials = 0;

        bool operator==(const Row&) const = default;
    };
    std::string config_id;
    std::vector<Row> rows;

    bool operator==(const Report&) const = default;
};

// Wall-clock stats stay out of the report on purpose: reports must be
// byte-identical for a fixed (seed, config) across reruns and worker counts.
Report make_report(const AggregateStats& stats);

std::string to_csv(const Report& report);
std::string to_json(const Report& report);
Report report_from_json(const std::string& text);

// dest "-" means stdout.
void emit_report(const Report& report, ReportFormat format, const std::string& dest);

std::string format_double(double v);

} // namespace hbtree::sim
