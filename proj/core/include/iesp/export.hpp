#pragma once

// Trace CSV, metrics JSON and optional SVG plots.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "iesp/simulation.hpp"

namespace iesp::sim {

// 17 significant digits, so every value survives a round trip exactly.
std::string format_number(double v);

void write_trace_csv(std::ostream& out, const SimTrace& trace);
// Reads what write_trace_csv() wrote; throws ConfigError on a bad header or row.
SimTrace read_trace_csv(std::istream& in);

nlohmann::json metrics_to_json(const RunMetrics& m);

// Time histories of beta, yaw rate against its reference and limit, and the
// running-mean / instantaneous trajectory error.
std::vector<std::filesystem::path> write_plots(const SimTrace& trace, const std::filesystem::path& dir);

struct ExportSummary {
    std::filesystem::path csv;
    std::filesystem::path metrics;
    std::vector<std::filesystem::path> plots;
};

// Writes trace.csv and metrics.json (plus plots when asked) into dir,
// creating it if needed. Throws IoError naming the failing path.
ExportSummary export_run(const RunResult& result, const RunMetrics& metrics, const std::filesystem::path& dir,
                         bool plots);

}  // namespace iesp::sim
