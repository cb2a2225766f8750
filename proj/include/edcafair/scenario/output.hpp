#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "edcafair/scenario/runner.hpp"

namespace edcafair::scenario {

enum class Emit { Metrics, Trace, All };

Emit parse_emit(std::string_view name);

/// Structured summary of a run.
std::string report_json(const RunReport& report);

// Comma-separated tables with a header row.
std::string throughput_csv(const RunReport& report);  // time_s,station_id,bits_per_s,direction
std::string controller_csv(const RunReport& report);
std::string flows_csv(const RunReport& report);
std::string stations_csv(const RunReport& report);
std::string trace_csv(const Trace& trace);

/// Writes report.json plus the tables selected by `emit` into `dir`,
/// creating it if needed. Returns the written paths. Throws IoError.
std::vector<std::filesystem::path> write_outputs(const RunReport& report, const std::filesystem::path& dir,
                                                 Emit emit = Emit::Metrics);

/// Shortest round-trip decimal form.
std::string format_double(double v);

}  // namespace edcafair::scenario
