#pragma once

// File formats: trace CSV, run summary, body snapshots and report JSON.
// Every floating value is written with 17 significant digits.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "capgcf/body.hpp"
#include "capgcf/convex_analysis.hpp"
#include "capgcf/flow_engine.hpp"
#include "capgcf/soliton.hpp"

namespace capgcf::io {

using Json = nlohmann::ordered_json;

/// "%.17g"; non-finite values print as "nan", "inf" or "-inf".
std::string format_double(double v);

/// Serializes with doubles in format_double form (non-finite become null).
std::string dump(const Json& j, int indent = 2);

Json read_json(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const Json& j);

/// t,dt,volume,entropy,entropy_point_1..n,k_min,...,norm_coeff
std::string trace_header(int n);
std::string trace_row(const TraceRecord& r);
void write_trace_csv(std::ostream& out, int n, const std::vector<TraceRecord>& traces);

Json grid_json(const CapGrid& grid);
Json config_json(const FlowConfig& config);
/// Reads the FlowConfig fields present in `j`; other keys are ignored.
/// SchemaMismatch on wrongly typed values.
FlowConfig config_from_json(const Json& j, FlowConfig base = {});

Json summary_json(const RunResult& result, const FlowConfig& config);

struct Snapshot {
    CapillaryBody body;
    std::string label;
    std::string created_by;
};

Json body_json(const CapillaryBody& body, const std::string& label, const std::string& created_by);
/// SchemaMismatch on missing or malformed fields; body validation errors
/// (NotConvex, RobinViolation) propagate.
Snapshot body_from_json(const Json& j);
Snapshot load_body(const std::filesystem::path& path);

Json toolkit_json(const ToolkitReport& report);
Json soliton_json(const SolitonReport& report);

}  // namespace capgcf::io
