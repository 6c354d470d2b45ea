#pragma once

#include <filesystem>
#include <iosfwd>
#include <json.hpp>
#include <string>

#include "vbpg/vbpg.hpp"

namespace vbpg {

using json = nlohmann::json;

// Round-trip formatting shared by every CSV writer.
std::string format_double(double v);

// Columns: k,F,step_norm,gap,envelope,residual_bound
void write_trace_csv(const SolverTrace& trace, std::ostream& os);
std::string trace_csv(const SolverTrace& trace);
json trace_summary(const SolverTrace& trace);

json to_json(const Point& x);
Point point_from_json(const json& j);
Matrix matrix_from_json(const json& j);

// Writes to a sibling temporary file and renames it into place.
void atomic_write(const std::filesystem::path& path, const std::string& content);

}  // namespace vbpg
