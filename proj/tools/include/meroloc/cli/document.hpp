#pragma once

#include <optional>
#include <string>

#include "meroloc/cli/job.hpp"

namespace meroloc::cli {

inline constexpr const char* kVersion = "1.0.0";

/// Result document for a finished search:
///   {"version", "job": {description, function, region, search},
///    "status": "complete" | "partial" | "boundary-root",
///    "roots": [...], "unresolved": [...], "diagnostics": {...},
///    "evaluations": n, "timing": {"wall_seconds": t}}
/// "timing" is present only when wall_seconds is given.
Json result_document(const Job& job, const SearchResult& result, std::optional<double> wall_seconds);

Json root_to_json(const RootReport& root);
Json region_to_json(const RegionDiagnostics& node);
Json rectangle_to_json(const Rectangle& rect);

/// "complete", "partial" or "boundary-root".
std::string status_of(const SearchResult& result);

/// Serialized document text (two-space indent, trailing newline).
std::string dump(const Json& document);

/// Shortest decimal form that parses back to the same double; independent
/// of the C locale.
std::string format_number(double value);

/// Quotes a CSV field when it contains a comma, quote or line break.
std::string csv_field(const std::string& text);

}  // namespace meroloc::cli
