#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "meroloc/driver.hpp"

namespace meroloc::cli {

using Json = nlohmann::json;

/// Invalid job file or command line. The message names the file and, where
/// known, the JSON pointer or parse position.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& message) : Error(ErrorKind::InvalidInput, message) {}
};

/// A locate job.
///
///   {
///     "description": "...",                       optional
///     "function": {"<kind>": {...}},               exactly one kind
///     "region": {"corners": [[re, im], [re, im]], "alpha": 0, "eps0": 0.1},
///     "search": {"kappa_c": 128, "eps_i": 1.49e-8, ...},
///     "output": {"path": "out.json", "timing": true}
///   }
///
/// Function kinds: rational, nlevp3, plasma_z, gyrokinetic, external.
struct Job {
    std::string origin;
    std::string description;
    Json function;
    Json region;
    Rectangle rect;
    SearchConfig search;
    std::optional<std::string> output_path;
    bool timing = true;
};

/// Command-line overrides; set fields replace the job's search settings.
struct Overrides {
    std::optional<double> kappa_c;
    std::optional<double> eps_i;
    std::optional<double> eps0;
    std::optional<int> max_depth;
    std::optional<unsigned> workers;
    std::optional<double> rank_tol;
};

/// Swept parameter of a scan job: a JSON pointer into "function" (a bare
/// name is read as a gyrokinetic field) and the values it takes.
struct Sweep {
    std::string parameter;
    Json::json_pointer pointer;
    std::vector<double> values;
};

struct ScanJob {
    Job job;
    Sweep sweep;
};

Job parse_job(const std::string& text, const std::string& origin);
Job load_job(const std::filesystem::path& path);

/// Scan jobs carry an extra "sweep" object:
///   {"parameter": "b_i", "start": 0.1, "stop": 0.5, "step": 0.1}
/// or {"parameter": "/rational/zeros/0/location/0", "values": [...]}.
ScanJob parse_scan_job(const std::string& text, const std::string& origin);
ScanJob load_scan_job(const std::filesystem::path& path);

void apply(Job& job, const Overrides& overrides);

/// Builds the function handle described by a "function" object.
FunctionHandle make_handle(const Json& function, const std::string& origin);

/// Effective search settings as a JSON object. The worker count is left out
/// because results do not depend on it.
Json search_to_json(const SearchConfig& config);

}  // namespace meroloc::cli
