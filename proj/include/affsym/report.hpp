#pragma once

#include "affsym/surface.hpp"
#include "affsym/verifier.hpp"

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>

namespace affsym {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kReportSchema = 1;

// Raised for malformed configs, unknown keys, out-of-domain grids and output
// I/O problems; maps to process exit status 2. Check failures map to 1.
struct ConfigError : Error {
    using Error::Error;
};

enum class Command { Classify, Scan, Verify, Construct };
enum class OutputFormat { Json, Csv };

const char* to_string(Command c);
const char* to_string(OutputFormat f);

// One axis of the evaluation lattice: count samples spread evenly over
// [start, stop] (the midpoint when count == 1).
struct GridAxis {
    double start = 0.0;
    double stop = 0.0;
    int count = 1;
};

struct RunConfig {
    Command command = Command::Classify;
    std::string surface;                     // catalog id, possibly family:fibre
    std::shared_ptr<const CurveSpec> curve;  // profile override for warped families
    std::optional<std::array<GridAxis, 3>> grid;  // t, u, v; defaulted per command
    double tol_scan = 1e-6;
    double tol_derivative = 1e-5;
    double tol_pointwise = 1e-8;
    std::string output_path;  // empty writes the report to stdout
    OutputFormat format = OutputFormat::Json;
    uint64_t seed = 1;
};

// Strict parse of the JSON document mirroring RunConfig. Unknown keys at any
// level are rejected, as are non-positive tolerances and empty grid axes.
RunConfig config_from_json(const std::string& text);

// Canonical JSON dump of the run parameters: command, fully resolved surface
// (warped families expand to family/fibre/curve), resolved grid, tolerances
// and seed, in fixed key order. The output location is not part of the run's
// identity and is excluded, as is the timestamp.
std::string canonical_config(const RunConfig& c);

// FNV-1a 64-bit hash of canonical_config, as 16 hex digits.
std::string config_hash(const RunConfig& c);

struct RunResult {
    int exit_code = 0;  // 0 all checks pass, 1 check failures
    std::string json;   // full report
    std::string csv;    // per-point rows, same numeric spellings as the JSON
};

// Executes the configured command. Deterministic given (config, seed): the
// only run-to-run difference is the timestamp echoed into meta. Pass a fixed
// timestamp to reproduce a report byte for byte; empty stamps current UTC.
RunResult run(const RunConfig& c, const std::string& timestamp = std::string());

// run() plus output delivery to output_path or stdout in the configured
// format. Returns the process exit status (I/O failures give 2).
int run_and_write(const RunConfig& c);

}  // namespace affsym
