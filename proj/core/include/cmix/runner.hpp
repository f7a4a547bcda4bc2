#pragma once

// Batch scenario runner behind the `cmix` command-line tool.
//
// Config (JSON):
//   {"schema": "cmix.config", "version": 1, "seed": 7,
//    "thresholds": {...overrides of Thresholds...},
//    "scenarios": [{"name": "...", "model": {"model": "random", ...},
//                   "tasks": ["identities", ...], "schedule": [...],
//                   "seed": 3, "output_dir": "..."}]}
//
// Report (JSON): {"schema": "cmix.report", "version": 1, "tool_version",
//   "status", "config" (normalized echo, re-runnable), "scenarios": [...]}.
// Scenarios are ordered by name. Wall times go to a separate metadata
// document so reports of identical runs are byte-identical.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace cmix::runner {

inline constexpr int kConfigVersion = 1;
inline constexpr int kReportVersion = 1;

enum class Status { pass, warn, fail };

const char* to_string(Status s);
Status worse(Status a, Status b);

/// Every cutoff used to set a task status. All are overridable in the
/// config's "thresholds" block and echoed next to the metric they judge.
struct Thresholds {
  double identity_rel = 1e-9;       // ||[A,U^N] - N D_N U^N|| <= identity_rel (1+||A||)(1+N)
  double alternative_abs = 1e-10;   // ||D_N - (1/N)[A,U^N]U^{-N}||_max
  double flow_factor = 10.0;        // flow residual <= flow_factor * quadrature error
  double flow_abs = 1e-7;           // and <= flow_abs
  double cauchy = 1e-3;             // degree estimate settling
  double degree_abs = 0.05;         // torus sup |D_N - D| at the last N
  double degree_slope_min = -1.3;   // log-log slope of the torus sup error
  double degree_slope_max = -0.7;
  double su2_rel = 2e-2;            // relative eigenvalue error of the SU(2) limit
  double kernel_tol = 1e-6;         // relative kernel threshold for limits
  double decay_fraction = 0.1;      // late correlation max vs ||f||^2 (or early max)
  double saturation_fraction = 1e-3;
  double growth_slope = -0.5;
  double reconstruction = 1e-8;     // Fourier series vs eigendecomposition
  double fourier_exponent = -2.0;   // fitted decay exponent must not exceed this
  double graph_residual = 1e-12;
  double graph_kernel_tol = 1e-8;
  double psd_floor = -1e-10;        // smallest eigenvalue of the graph degree
  double weyl_tol = 1e-10;
  double cocycle_tol = 1e-10;
};

nlohmann::json to_json(const Thresholds& t);
/// Throws ParseError naming the offending key.
Thresholds thresholds_from_json(const nlohmann::json& j, Thresholds base = {});

struct Scenario {
  std::string name;
  nlohmann::json model;
  std::vector<std::string> tasks;
  std::vector<double> schedule;
  std::optional<std::uint64_t> seed;
  std::string output_dir;
};

struct Config {
  std::uint64_t seed = 0;
  Thresholds thresholds;
  std::vector<Scenario> scenarios;
};

/// Validates against the versioned schema; errors name the JSON field.
Config parse_config(const nlohmann::json& j);
Config load_config(const std::string& path);
nlohmann::json to_json(const Config& c);

struct RunOptions {
  std::optional<std::uint64_t> seed;  // overrides the config seed
  std::string out_dir = "cmix_out";
  unsigned threads = 1;
  bool strict = false;                // warn counts as fail
  bool write_files = true;
};

struct RunResult {
  nlohmann::json report;
  nlohmann::json metadata;
  Status status = Status::pass;
  std::vector<std::string> failures;  // "scenario/task: message"
};

RunResult run(const Config& config, const RunOptions& options = {});

/// Canonical text form of a report (2-space indent, trailing newline).
std::string dump(const nlohmann::json& j);

/// 0 for pass (and warn unless strict), 1 otherwise.
int exit_code(Status s, bool strict);

struct DiffEntry {
  std::string path;  // JSON pointer
  nlohmann::json a;
  nlohmann::json b;
};

struct CompareOptions {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
};

/// Field-wise diff of two reports. Throws ArgumentError unless both carry
/// the report schema with the same version.
std::vector<DiffEntry> compare(const nlohmann::json& a, const nlohmann::json& b,
                               const CompareOptions& options = {});

/// The shipped example configs, keyed by file name.
std::map<std::string, nlohmann::json> example_configs();

}  // namespace cmix::runner
