#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "miranda/solver.hpp"

namespace miranda {

inline constexpr const char* kToolVersion = "0.1.0";

// Everything a command run depends on; embedded verbatim in every report so a
// report reproduces itself byte for byte.
struct RunConfig {
  std::string command;  // check | solve | trace | compare | field
  std::string map_name;
  std::string expr_text;
  std::string map_file;
  int dim = 0;
  std::vector<double> box;  // flattened (lo, hi) pairs; one pair broadcasts
  double epsilon = 0.05;
  std::uint64_t seed = 1;
  double sigma_min = 1e-8;
  int max_attempts = 16;
  int boundary_samples = 33;
  int scan_cells_1d = 1024;
  int oracle_grid = 0;              // 0 = automatic
  std::string grid_supplement = "auto";  // auto | on | off
  bool continuous = false;          // force the smoothing pipeline
  std::vector<int> degree_schedule = {4, 8, 16, 32, 64};
  std::vector<int> permute;         // 1-based axis order, empty = identity
  std::string out_path;
  std::string csv_prefix = "trace";
  std::string svg_path;
};

struct CommandOutcome {
  int exit_code = 0;
  std::string report_text;  // JSON document, printed to stdout by the CLI
  std::string error_text;   // human-readable diagnostics for stderr
};

nlohmann::json config_json(const RunConfig& config);
nlohmann::json boundary_json(const BoundaryReport& report);
nlohmann::json certificate_json(const ParityCertificate& cert);

// Loads the configured map (expression text, file, or builtin) and resolves
// the working cuboid. Throws on unknown maps or malformed boxes.
MapModel load_map(const RunConfig& config);
Cuboid resolve_box(const RunConfig& config, int n);
SolveOptions solve_options(const RunConfig& config);

// Dispatches on config.command, writes any side-output files (report, CSV,
// SVG), and maps failures to the stable exit-code contract:
// 0 success, 1 usage error, 2 boundary-condition failure, 3 parity violation,
// 4 retry cap exhausted.
CommandOutcome run_command(const RunConfig& config);

std::string svg_figure(const std::vector<CurveComponent>& components,
                       const StartSet& starts, const Cuboid& box);
std::string component_csv(const CurveComponent& component);

}  // namespace miranda
