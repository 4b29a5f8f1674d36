#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "miranda/report.hpp"

namespace {

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t next = text.find(',', pos);
    if (next == std::string::npos) next = text.size();
    out.push_back(std::stod(text.substr(pos, next - pos)));
    pos = next + 1;
  }
  return out;
}

std::vector<int> parse_ints(const std::string& text) {
  std::vector<int> out;
  for (double v : parse_doubles(text)) out.push_back(static_cast<int>(v));
  return out;
}

void add_map_options(CLI::App* cmd, miranda::RunConfig& config) {
  cmd->add_option("--map", config.map_name, "builtin map name");
  cmd->add_option("--expr", config.expr_text, "inline map expression, components ';'-separated");
  cmd->add_option("--map-file", config.map_file, "file containing a map expression");
  cmd->add_option("--dim", config.dim, "dimension (required by identity-style builtins)");
}

void add_box_option(CLI::App* cmd, std::string& box_text) {
  cmd->add_option("--box", box_text,
                  "bounds 'lo,hi' (broadcast) or 'lo1,hi1,lo2,hi2,...'; default -1,1");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"parity-certified zero finding on cuboids under the sign boundary condition"};
  app.require_subcommand(1);

  miranda::RunConfig config;
  std::string box_text;
  std::string permute_text;
  std::string degrees_text;

  auto* check = app.add_subcommand("check", "test the boundary condition by face sampling");
  auto* solve = app.add_subcommand("solve", "locate zeros and emit a parity certificate");
  auto* trace = app.add_subcommand("trace", "export the traced level-set components (n = 2)");
  auto* compare = app.add_subcommand("compare", "solver vs brute-force oracle");
  auto* field = app.add_subcommand("field", "outward vector field equilibrium count");

  for (CLI::App* cmd : {check, solve, trace, compare, field}) {
    add_map_options(cmd, config);
    add_box_option(cmd, box_text);
    cmd->add_option("--samples", config.boundary_samples, "face samples per axis");
    cmd->add_option("--out", config.out_path, "also write the JSON report to this path");
  }
  for (CLI::App* cmd : {solve, trace, compare, field}) {
    cmd->add_option("--epsilon", config.epsilon, "bound on ||q||");
    cmd->add_option("--seed", config.seed, "seed for the regular-value proposal");
    cmd->add_option("--sigma-min", config.sigma_min, "regularity audit threshold");
    cmd->add_option("--attempts", config.max_attempts, "retry cap for suspect audits");
    cmd->add_option("--scan-cells", config.scan_cells_1d, "1-D sign-scan cells");
    cmd->add_option("--grid-supplement", config.grid_supplement,
                    "interior loop discovery: auto|on|off");
  }
  solve->add_option("--permute", permute_text, "1-based axis order, e.g. 2,1");
  solve->add_flag("--continuous", config.continuous,
                  "force the smoothing pipeline (automatic for maps with abs)");
  solve->add_option("--degrees", degrees_text, "smoothing degree schedule, e.g. 8,16,32");
  compare->add_option("--oracle-grid", config.oracle_grid, "oracle grid nodes per axis");
  trace->add_option("--csv-prefix", config.csv_prefix, "prefix for per-component CSV files");
  trace->add_option("--svg", config.svg_path, "SVG output path (default <prefix>.svg)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (!box_text.empty()) config.box = parse_doubles(box_text);
    if (!permute_text.empty()) config.permute = parse_ints(permute_text);
    if (!degrees_text.empty()) config.degree_schedule = parse_ints(degrees_text);
  } catch (const std::exception& e) {
    std::cerr << "argument error: " << e.what() << "\n";
    return 1;
  }
  config.command = app.get_subcommands().front()->get_name();

  const miranda::CommandOutcome outcome = miranda::run_command(config);
  if (!outcome.report_text.empty()) std::cout << outcome.report_text;
  if (!outcome.error_text.empty()) std::cerr << outcome.error_text << "\n";
  return outcome.exit_code;
}
