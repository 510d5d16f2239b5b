// Command-line front end. Talks to the library only through the C interface.
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "arcert/arcert.h"

namespace {

int report_error(const char* stage) {
  std::fprintf(stderr, "arcert: %s: %s\n", stage, arcert_last_error());
  return ARCERT_EXIT_ERROR;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified attractor-repeller decompositions of differential inclusions on a box grid"};
  app.set_version_flag("--version", arcert_version());

  std::string command;
  std::string config_path;
  std::string out_dir;
  std::optional<double> lambda;
  std::optional<double> tau;
  std::vector<std::uint64_t> grid;
  std::optional<unsigned> threads;
  bool quiet = false;

  app.add_option("command", command, "build-map, invariant, isolate, decompose, sweep or continue")
      ->required()
      ->check(CLI::IsMember({"build-map", "invariant", "isolate", "decompose", "sweep", "continue"}));
  app.add_option("--config", config_path, "System configuration file")->required()->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "Output directory (created if missing)")->required();
  app.add_option("--lambda", lambda, "Override the lambda value");
  app.add_option("--tau", tau, "Override the time step")->check(CLI::PositiveNumber);
  app.add_option("--grid", grid, "Override subdivisions: one count, or one per axis")->delimiter(',');
  app.add_option("--threads", threads, "Worker threads (0: all cores)");
  app.add_flag("--quiet,-q", quiet, "Do not print the summary");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : ARCERT_EXIT_ERROR;
  }

  arcert_config* config = nullptr;
  if (arcert_config_load(config_path.c_str(), &config) != ARCERT_OK) return report_error("config");
  struct Guard {
    arcert_config* c;
    ~Guard() { arcert_config_free(c); }
  } guard{config};

  if (lambda && arcert_config_set_lambda(config, *lambda) != ARCERT_OK) return report_error("--lambda");
  if (tau && arcert_config_set_tau(config, *tau) != ARCERT_OK) return report_error("--tau");
  if (!grid.empty() && arcert_config_set_grid(config, grid.data(), grid.size()) != ARCERT_OK) {
    return report_error("--grid");
  }
  if (threads && arcert_config_set_threads(config, *threads) != ARCERT_OK) return report_error("--threads");

  arcert_result* result = nullptr;
  if (arcert_run(config, command.c_str(), out_dir.c_str(), &result) != ARCERT_OK) return report_error(command.c_str());
  if (!quiet) std::fputs(arcert_result_summary(result), stdout);
  const int code = arcert_result_exit_code(result);
  arcert_result_free(result);
  return code;
}
