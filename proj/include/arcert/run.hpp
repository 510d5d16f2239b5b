#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "arcert/config.hpp"

namespace arcert {

enum class Command { BuildMap, Invariant, Isolate, Decompose, Sweep, Continue };

const char* to_string(Command command);
std::optional<Command> parse_command(std::string_view name);

/// Process exit codes of a run.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitCertificateFailed = 2;

struct RunReport {
  std::string json;     // report.json: deterministic, stable key order
  std::string summary;  // summary.txt: one line per claim, each backed by report.json
  std::string timings;  // timings.json: wall-clock seconds per stage
  int exit_code = kExitOk;
  std::vector<std::string> files;  // every file written, relative to the output directory
};

/// Runs one pipeline. With a non-empty out_dir every export is written there
/// (the directory is created). Module errors propagate as arcert::Error with
/// the failing stage in the message; certificate failures only set exit_code.
RunReport run(const SystemConfig& config, Command command, const std::string& out_dir);

}  // namespace arcert
