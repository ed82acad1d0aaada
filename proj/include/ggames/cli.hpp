#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "ggames/config.hpp"

namespace ggames::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kPrecondition = 2, kNumeric = 3, kTrivial = 4 };

struct RunConfig {
  Config config;
  std::uint64_t seed = 1;
  std::filesystem::path out_dir;  // absolute
  std::vector<std::string> warnings;  // printed after a successful run
};

// Each command reads its keys, rejects the rest, computes, then writes its
// outputs and a manifest.json into out_dir. Errors propagate as exceptions.
void cmd_nash(RunConfig& run);
void cmd_intervene(RunConfig& run);
void cmd_sample(RunConfig& run);
void cmd_converge(RunConfig& run);
void cmd_spectral(RunConfig& run);

// Maps a library exception to the exit-code contract.
ExitCode exit_code_for(const std::exception& e);

// args excludes the program name: {"nash", "--config", "run.ini", ...}.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ggames::cli
