#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

namespace ilw::cli {

enum ExitCode : int {
  kSuccess = 0,
  kConfigError = 2,
  kNumericalFailure = 3,
  kNotConverged = 4,
  kSingularMode = 5,
  kVerifyFailed = 6,
};

struct Options {
  std::string command;  // evolve | solitary | verify
  std::filesystem::path config;
  std::filesystem::path out = "out";
  unsigned threads = 0;  // 0: hardware concurrency
  bool quiet = false;
};

/// Runs one subcommand. Progress goes to log unless quiet; errors go to err.
int run_command(const Options& options, std::ostream& log, std::ostream& err);

/// Parses argv and dispatches to run_command.
int main(int argc, char** argv);

}  // namespace ilw::cli
