#pragma once

#include <string>

#include "scoutnd/config.hpp"
#include "scoutnd/objective.hpp"
#include "scoutnd/optimizer.hpp"

namespace scoutnd::cli {

// Exit codes by error class.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;  // bad flags / config file
inline constexpr int kExitIo = 2;      // filesystem problems
inline constexpr int kExitRun = 3;     // evaluation / protocol failures
inline constexpr int kExitInternal = 4;

// Builds the problem described by [problem] (and [external]) sections.
ProblemSpec problem_from_config(const Config& config);

// Builds the optimizer run configuration from [run]/[adam]/[penalty].
RunConfig run_config_from_config(const Config& config, const ProblemSpec& problem);

GaussianPolicy policy0_from_config(const Config& config, int dim);

// Subcommand entry points (also used directly by tests). Each writes its
// artifacts plus resolved.cfg into out_dir and returns an exit code.
int cmd_optimize(const Config& config, const std::string& out_dir, int verbosity = 0);
int cmd_bench(const Config& config, const std::string& out_dir, int verbosity = 0);
int cmd_profile(const Config& config, const std::string& out_dir, int verbosity = 0);
int cmd_variance(const Config& config, const std::string& out_dir, int verbosity = 0);

// Full argv-level front end.
int run_cli(int argc, const char* const* argv);

}  // namespace scoutnd::cli
