#pragma once

#include <string>
#include <vector>

#include "dyadic/experiments.hpp"

namespace dyadic::cli {

/// Result of argument resolution: a fully resolved study plan (or the
/// constants query), the output directory, and the raw paths that produced
/// it.  Defaults depend on the subcommand; an explicit flag always wins over
/// a --config value, which wins over the default.
struct parsed {
    bool constants_only = false;
    experiment_plan plan;
    std::string out_dir;
    bool out_given = false;
    std::string init_path;  ///< as passed; plan.init holds the loaded data
};

/// Resolve a command line (argv without the program name).  Usage problems,
/// including --help, surface as parse_error.
parsed parse_args(const std::vector<std::string>& args);

/// Flat key = value rendering of the resolved options.  Feeding it back via
/// `<kind> --config <file>` reproduces the same plan.
std::string render_config(const parsed& p);

/// Full program: parse, run the study, write artifacts, print a report.
/// Returns the process exit code: 0 success, 1 failed run invariant,
/// 2 usage or configuration error.
int run(int argc, const char* const* argv);

}  // namespace dyadic::cli
