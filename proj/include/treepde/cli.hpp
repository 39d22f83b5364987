#pragma once

namespace treepde::cli {

enum ExitCode { ok = 0, failure = 1, config_error = 2, numerical_error = 3 };

/// Entry point of the `treepde` tool. Subcommands: solve-point, solve-pdd,
/// solve-reference, tree-stats, pade-sum, compare.
int run(int argc, char** argv);

}  // namespace treepde::cli
