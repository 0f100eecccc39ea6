#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bisep {

/// Entry point of the `bisep` tool. Subcommands:
///   m-sweep | heatmap | kv-decoupling | rho-table   run an experiment, write
///       <out>/<name>.csv, <name>_summary.csv and <name>_manifest.json
///   predict   overlay sample-size predictions for two profile pairs
///   verify    run the self-check suite; nonzero exit on any failure
/// Returns the process exit status.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bisep
