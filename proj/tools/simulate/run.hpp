#pragma once

#include <iosfwd>
#include <string>

namespace simulate {

struct RunOptions {
  std::string config_path;
  std::string out_dir;  // empty: $PAULIBLOCK_OUTDIR, then the current directory
  int parallel = 1;
  bool verbose = false;
};

// Full pipeline: read config, validate, run, write payload + manifest,
// print the summary. Returns the process exit code: 0 ok, 1 finished with
// warnings, 2 error.
int run_simulation(const RunOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace simulate
