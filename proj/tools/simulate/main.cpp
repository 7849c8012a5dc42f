#include <iostream>

#include "CLI11.hpp"
#include "simulate/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "simulate: Pauli-blocked decay of two fermionic atoms on one lattice site.\n"
      "Runs one scenario config (JSON, schema version 1) and writes a CSV or JSON\n"
      "payload plus a run manifest. Exit codes: 0 ok, 1 warnings, 2 error."};

  simulate::RunOptions opts;
  app.add_option("config", opts.config_path, "path to the scenario config")
      ->required()
      ->type_name("FILE");
  app.add_option("--out", opts.out_dir,
                 "output directory (default: $PAULIBLOCK_OUTDIR, then .)")
      ->type_name("DIR");
  app.add_option("--parallel", opts.parallel, "worker threads for scan points")
      ->check(CLI::PositiveNumber);
  app.add_flag("--verbose", opts.verbose, "progress and file list on stderr");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;  // --help exits cleanly, bad usage is an error
  }

  return simulate::run_simulation(opts, std::cout, std::cerr);
}
