#include <CLI11.hpp>

#include "sparse_ocp/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Sparse parabolic control: solve and verify optimality conditions"};
  std::string config;
  sparse_ocp::RunOptions opts;
  app.add_option("--config", config, "JSON run configuration")->required()->check(CLI::ExistingFile);
  app.add_option("--workers", opts.workers, "sampling worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--dump-fields", opts.dump_fields, "write control, state and adjoint CSVs");
  app.add_option("--out", opts.out_dir, "output directory");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : sparse_ocp::kExitError;
  }
  return sparse_ocp::run(config, opts);
}
