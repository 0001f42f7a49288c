#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "qmetro/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"precision bounds and measurement schemes for qubit rotation "
               "estimation in noisy channels"};
  app.require_subcommand(1);

  std::string scenarioFile;
  qmetro::RunOptions opts;

  CLI::App* run = app.add_subcommand("run", "execute a scenario file");
  run->add_option("file", scenarioFile, "scenario config (JSON)")->required();
  run->add_option("--out", opts.outDir, "output directory");
  run->add_option("--workers", opts.workers, "worker thread count");
  run->add_flag("--certificates", opts.certificates,
                "write X-operator certificates sidecar");
  run->add_option("--seed", opts.seed, "root seed for randomized tasks");
  run->add_flag("--verbose", opts.verbose, "progress output on stderr");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : qmetro::kExitConfig;
  }

  return qmetro::runScenarioFile(scenarioFile, opts);
}
