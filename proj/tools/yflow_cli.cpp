#include <iostream>

#include "CLI11.hpp"
#include "yflow/app.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Prescribed-curvature Yamabe flow laboratory on periodic grids"};
  app.require_subcommand(1);

  yflow::AppOptions opt;
  std::string until;
  const std::pair<const char*, const char*> commands[] = {
      {"run", "integrate the flow and check the configured diagnostics"},
      {"resume", "continue a run from the checkpoint in the output directory"},
      {"eigen", "first Dirichlet eigenpair of the conformal Laplacian on the scenario mask"},
      {"check", "test the sign and ratio hypotheses on the scenario mask"},
      {"supersolution", "build and verify a supersolution certificate"},
      {"verify", "rerun the diagnostics suite on a stored trajectory"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--scenario", opt.scenario, "scenario file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "output directory");
    sub->add_option("--until", until, "stop at t:<time>, steps:<count> or a bare time");
    sub->add_option("--threads", opt.threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--checkpoint-every", opt.checkpoint_every, "write a checkpoint every k steps")
        ->check(CLI::NonNegativeNumber);
  }

  CLI11_PARSE(app, argc, argv);

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    opt.until = yflow::parse_until(until);
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return 2;
  }
  return yflow::run_command(name, opt, std::cout, std::cerr);
}
