// varbox: enclose, skeleton, roadmap, verify and export from the command line.
#include <iostream>

#include "CLI11.hpp"
#include "varbox/cli.hpp"

int main(int argc, char** argv) {
  using namespace varbox::cli;
  CLI::App app{"Box enclosures of real algebraic varieties"};
  app.require_subcommand(1);
  // global flags may also follow the subcommand
  app.fallthrough();

  Overrides ov;
  std::string output;
  app.add_option("--resolution", ov.resolution, "Longest side of a finished box")->check(CLI::PositiveNumber);
  app.add_option("--degree", ov.degree, "Relaxation degree");
  app.add_option("--epsilon", ov.epsilon, "Offset of the skeleton level set")->check(CLI::PositiveNumber);
  app.add_option("--threads", ov.threads, "Worker threads (0: all cores)");
  app.add_option("--budget", ov.budget, "Maximum number of processed boxes");
  app.add_option("-o,--output", output, "Output file (default: stdout)");

  std::string input;
  auto* enclose = app.add_subcommand("enclose", "Enclose the problem's system");
  auto* skeleton = app.add_subcommand("skeleton", "Enclose the roadmap skeleton of the variety");
  auto* roadmap = app.add_subcommand("roadmap", "Build a roadmap, or answer the start/goal query");
  for (auto* sub : {enclose, skeleton, roadmap}) {
    sub->add_option("problem", input, "Problem file")->required();
  }

  std::string result, problem;
  std::size_t samples = 1000;
  auto* verify = app.add_subcommand("verify", "Check a result against sampled variety points");
  verify->add_option("result", result, "Result file")->required();
  verify->add_option("problem", problem, "Problem file")->required();
  verify->add_option("--samples", samples, "Number of oracle samples");

  std::string format = "csv";
  auto* exp = app.add_subcommand("export", "Write boxes as CSV rows or an OBJ wireframe");
  exp->add_option("result", result, "Result file")->required();
  exp->add_option("--format", format, "csv or obj")->check(CLI::IsMember({"csv", "obj"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : InputError;
  }

  if (enclose->parsed()) return cmd_enclose(input, output, ov, std::cout, std::cerr);
  if (skeleton->parsed()) return cmd_skeleton(input, output, ov, std::cout, std::cerr);
  if (roadmap->parsed()) return cmd_roadmap(input, output, ov, std::cout, std::cerr);
  if (verify->parsed()) return cmd_verify(result, problem, samples, std::cout, std::cerr);
  return cmd_export(result, format, output, std::cout, std::cerr);
}
