#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "flatnf/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"flatness test and triangular normal form for discrete-time systems"};
  app.require_subcommand(1);

  std::string path;
  flatnf::CommandOptions opt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("file", path, "system description (line format or JSON)")->required();
    sub->add_flag("--json", opt.json, "emit the JSON report instead of text");
    sub->add_option("--max-degree", opt.core.max_degree, "ansatz degree bound")
        ->default_val(3);
    sub->add_option("--seed", opt.core.seed, "seed for the randomized rank checks")
        ->default_val(0);
    sub->add_option("--trials", opt.core.trials, "evaluation points per rank check")
        ->default_val(5);
    sub->add_flag("--force-multi", opt.core.force_multi,
                  "attempt the coordinate read-off for systems with more than two inputs");
    sub->add_flag("--timing", opt.timing, "include wall-clock timing in the report");
  };

  CLI::App* check = app.add_subcommand("check", "decide forward flatness");
  CLI::App* normalform =
      app.add_subcommand("normalform", "construct the triangular normal form");
  CLI::App* parameterize =
      app.add_subcommand("parameterize", "express all variables by the flat output");
  CLI::App* verify = app.add_subcommand("verify", "run every pipeline invariant");
  for (CLI::App* sub : {check, normalform, parameterize, verify}) add_common(sub);

  CLI11_PARSE(app, argc, argv);

  if (check->parsed()) return flatnf::cmd_check(path, opt, std::cout, std::cerr);
  if (normalform->parsed()) return flatnf::cmd_normalform(path, opt, std::cout, std::cerr);
  if (parameterize->parsed())
    return flatnf::cmd_parameterize(path, opt, std::cout, std::cerr);
  return flatnf::cmd_verify(path, opt, std::cout, std::cerr);
}
