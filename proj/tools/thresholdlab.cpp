// thresholdlab: command-line front end. Argument handling only; the
// commands themselves live in thresholdlab::cli::run.

#include <CLI11.hpp>
#include <iostream>
#include <map>
#include <string>

#include "thresholdlab/cli.hpp"

namespace {

struct Flag {
  const char* name;
  const char* help;
};

const Flag kFlags[] = {
    {"p", "failure probability of each component"},
    {"eps", "threshold level epsilon in (0, 1/2] (default 0.25)"},
    {"tol", "bisection bracket width on p (default 1e-12)"},
    {"alpha", "also locate p with mu_p = alpha"},
    {"grid", "number of curve points including 0 and 1 (default 101)"},
    {"samples", "Monte Carlo sample count (default 100000)"},
    {"halfwidth", "sample until the 95% interval half-width is at most this"},
    {"seed", "Monte Carlo seed (default 0)"},
    {"target", "width target: ceil_log | ceil_cuberoot | ceil_sqrt | file:PATH"},
    {"n", "requested scale for the construction"},
    {"sizes", "comma-separated sizes"},
    {"family", "majority | series | parallel | parallel_series | singleton"},
    {"beta", "lower level for a homogeneity scan"},
    {"gamma", "upper level for a homogeneity scan"},
};

const std::map<std::string, std::string> kCommands = {
    {"eval", "availability and derivative at one p"},
    {"curve", "availability curve on an even grid (CSV)"},
    {"threshold", "threshold levels, width and sharpness ratio"},
    {"width", "same report as threshold, without --alpha"},
    {"verify", "run the identity and inequality checks"},
    {"construct", "build the structure for a width target at scale n"},
    {"scaling", "width table over sizes for a target or a family"},
    {"mc", "Monte Carlo estimate with a 95% Wilson interval"},
};

const char* help_for(const std::string& name) {
  for (const auto& f : kFlags) {
    if (name == f.name) return f.help;
  }
  return "";
}

}  // namespace

int main(int argc, char** argv) {
  namespace cli = thresholdlab::cli;
  CLI::App app{"Threshold analysis of monotone failure structures"};
  app.require_subcommand(1);

  cli::CommandSpec spec;
  std::map<std::string, std::map<std::string, std::string>> values;
  std::map<std::string, bool> json;

  for (const auto& [command, flags] : cli::command_flags()) {
    CLI::App* sub = app.add_subcommand(command, kCommands.at(command));
    if (command != "construct" && command != "scaling") {
      sub->add_option("expr", spec.expr_text, "structure expression")->required();
    }
    for (const auto& flag : flags) {
      if (flag == "json") {
        sub->add_flag("--json", json[command], "emit a JSON object");
      } else {
        sub->add_option("--" + flag, values[command][flag], help_for(flag));
      }
    }
    sub->callback([&, command = command, sub] {
      spec.command = command;
      for (const auto& [flag, value] : values[command]) {
        if (sub->count("--" + flag) > 0) spec.options[flag] = value;
      }
      if (json[command]) spec.options["json"] = "1";
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kExitOk : cli::kExitInputError;
  }

  const auto result = cli::run(spec);
  std::cout << result.output;
  std::cerr << result.error;
  return result.exit_code;
}
