#include <CLI11.hpp>
#include <cstdio>
#include <fmt/format.h>
#include <iostream>
#include <optional>

#include "dcplan/errors.hpp"
#include "dcplan/report.hpp"
#include "dcplan/scenario.hpp"

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kConfig = 2, kInfeasible = 3 };

struct Options {
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<int> threads;
  std::optional<std::string> law;
  std::string format = "json";
  std::string out;
  bool quiet = false;
  std::optional<std::string> axis;
  std::vector<double> values;
  std::vector<double> tokens;
};

dcplan::Scenario resolve(const Options& o) {
  auto sc = o.scenario.empty() ? dcplan::default_scenario() : dcplan::load_scenario(o.scenario);
  if (o.seed) sc.flowsim.options.seed = *o.seed;
  if (o.trials) {
    if (*o.trials < 1) throw dcplan::ConfigError("--trials must be >= 1");
    sc.flowsim.options.trials = *o.trials;
  }
  if (o.threads) {
    if (*o.threads < 0) throw dcplan::ConfigError("--threads must be >= 0");
    sc.flowsim.options.threads = *o.threads;
  }
  if (o.law) {
    sc.scaling.active_law = *o.law;
    sc.scaling.law();  // throws when unknown
  }
  if (o.axis) {
    if (o.values.empty()) throw dcplan::ConfigError("--axis needs --values");
    sc.sweeps = {{dcplan::sweep_axis_from_string(*o.axis), o.values}};
  }
  if (!o.tokens.empty()) sc.inference.tokens = o.tokens;
  return sc;
}

int execute(const Options& o, dcplan::Sections sections, dcplan::Section primary) {
  const auto format = dcplan::output_format_from_string(o.format);
  const auto sc = resolve(o);
  if (primary == dcplan::Section::sweep && sc.sweeps.empty()) {
    throw dcplan::ConfigError("no sweep axes: set [sweep] keys or pass --axis/--values");
  }
  const auto report = dcplan::run(sc, sections);
  if (!o.quiet) std::cout << dcplan::render_text(report);
  if (o.out == "-") {
    std::cout << (format == dcplan::OutputFormat::json ? dcplan::to_json(report).dump(2) + "\n"
                                                       : dcplan::to_csv(report, primary));
  } else if (!o.out.empty()) {
    dcplan::emit(report, format, o.out, primary);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Planning and simulation toolkit for very large training clusters"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(dcplan::tool_version()));
  Options o;

  app.add_option("--scenario,-s", o.scenario, "Scenario file (defaults to the built-in scenario)")
      ->check(CLI::ExistingFile);
  app.add_option("--format,-f", o.format, "Machine output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--out,-o", o.out, "Write machine output here ('-' for stdout)");
  app.add_flag("--quiet,-q", o.quiet, "Suppress the human-readable tables");
  app.add_option("--seed", o.seed, "Flow simulation seed");
  app.add_option("--trials", o.trials, "Flow simulation trials");
  app.add_option("--threads", o.threads, "Worker threads for flow simulation (0 = all cores)");
  app.add_option("--law", o.law, "Active scaling law");

  using dcplan::Section;
  struct Command {
    const char* name;
    const char* help;
    dcplan::Sections sections;
    Section primary;
  };
  const Command commands[] = {
      {"plan", "Provisioning, model sizing, parallelism plan and per-layer step time",
       {Section::facility, Section::plan, Section::scaling}, Section::plan},
      {"sweep", "Exposed communication across network speeds", {Section::sweep}, Section::sweep},
      {"topo", "Scale-out topology designs and bill of materials", {Section::topology}, Section::topology},
      {"flowsim", "Flow completion times under permutation traffic", {Section::flowsim}, Section::flowsim},
      {"infer", "Generation latency table", {Section::inference}, Section::inference},
      {"facility", "Power, heat reuse and cooling envelope", {Section::facility}, Section::facility},
  };
  std::optional<Command> chosen;
  for (const auto& c : commands) {
    auto* sub = app.add_subcommand(c.name, c.help);
    sub->fallthrough();
    if (std::string_view(c.name) == "sweep") {
      sub->add_option("--axis", o.axis, "scale-up, scale-out or wan");
      sub->add_option("--values", o.values, "Axis values in bit/s")->delimiter(',');
    }
    if (std::string_view(c.name) == "infer") {
      sub->add_option("--tokens", o.tokens, "Token counts")->delimiter(',')->check(CLI::PositiveNumber);
    }
    sub->callback([&chosen, c] { chosen = c; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    return execute(o, chosen->sections, chosen->primary);
  } catch (const dcplan::ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kConfig;
  } catch (const dcplan::InfeasibleError& e) {
    const std::string_view msg = e.what();
    fmt::print(stderr, "{}{}\n", msg.starts_with("infeasible") ? "" : "infeasible: ", msg);
    return kInfeasible;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kFailure;
  }
}
