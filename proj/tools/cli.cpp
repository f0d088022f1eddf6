// Copyright 2026 The chsched Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <fstream>
#include <optional>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "chsched/compile.hpp"
#include "chsched/harness.hpp"
#include "chsched/rolling.hpp"
#include "chsched/schedule.hpp"
#include "json.hpp"

namespace chsched::cli {
namespace {

using nlohmann::ordered_json;

constexpr int kSuiteSize = 50;

struct Config {
  std::string input;
  std::string formulation = "compact";
  std::string windows = "none";
  std::string format = "mps";
  long max_nodes = Limits{}.max_nodes;
  double max_seconds = Limits{}.max_seconds;
  std::string out;
  std::optional<unsigned> seed;
  std::string grid = "4,8,16:3,8";
  bool json = false;
  long binary_budget = Budgets{}.max_binaries;
  double load_budget = Budgets{}.max_load_h;
};

// Thrown for exit codes other than usage errors raised by CLI11 itself.
struct Exit {
  int code;
  std::string message;
};

Limits limits_of(const Config& c) { return {c.max_nodes, c.max_seconds}; }

Formulation formulation_of(const Config& c) { return *parse_formulation(c.formulation); }
WindowMode windows_of(const Config& c) { return *parse_window_mode(c.windows); }

void write_file(const std::string& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Exit{kUsage, fmt::format("cannot write '{}'", path)};
  file << text;
}

// Prints `text` to the --out file when given, otherwise to `out`.
void emit(const Config& c, std::ostream& out, const std::string& text) {
  if (c.out.empty()) {
    out << text;
    if (!text.empty() && text.back() != '\n') out << '\n';
  } else {
    write_file(c.out, text);
  }
}

Instance read_instance(const Config& c) { return load_instance_file(c.input); }

std::string objectives(const std::vector<double>& v) {
  std::string text = "[";
  for (size_t k = 0; k < v.size(); ++k) text += (k ? ", " : "") + format_number(v[k]);
  return text + "]";
}

int cmd_validate(const Config& c, std::ostream& out) {
  const Instance inst = parse_instance([&] {
    std::ifstream file(c.input);
    if (!file) throw Exit{kInvalidInput, fmt::format("cannot open '{}'", c.input)};
    return std::string(std::istreambuf_iterator<char>(file), {});
  }());
  const auto problems = validate(inst);
  const auto notes = warnings(inst);
  if (c.json) {
    ordered_json doc;
    doc["valid"] = problems.empty();
    doc["violations"] = ordered_json::array();
    for (const Violation& v : problems) {
      doc["violations"].push_back(
          {{"entity", v.entity}, {"rule", v.rule}, {"message", v.message}});
    }
    doc["warnings"] = notes;
    out << doc.dump(2) << "\n";
  } else {
    for (const Violation& v : problems) {
      out << fmt::format("{}: {}: {}\n", v.entity, v.rule, v.message);
    }
    for (const std::string& w : notes) out << "warning: " << w << "\n";
    if (problems.empty()) {
      out << fmt::format("valid: {} units, {} tasks, {} states, n_max {}\n",
                         inst.units.size(), inst.tasks.size(), inst.states.size(),
                         inst.n_max);
    }
  }
  return problems.empty() ? kOk : kInvalidInput;
}

int cmd_build(const Config& c, std::ostream& out) {
  const auto compiled = compile(read_instance(c), formulation_of(c), windows_of(c));
  const CountReport report = count(compiled->model);
  const std::string prefix = std::string(to_string(compiled->formulation)) + ".";
  const long changeover = report.groups_with_prefix(prefix);
  if (c.json) {
    ordered_json doc;
    doc["formulation"] = c.formulation;
    doc["windows"] = c.windows;
    doc["total_constraints"] = report.total_constraints;
    doc["total_variables"] = report.total_variables;
    doc["total_binaries"] = report.total_binaries;
    doc["changeover_constraints"] = changeover;
    doc["groups"] = report.constraints_by_group;
    doc["variables"] = report.variables_by_prefix;
    emit(c, out, doc.dump(2));
    return kOk;
  }
  std::string text = fmt::format("formulation {}, windows {}\n", c.formulation, c.windows);
  text += fmt::format("constraints {}, variables {} ({} binary)\n",
                      report.total_constraints, report.total_variables,
                      report.total_binaries);
  for (const auto& [group, n] : report.constraints_by_group) {
    text += fmt::format("  {:<22} {:>8}\n", group, n);
  }
  for (const auto& [name, n] : report.variables_by_prefix) {
    text += fmt::format("  var {:<18} {:>8}\n", name, n);
  }
  text += fmt::format("changeover constraints {}\n", changeover);
  emit(c, out, text);
  return kOk;
}

int cmd_export(const Config& c, std::ostream& out) {
  const auto compiled = compile(read_instance(c), formulation_of(c), windows_of(c));
  emit(c, out, c.format == "lp" ? export_lp(compiled->model) : export_mps(compiled->model));
  return kOk;
}

int cmd_solve(const Config& c, std::ostream& out, std::ostream& err) {
  const auto compiled = compile(read_instance(c), formulation_of(c), windows_of(c));
  const SolveResult result = solve(compiled->model, limits_of(c));
  std::optional<Schedule> schedule;
  std::string failure;
  if (result.status == SolveStatus::kOptimal) {
    try {
      schedule = decode(*compiled, result);
    } catch (const VerificationError& e) {
      failure = e.what();
    }
  }
  if (c.json) {
    ordered_json doc;
    doc["status"] = std::string(to_string(result.status));
    doc["objective_vector"] = result.objective_vector;
    doc["stats"] = {{"nodes", result.stats.nodes},
                    {"lp_iterations", result.stats.lp_iterations},
                    {"wall_seconds", result.stats.wall_seconds}};
    doc["schedule"] =
        schedule ? ordered_json::parse(schedule_to_json(*schedule)) : ordered_json(nullptr);
    if (!failure.empty()) doc["verification_error"] = failure;
    emit(c, out, doc.dump(2));
  } else {
    std::string text = fmt::format("status {}\nobjectives {}\n", to_string(result.status),
                                   objectives(result.objective_vector));
    text += fmt::format("nodes {}, lp iterations {}, {:.3f} s\n", result.stats.nodes,
                        result.stats.lp_iterations, result.stats.wall_seconds);
    if (schedule) text += format_schedule(*schedule);
    emit(c, out, text);
  }
  if (!failure.empty()) {
    err << "verification failed: " << failure << "\n";
    return kVerification;
  }
  if (result.status == SolveStatus::kNodeLimit || result.status == SolveStatus::kTimeLimit) {
    return kLimits;
  }
  return kOk;
}

int cmd_compare(const Config& c, std::ostream& out) {
  EquivalenceReport report;
  if (!c.input.empty()) {
    report.rows.push_back(check_equivalence(read_instance(c), limits_of(c), c.input));
  } else if (c.seed) {
    report = check_equivalence_suite(random_suite(kSuiteSize, *c.seed), limits_of(c));
  } else {
    throw Exit{kUsage, "compare needs an instance file or --seed for the random suite"};
  }
  if (c.json) {
    ordered_json doc = ordered_json::array();
    for (const EquivalenceRow& r : report.rows) {
      doc.push_back({{"key", r.key},
                     {"match", r.match},
                     {"conclusive", r.conclusive},
                     {"legacy",
                      {{"status", std::string(to_string(r.legacy.status))},
                       {"objective_vector", r.legacy.objective_vector},
                       {"nodes", r.legacy.stats.nodes}}},
                     {"compact",
                      {{"status", std::string(to_string(r.compact.status))},
                       {"objective_vector", r.compact.objective_vector},
                       {"nodes", r.compact.stats.nodes}}}});
    }
    emit(c, out, doc.dump(2));
  } else if (!c.out.empty()) {
    write_file(c.out, report.to_csv());
    out << report.to_text();
  } else {
    out << report.to_text();
  }
  if (!report.all_verified()) return kVerification;
  if (report.inconclusive() > 0) return kLimits;
  return report.all_match() ? kOk : kVerification;
}

int cmd_sweep(const Config& c, std::ostream& out) {
  const GrowthReport report = measure_growth(parse_grid(c.grid));
  if (c.json) {
    ordered_json doc = ordered_json::array();
    for (const GrowthRow& r : report.rows) {
      doc.push_back({{"n_max", r.point.n_max},
                     {"tasks", r.point.tasks},
                     {"p1", r.point.p1},
                     {"legacy", r.legacy},
                     {"compact", r.compact},
                     {"legacy_closed_form", r.legacy_closed_form},
                     {"compact_closed_form", r.compact_closed_form},
                     {"legacy_x", r.legacy_x},
                     {"compact_x", r.compact_x},
                     {"ratio", r.ratio}});
    }
    emit(c, out, doc.dump(2));
  } else if (!c.out.empty()) {
    write_file(c.out, report.to_csv());
    out << report.to_text();
  } else {
    out << report.to_text();
  }
  for (const GrowthRow& r : report.rows) {
    if (!r.closed_form_ok()) return kVerification;
  }
  return kOk;
}

int cmd_rolling(const Config& c, std::ostream& out) {
  const MonthPlan month = load_month_file(c.input);
  HorizonPlan plan;
  try {
    plan = plan_horizons(month, {c.binary_budget, c.load_budget});
  } catch (const Error& e) {
    throw Exit{kInvalidInput, e.what()};
  }
  const RollingResult result = run_rolling(plan, formulation_of(c), limits_of(c));
  if (c.json) {
    ordered_json doc = ordered_json::parse(result.to_json());
    ordered_json horizons = ordered_json::array();
    for (const HorizonSlot& h : plan.horizons) {
      horizons.push_back({{"index", h.index},
                          {"selected", h.selected},
                          {"demand", h.demand},
                          {"tasks", h.tasks},
                          {"binary_estimate", h.binary_estimate},
                          {"load_h", h.load_h}});
    }
    doc["plan"] = horizons;
    emit(c, out, doc.dump(2));
  } else {
    std::string text = fmt::format("{} of {} horizons selected\n", plan.selected_count(),
                                   plan.horizons.size());
    text += result.to_text();
    emit(c, out, text);
  }
  return result.complete ? kOk : kLimits;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Event-point scheduling model compiler with legacy and compact changeover "
               "formulations"};
  app.name(args.empty() ? "chsched" : args[0]);
  app.require_subcommand(1);
  Config c;

  const std::vector<std::string> formulations = {"legacy", "compact"};
  const std::vector<std::string> window_modes = {"none", "assign", "explicit"};
  auto add_input = [&](CLI::App* sub, const char* what) {
    sub->add_option("input", c.input, what)->required()->check(CLI::ExistingFile);
  };
  auto add_model = [&](CLI::App* sub) {
    sub->add_option("--formulation", c.formulation, "legacy or compact")
        ->check(CLI::IsMember(formulations))
        ->capture_default_str();
    sub->add_option("--windows", c.windows,
                    "none, assign (legacy only) or explicit (compact only)")
        ->check(CLI::IsMember(window_modes))
        ->capture_default_str();
  };
  auto add_limits = [&](CLI::App* sub) {
    sub->add_option("--max-nodes", c.max_nodes, "branch-and-bound node limit per level")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--max-seconds", c.max_seconds, "wall-clock limit for the whole solve")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  };
  auto add_out = [&](CLI::App* sub, const char* what) {
    sub->add_option("--out", c.out, what);
  };
  auto add_json = [&](CLI::App* sub) {
    sub->add_flag("--json", c.json, "print the report as JSON");
  };

  CLI::App* validate_cmd = app.add_subcommand("validate", "check an instance document");
  add_input(validate_cmd, "instance JSON");
  add_json(validate_cmd);

  CLI::App* build_cmd = app.add_subcommand("build", "compile and print constraint counts");
  add_input(build_cmd, "instance JSON");
  add_model(build_cmd);
  add_out(build_cmd, "write the report to this file");
  add_json(build_cmd);

  CLI::App* export_cmd = app.add_subcommand("export", "write the model as MPS or LP");
  add_input(export_cmd, "instance JSON");
  add_model(export_cmd);
  export_cmd->add_option("--format", c.format, "mps or lp")
      ->check(CLI::IsMember({"mps", "lp"}))
      ->capture_default_str();
  add_out(export_cmd, "output file (default stdout)");

  CLI::App* solve_cmd = app.add_subcommand("solve", "solve and print the verified schedule");
  add_input(solve_cmd, "instance JSON");
  add_model(solve_cmd);
  add_limits(solve_cmd);
  add_out(solve_cmd, "write the report to this file");
  add_json(solve_cmd);

  CLI::App* compare_cmd = app.add_subcommand(
      "compare", "solve with both formulations and compare objective vectors");
  compare_cmd->add_option("input", c.input, "instance JSON (omit to run the random suite)")
      ->check(CLI::ExistingFile);
  compare_cmd->add_option("--seed", c.seed,
                          fmt::format("first seed of a {}-instance random suite", kSuiteSize));
  add_limits(compare_cmd);
  add_out(compare_cmd, "write the CSV report to this file");
  add_json(compare_cmd);

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "constraint growth over a grid");
  sweep_cmd->add_option("--grid", c.grid, "n_max list:task-count list")
      ->capture_default_str();
  add_out(sweep_cmd, "write the CSV report to this file");
  add_json(sweep_cmd);

  CLI::App* rolling_cmd =
      app.add_subcommand("rolling", "plan 12 h horizons and solve them in sequence");
  add_input(rolling_cmd, "month JSON");
  rolling_cmd->add_option("--formulation", c.formulation, "legacy or compact")
      ->check(CLI::IsMember(formulations))
      ->capture_default_str();
  add_limits(rolling_cmd);
  rolling_cmd->add_option("--binary-budget", c.binary_budget,
                          "estimated binaries allowed per horizon")
      ->capture_default_str();
  rolling_cmd->add_option("--load-budget", c.load_budget,
                          "main-unit hours allowed per horizon")
      ->capture_default_str();
  add_out(rolling_cmd, "write the report to this file");
  add_json(rolling_cmd);

  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (validate_cmd->parsed()) return cmd_validate(c, out);
    if (build_cmd->parsed()) return cmd_build(c, out);
    if (export_cmd->parsed()) return cmd_export(c, out);
    if (solve_cmd->parsed()) return cmd_solve(c, out, err);
    if (compare_cmd->parsed()) return cmd_compare(c, out);
    if (sweep_cmd->parsed()) return cmd_sweep(c, out);
    if (rolling_cmd->parsed()) return cmd_rolling(c, out);
  } catch (const Exit& e) {
    err << e.message << "\n";
    return e.code;
  } catch (const ValidationError& e) {
    for (const std::string& m : e.messages()) err << m << "\n";
    return kInvalidInput;
  } catch (const ParseError& e) {
    err << e.what() << "\n";
    return kInvalidInput;
  } catch (const VerificationError& e) {
    err << "verification failed: " << e.what() << "\n";
    return kVerification;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kVerification;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace chsched::cli
