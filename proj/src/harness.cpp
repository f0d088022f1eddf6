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

#include "chsched/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <thread>

#include <fmt/format.h>

#include "chsched/random.hpp"
#include "chsched/schedule.hpp"

namespace chsched {
namespace {

// Runs body(k) for k in [0, count) on up to hardware_concurrency threads.
template <typename Body>
void parallel_for(size_t count, Body body) {
  const size_t workers =
      std::min<size_t>(count, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (size_t k = 0; k < count; ++k) body(k);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (size_t k = next++; k < count; k = next++) body(k);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

FormulationOutcome run(const Instance& instance, Formulation f, const Limits& limits) {
  const auto compiled = compile(instance, f);
  const SolveResult result = solve(compiled->model, limits);
  FormulationOutcome out;
  out.status = result.status;
  out.objective_vector = result.objective_vector;
  out.stats = result.stats;
  if (result.status == SolveStatus::kOptimal) {
    try {
      const Schedule schedule = decode(*compiled, result);
      out.max_residual = schedule.report.max_residual;
    } catch (const VerificationError& e) {
      out.verification_error = e.what();
    }
  }
  return out;
}

std::string join(const std::vector<double>& values, std::string_view sep) {
  std::string text;
  for (size_t k = 0; k < values.size(); ++k) {
    if (k > 0) text += sep;
    text += format_number(values[k]);
  }
  return text;
}

void add_changeover_tasks(Instance& inst, const std::string& unit,
                          const std::vector<Task>& processing) {
  int p1 = 0;
  int np1 = 0;
  for (const Task& t : processing) (t.kind == TaskKind::kP1 ? p1 : np1)++;
  const int k = p1 + np1;
  if (p1 >= 2 || (np1 >= 1 && k >= 2)) {
    inst.tasks.push_back({unit + "CO", unit, TaskKind::kChangeoverC});
  }
  if (p1 >= 1 && np1 >= 1) {
    inst.tasks.push_back({unit + "CO1", unit, TaskKind::kChangeoverC1});
  }
}

void add_all_changeovers(Instance& inst, Rng& rng, const std::vector<Task>& processing) {
  for (const Task& a : processing) {
    for (const Task& b : processing) {
      if (a.id != b.id) inst.changeovers.push_back({a.id, b.id, 0.25 * rng.uniform(2, 12)});
    }
  }
}

void ensure_valid(const Instance& inst, std::string_view what, unsigned seed) {
  const auto problems = validate(inst);
  if (!problems.empty()) {
    throw Error(fmt::format("{} generator produced an invalid instance for seed {}: {}: {}",
                            what, seed, problems.front().entity, problems.front().rule));
  }
}

}  // namespace

Instance fixture_ex1() {
  Instance inst;
  inst.units = {{"U1", true}};
  inst.tasks = {
      {"A", "U1", TaskKind::kP1, 10.0, 10.0, 40.0},
      {"B", "U1", TaskKind::kP1, 10.0, 10.0, 40.0},
      {"C", "U1", TaskKind::kNP1, 5.0, 10.0, 40.0},
      {"CO", "U1", TaskKind::kChangeoverC},
      {"CO1", "U1", TaskKind::kChangeoverC1},
  };
  inst.states = {
      {"RAW", false, 0.0, 1000.0},
      {"PA", true, 20.0, 0.0},
      {"PB", true, 0.0, 0.0},
      {"PC", true, 20.0, 0.0},
  };
  for (const char* t : {"A", "B", "C"}) {
    inst.arcs.push_back({t, "RAW", ArcDirection::kConsumes, 1.0});
  }
  inst.arcs.push_back({"A", "PA", ArcDirection::kProduces, 1.0});
  inst.arcs.push_back({"B", "PB", ArcDirection::kProduces, 1.0});
  inst.arcs.push_back({"C", "PC", ArcDirection::kProduces, 1.0});
  inst.changeovers = {
      {"A", "B", 1.0}, {"B", "A", 1.5}, {"A", "C", 2.0},
      {"C", "A", 3.0}, {"B", "C", 2.5}, {"C", "B", 3.5},
  };
  inst.horizon_h = 12.0;
  inst.n_max = 4;
  inst.windows.c = {{0.0, 4.0}, {7.0, 12.0}};
  inst.windows.c1 = {{7.5, 12.0}};
  return inst;
}

// --- equivalence -------------------------------------------------------------

int EquivalenceReport::matches() const {
  return static_cast<int>(
      std::count_if(rows.begin(), rows.end(), [](const auto& r) { return r.match; }));
}

int EquivalenceReport::inconclusive() const {
  return static_cast<int>(std::count_if(rows.begin(), rows.end(),
                                        [](const auto& r) { return !r.conclusive; }));
}

bool EquivalenceReport::all_verified() const {
  return std::all_of(rows.begin(), rows.end(), [](const auto& r) {
    return r.legacy.verification_error.empty() && r.compact.verification_error.empty();
  });
}

std::string EquivalenceReport::to_csv() const {
  std::string text =
      "key,legacy_status,legacy_objectives,legacy_nodes,legacy_seconds,"
      "compact_status,compact_objectives,compact_nodes,compact_seconds,conclusive,match\n";
  for (const EquivalenceRow& r : rows) {
    text += fmt::format("{},{},{},{},{:.4f},{},{},{},{:.4f},{},{}\n", r.key,
                        to_string(r.legacy.status), join(r.legacy.objective_vector, ";"),
                        r.legacy.stats.nodes, r.legacy.stats.wall_seconds,
                        to_string(r.compact.status), join(r.compact.objective_vector, ";"),
                        r.compact.stats.nodes, r.compact.stats.wall_seconds,
                        r.conclusive ? 1 : 0, r.match ? 1 : 0);
  }
  return text;
}

std::string EquivalenceReport::to_text() const {
  std::string text;
  for (const EquivalenceRow& r : rows) {
    text += fmt::format("{:<12} {:<9} legacy [{}] ({} nodes)  compact [{}] ({} nodes)\n",
                        r.key, r.match ? "MATCH" : (r.conclusive ? "MISMATCH" : "INCONCLUSIVE"),
                        join(r.legacy.objective_vector, ", "), r.legacy.stats.nodes,
                        join(r.compact.objective_vector, ", "), r.compact.stats.nodes);
    for (const auto* o : {&r.legacy, &r.compact}) {
      if (!o->verification_error.empty()) {
        text += fmt::format("  verification failed: {}\n", o->verification_error);
      }
    }
  }
  text += fmt::format("{} of {} instances match", matches(), rows.size());
  if (inconclusive() > 0) text += fmt::format(", {} inconclusive", inconclusive());
  text += "\n";
  return text;
}

EquivalenceRow check_equivalence(const Instance& instance, const Limits& limits,
                                 std::string key) {
  EquivalenceRow row;
  row.key = std::move(key);
  row.legacy = run(instance, Formulation::kLegacy, limits);
  row.compact = run(instance, Formulation::kCompact, limits);
  const auto finished = [](SolveStatus s) {
    return s == SolveStatus::kOptimal || s == SolveStatus::kInfeasible;
  };
  row.conclusive = finished(row.legacy.status) && finished(row.compact.status);
  if (!row.conclusive) return row;
  if (row.legacy.status != row.compact.status) return row;
  const auto& a = row.legacy.objective_vector;
  const auto& b = row.compact.objective_vector;
  row.match = a.size() == b.size();
  for (size_t k = 0; row.match && k < a.size(); ++k) {
    row.match = std::abs(a[k] - b[k]) <= kEquivalenceTolerance;
  }
  return row;
}

EquivalenceReport check_equivalence_suite(
    const std::vector<std::pair<std::string, Instance>>& instances, const Limits& limits) {
  EquivalenceReport report;
  report.rows.resize(instances.size());
  parallel_for(instances.size(), [&](size_t k) {
    report.rows[k] = check_equivalence(instances[k].second, limits, instances[k].first);
  });
  return report;
}

Instance random_small_instance(unsigned seed) {
  Rng rng(seed);
  Instance inst;
  inst.horizon_h = 12.0;
  inst.n_max = rng.uniform(2, 4);
  inst.windows.c = {{0.0, 4.0}, {7.0, 12.0}};
  inst.windows.c1 = {{7.5, 12.0}};
  inst.states.push_back({"RAW", false, 0.0, 1000.0});

  const int n_units = rng.uniform(1, 2);
  // A second unit is subsidiary a third of the time and then refines an
  // intermediate made on the first unit.
  const bool chained = n_units == 2 && rng.uniform(0, 2) == 0;
  std::vector<std::string> products;
  for (int u = 1; u <= n_units; ++u) {
    const std::string unit = fmt::format("U{}", u);
    const bool main = !(chained && u == 2);
    inst.units.push_back({unit, main});
    std::vector<Task> processing;
    const int k = rng.uniform(1, 3);
    for (int t = 1; t <= k; ++t) {
      const std::string id = fmt::format("U{}T{}", u, t);
      const TaskKind kind = rng.coin() ? TaskKind::kP1 : TaskKind::kNP1;
      const double rate = 5.0 * rng.uniform(1, 4);
      const double b_min = 5.0 * rng.uniform(1, 3);
      const double b_max = b_min + 5.0 * rng.uniform(2, 6);
      processing.push_back({id, unit, kind, rate, b_min, b_max});
      inst.tasks.push_back(processing.back());

      const std::string product = "P_" + id;
      inst.states.push_back({product, true, 0.0, 0.0});
      products.push_back(product);
      const bool feeder = chained && u == 1 && t == 1;
      if (feeder) {
        inst.states.push_back({"I", false, 0.0, 0.0});
        inst.arcs.push_back({id, "I", ArcDirection::kProduces, 0.5});
      }
      inst.arcs.push_back({id, main ? "RAW" : "I", ArcDirection::kConsumes, 1.0});
      inst.arcs.push_back({id, product, ArcDirection::kProduces, feeder ? 0.5 : 1.0});
    }
    if (main) {
      add_changeover_tasks(inst, unit, processing);
      add_all_changeovers(inst, rng, processing);
    }
  }

  rng.shuffle(products);
  const int demanded = rng.uniform(0, std::min<int>(3, static_cast<int>(products.size())));
  for (int d = 0; d < demanded; ++d) {
    for (State& s : inst.states) {
      if (s.id == products[d]) s.demand = 5.0 * rng.uniform(2, 6);
    }
  }
  ensure_valid(inst, "random suite", seed);
  return inst;
}

std::vector<std::pair<std::string, Instance>> random_suite(int count, unsigned seed) {
  std::vector<std::pair<std::string, Instance>> suite;
  for (int k = 0; k < count; ++k) {
    const unsigned s = seed + static_cast<unsigned>(k);
    suite.emplace_back(fmt::format("seed{}", s), random_small_instance(s));
  }
  return suite;
}

Instance random_window_instance(unsigned seed) {
  Rng rng(seed);
  Instance inst;
  inst.horizon_h = 12.0;
  inst.n_max = 4;
  inst.units = {{"U1", true}};
  inst.states.push_back({"RAW", false, 0.0, 1000.0});

  std::vector<Task> processing;
  const int k = rng.uniform(2, 3);
  for (int t = 1; t <= k; ++t) {
    const std::string id = fmt::format("T{}", t);
    // At least one task of each class so both window lists matter.
    const TaskKind kind = t == 1   ? TaskKind::kP1
                          : t == 2 ? TaskKind::kNP1
                                   : (rng.coin() ? TaskKind::kP1 : TaskKind::kNP1);
    processing.push_back({id, "U1", kind, 10.0, 10.0, 30.0});
    inst.tasks.push_back(processing.back());
    inst.states.push_back({"P_" + id, true, 0.0, 0.0});
    inst.arcs.push_back({id, "RAW", ArcDirection::kConsumes, 1.0});
    inst.arcs.push_back({id, "P_" + id, ArcDirection::kProduces, 1.0});
  }
  add_changeover_tasks(inst, "U1", processing);
  add_all_changeovers(inst, rng, processing);

  // Demands on the P1 task and the NP1 task; 10-20 units take 1-2 h each.
  inst.states[1].demand = 5.0 * rng.uniform(2, 4);
  inst.states[2].demand = 5.0 * rng.uniform(2, 4);

  // Blocked gaps of 1-3 h somewhere in the middle of the day.
  const double c_split = 0.5 * rng.uniform(6, 10);
  const double c_gap = 0.5 * rng.uniform(2, 6);
  inst.windows.c = {{0.0, c_split}, {c_split + c_gap, 12.0}};
  const double c1_start = 0.5 * rng.uniform(0, 4);
  const double c1_split = 0.5 * rng.uniform(10, 14);
  const double c1_gap = 0.5 * rng.uniform(2, 4);
  inst.windows.c1 = {{c1_start, c1_split}, {c1_split + c1_gap, 12.0}};
  ensure_valid(inst, "window", seed);
  return inst;
}

// --- growth ----------------------------------------------------------------

std::vector<GridPoint> default_grid() { return parse_grid("4,8,16:3,8"); }

std::vector<GridPoint> parse_grid(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw Error(fmt::format("grid '{}' must look like 4,8,16:3,8", text));
  }
  auto numbers = [&](std::string_view part) {
    std::vector<int> out;
    size_t pos = 0;
    while (pos <= part.size()) {
      const size_t comma = std::min(part.find(',', pos), part.size());
      const std::string_view item = part.substr(pos, comma - pos);
      int value = 0;
      const auto [end, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
      if (item.empty() || ec != std::errc() || end != item.data() + item.size() ||
          value < 1) {
        throw Error(fmt::format("grid '{}': '{}' is not a positive integer", text, item));
      }
      out.push_back(value);
      pos = comma + 1;
    }
    return out;
  };
  std::vector<GridPoint> grid;
  for (int tasks : numbers(text.substr(colon + 1))) {
    for (int n : numbers(text.substr(0, colon))) grid.push_back({n, tasks, (tasks + 1) / 2});
  }
  return grid;
}

long legacy_closed_form(const GridPoint& p) {
  const long n = p.n_max;
  const long k = p.tasks;
  const long np1 = k - p.p1;
  const long pairs = k * (k - 1);
  const bool has_c = p.p1 >= 2 || (np1 >= 1 && k >= 2);
  const bool has_c1 = p.p1 >= 1 && np1 >= 1;
  return pairs * (n - 1) + 2 * pairs * n * (n - 1) / 2 +
         2 * (n - 1) * ((has_c ? 1 : 0) + (has_c1 ? 1 : 0));
}

long compact_closed_form(const GridPoint& p) {
  const long n = p.n_max;
  const long k = p.tasks;
  const long np1 = k - p.p1;
  const bool has_c = p.p1 >= 2 || (np1 >= 1 && k >= 2);
  const bool has_c1 = p.p1 >= 1 && np1 >= 1;
  long total = k * n + k * (n - 1);
  if (has_c) total += 2 * (p.p1 + np1) * (n - 1);
  if (has_c1) total += 2 * p.p1 * (n - 1);
  return total;
}

const GrowthRow* GrowthReport::find(int n_max, int tasks) const {
  for (const GrowthRow& r : rows) {
    if (r.point.n_max == n_max && r.point.tasks == tasks) return &r;
  }
  return nullptr;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error("slope needs two or more points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(x.size());
  for (size_t k = 0; k < x.size(); ++k) {
    const double lx = std::log(x[k]);
    const double ly = std::log(y[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

double GrowthReport::legacy_slope(int tasks) const {
  std::vector<double> x, y;
  for (const GrowthRow& r : rows) {
    if (r.point.tasks != tasks) continue;
    x.push_back(r.point.n_max);
    y.push_back(static_cast<double>(r.legacy));
  }
  return loglog_slope(x, y);
}

double GrowthReport::compact_slope(int tasks) const {
  std::vector<double> x, y;
  for (const GrowthRow& r : rows) {
    if (r.point.tasks != tasks) continue;
    x.push_back(r.point.n_max);
    y.push_back(static_cast<double>(r.compact));
  }
  return loglog_slope(x, y);
}

std::string GrowthReport::to_csv() const {
  std::string text =
      "n_max,tasks,p1,legacy,compact,legacy_closed_form,compact_closed_form,"
      "legacy_x,compact_x,legacy_ch2,compact_new1,ratio\n";
  for (const GrowthRow& r : rows) {
    text += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{:.4f}\n", r.point.n_max,
                        r.point.tasks, r.point.p1, r.legacy, r.compact,
                        r.legacy_closed_form, r.compact_closed_form, r.legacy_x,
                        r.compact_x, r.legacy_ch2, r.compact_new1, r.ratio);
  }
  return text;
}

std::string GrowthReport::to_text() const {
  std::string text = fmt::format("{:>5} {:>5} {:>3} {:>9} {:>8} {:>7} {:>9} {:>9}  {}\n",
                                 "n_max", "tasks", "p1", "legacy", "compact", "ratio",
                                 "legacy_x", "compact_x", "closed form");
  for (const GrowthRow& r : rows) {
    text += fmt::format("{:>5} {:>5} {:>3} {:>9} {:>8} {:>7.2f} {:>9} {:>9}  {}\n",
                        r.point.n_max, r.point.tasks, r.point.p1, r.legacy, r.compact,
                        r.ratio, r.legacy_x, r.compact_x,
                        r.closed_form_ok() ? "ok" : "MISMATCH");
  }
  return text;
}

GrowthReport measure_growth(const std::vector<GridPoint>& grid) {
  GrowthReport report;
  report.rows.resize(grid.size());
  parallel_for(grid.size(), [&](size_t k) {
    const GridPoint& p = grid[k];
    if (p.p1 < 0 || p.p1 > p.tasks) throw Error("grid point p1 out of range");
    FamilySpec spec;
    spec.n_units = 1;
    spec.tasks_per_unit = p.tasks;
    spec.p1_fraction = static_cast<double>(p.p1) / p.tasks;
    spec.n_max = p.n_max;
    spec.changeover_density = 1.0;
    spec.seed = 1;
    const Instance inst = generate_family(spec);
    const CountReport legacy = count(compile(inst, Formulation::kLegacy)->model);
    const CountReport compact = count(compile(inst, Formulation::kCompact)->model);
    GrowthRow& row = report.rows[k];
    row.point = p;
    row.legacy = legacy.groups_with_prefix("legacy.");
    row.compact = compact.groups_with_prefix("compact.");
    row.legacy_closed_form = legacy_closed_form(p);
    row.compact_closed_form = compact_closed_form(p);
    row.legacy_x = legacy.variables("x");
    row.compact_x = compact.variables("x");
    row.legacy_ch2 = legacy.group("legacy.ch2");
    row.compact_new1 = compact.group("compact.new1");
    row.ratio = static_cast<double>(row.legacy) / static_cast<double>(row.compact);
  });
  return report;
}

}  // namespace chsched
