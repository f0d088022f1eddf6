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

// Acceptance run: one PASS or FAIL line per criterion, exit status 1 when
// any criterion fails. Tolerances and limits are pinned here.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "chsched/compile.hpp"
#include "chsched/harness.hpp"
#include "chsched/legacy.hpp"
#include "chsched/rolling.hpp"
#include "chsched/schedule.hpp"
#include "chsched/solver.hpp"
#include "support.hpp"

using namespace chsched;
namespace t = chsched::testing;

namespace {

constexpr double kMatchTol = 1e-6;
constexpr double kWindowTol = 1e-6;
constexpr double kResidualTol = 1e-6;
constexpr double kGrowthSeconds = 5.0;
constexpr double kSuiteSeconds = 600.0;
constexpr double kOracleSeconds = 60.0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Closed forms recomputed from the index ranges of one main unit with k
// tasks, p1 of them P1, every ordered pair carrying a positive time.
long legacy_total(int k, int p1, int N) {
  const long pairs = static_cast<long>(k) * (k - 1);
  const int classes = int(p1 >= 2 || k - p1 >= 1) + int(p1 >= 1 && k - p1 >= 1);
  return pairs * (N - 1) + pairs * N * (N - 1) + 2L * (N - 1) * classes;
}

long compact_total(int k, int p1, int N) {
  const bool has_c = p1 >= 2 || k - p1 >= 1;
  const bool has_c1 = p1 >= 1 && k - p1 >= 1;
  return static_cast<long>(k) * (2 * N - 1) + (N - 1L) * (2L * k * has_c + 2L * p1 * has_c1);
}

Outcome growth() {
  const auto start = std::chrono::steady_clock::now();
  const GrowthReport report = measure_growth(default_grid());
  const double elapsed = seconds_since(start);
  bool exact = report.rows.size() == 6;
  for (const GrowthRow& r : report.rows) {
    const GridPoint& p = r.point;
    exact = exact && r.legacy == legacy_total(p.tasks, p.p1, p.n_max) &&
            r.compact == compact_total(p.tasks, p.p1, p.n_max) &&
            r.legacy_x == long(p.tasks) * (p.tasks - 1) * (p.n_max - 1) &&
            r.compact_x == long(p.tasks) * p.n_max;
  }
  const GrowthRow* big = report.find(16, 8);
  const double ratio = big ? double(big->legacy) / double(big->compact) : 0.0;
  const double x_ratio = big ? double(big->legacy_x) / double(big->compact_x) : 0.0;
  return {exact && ratio > 20.0 && x_ratio > 6.0 && elapsed < kGrowthSeconds,
          fmt::format("{} grid points exact={}, (16,8) ratio {:.2f} > 20, x ratio {:.2f} > 6, "
                      "{:.2f} s < {} s",
                      report.rows.size(), exact, ratio, x_ratio, elapsed, kGrowthSeconds)};
}

Outcome equivalence() {
  const auto start = std::chrono::steady_clock::now();
  const EquivalenceReport report = check_equivalence_suite(random_suite(50, 1000), Limits{});
  const double elapsed = seconds_since(start);
  double worst = 0.0;
  bool shapes = true;
  for (const EquivalenceRow& r : report.rows) {
    const auto& a = r.legacy.objective_vector;
    const auto& b = r.compact.objective_vector;
    shapes = shapes && r.legacy.status == SolveStatus::kOptimal &&
             r.compact.status == SolveStatus::kOptimal && a.size() == b.size();
    for (size_t k = 0; shapes && k < a.size(); ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
  }
  return {report.rows.size() == 50 && shapes && worst <= kMatchTol && elapsed < kSuiteSeconds,
          fmt::format("{} of {} instances, largest objective gap {:.2e} <= {:.0e}, {:.1f} s",
                      report.matches(), report.rows.size(), worst, kMatchTol, elapsed)};
}

Outcome rounding() {
  const std::vector<Window> allowed{{0, 4}, {7, 12}};
  const EventWindowAssignment a = assign_event_windows(allowed, 12, 8);
  const bool ok = a.counts == std::vector<int>{4, 4} &&
                  a.interval_of_event == std::vector<int>{0, 0, 0, 0, 1, 1, 1, 1};
  return {ok, fmt::format("eight points over [0,4] and [7,12] split {}/{}",
                          a.counts.size() > 0 ? a.counts[0] : -1,
                          a.counts.size() > 1 ? a.counts[1] : -1)};
}

// Number of windows of the changeover's class containing [start, finish].
int containing_windows(const Instance& inst, const ScheduleEntry& e) {
  const auto& windows = e.kind == TaskKind::kChangeoverC ? inst.windows.c : inst.windows.c1;
  int inside = 0;
  for (const Window& w : windows) {
    inside += e.start >= w.start - kWindowTol && e.finish <= w.end + kWindowTol;
  }
  return inside;
}

Outcome windows() {
  int placed = 0, misplaced = 0, z_mismatch = 0, failures = 0;
  for (unsigned seed = 1; seed <= 25; ++seed) {
    const Instance inst = random_window_instance(seed);
    for (const auto& [f, mode] : {std::pair{Formulation::kCompact, WindowMode::kExplicit},
                                  std::pair{Formulation::kLegacy, WindowMode::kAssign}}) {
      const auto compiled = compile(inst, f, mode);
      const SolveResult r = solve(compiled->model);
      if (r.status != SolveStatus::kOptimal) {
        ++failures;
        continue;
      }
      const Schedule s = decode(*compiled, r);
      for (const UnitSchedule& u : s.units) {
        for (const ScheduleEntry& e : u.entries) {
          if (is_processing(e.kind)) continue;
          ++placed;
          misplaced += containing_windows(inst, e) != 1;
        }
      }
      if (f != Formulation::kCompact) continue;
      std::map<std::pair<int, int>, long> picks;
      for (const auto& [key, var] : compiled->compact->z) {
        const auto [co, w, n] = key;
        picks[{co, n}] += std::lround(r.value(var));
      }
      for (const auto& [key, total] : picks) {
        z_mismatch += total != std::lround(r.value(compiled->core.wv(key.first, key.second)));
      }
    }
  }
  return {failures == 0 && misplaced == 0 && z_mismatch == 0 && placed > 0,
          fmt::format("{} changeovers placed, {} outside exactly one window, {} z/wv "
                      "mismatches, {} failed solves",
                      placed, misplaced, z_mismatch, failures)};
}

Outcome semantic_oracle() {
  const auto start = std::chrono::steady_clock::now();
  const Instance inst = fixture_ex1();
  const auto legacy = compile(inst, Formulation::kLegacy);
  const auto compact = compile(inst, Formulation::kCompact);
  const auto proc = compact->core.index().processing_on(0);
  const int k = static_cast<int>(proc.size());
  const int N = inst.n_max;

  std::vector<const Constraint*> rows;
  for (const Constraint& c : compact->model.constraints()) {
    if (c.group == "compact.new1" || c.group == "compact.copy") rows.push_back(&c);
  }
  auto feasible = [&](const std::vector<double>& x) {
    for (const Constraint* c : rows) {
      if (violation(*c, x) > 0.0) return false;
    }
    return true;
  };
  std::vector<VarId> xs;
  for (int i = 0; i < k; ++i) {
    for (int n = 1; n <= N; ++n) xs.push_back(compact->compact->at(proc[i], n));
  }

  int patterns = 0, infeasible = 0, not_minimal = 0, activation = 0;
  for (int code = 0; code < t::pattern_count(k, N); ++code) {
    ++patterns;
    const t::Pattern p = t::decode_pattern(code, k, N);
    std::vector<double> point = t::semantic_point(*compact, p);
    if (!feasible(point)) {
      ++infeasible;
      continue;
    }
    std::vector<double> semantic(xs.size());
    for (size_t j = 0; j < xs.size(); ++j) semantic[j] = point[xs[j].value];
    bool dominated = true;
    for (int bits = 0; bits < (1 << xs.size()); ++bits) {
      for (size_t j = 0; j < xs.size(); ++j) point[xs[j].value] = (bits >> j) & 1;
      if (!feasible(point)) continue;
      for (size_t j = 0; j < xs.size(); ++j) {
        dominated = dominated && point[xs[j].value] >= semantic[j];
      }
    }
    not_minimal += !dominated;

    auto fl = t::forced_changeovers(*legacy, t::semantic_point(*legacy, p));
    auto fc = t::forced_changeovers(*compact, t::semantic_point(*compact, p));
    for (const auto& [key, f] : fl) {
      const t::Forced g = fc[key];
      activation += f.active != g.active || std::abs(f.duration - g.duration) > kMatchTol;
    }
  }
  const double elapsed = seconds_since(start);
  return {infeasible == 0 && not_minimal == 0 && activation == 0 && elapsed < kOracleSeconds,
          fmt::format("{} patterns: {} infeasible, {} not minimal, {} activation mismatches, "
                      "{:.2f} s",
                      patterns, infeasible, not_minimal, activation, elapsed)};
}

Outcome mps() {
  int failures = 0, models = 0;
  for (unsigned seed = 1; seed <= 100; ++seed) {
    const LinearModel m = t::random_model(seed);
    const std::string text = export_mps(m);
    const LinearModel back = parse_mps(text);
    failures += canonical_form(back) != canonical_form(m) || export_mps(back) != text;
    ++models;
  }
  for (Formulation f : {Formulation::kLegacy, Formulation::kCompact}) {
    const auto compiled = compile(fixture_ex1(), f);
    const LinearModel back = parse_mps(export_mps(compiled->model));
    failures += canonical_form(back) != canonical_form(compiled->model) ||
                count(back).constraints_by_group != count(compiled->model).constraints_by_group;
    ++models;
  }
  return {failures == 0, fmt::format("{} of {} models round-trip", models - failures, models)};
}

Outcome verification() {
  double worst = 0.0;
  int decoded = 0, rejected = 0;
  for (const auto& [key, inst] : random_suite(50, 1000)) {
    for (Formulation f : {Formulation::kLegacy, Formulation::kCompact}) {
      const auto compiled = compile(inst, f);
      const SolveResult r = solve(compiled->model);
      if (r.status != SolveStatus::kOptimal) {
        ++rejected;
        continue;
      }
      worst = std::max(worst, max_violation(compiled->model, r.assignment));
      try {
        decode(*compiled, r);
        ++decoded;
      } catch (const VerificationError&) {
        ++rejected;
      }
    }
  }

  // Overlap A and C on EX1; decode must refuse it.
  const auto compiled = compile(fixture_ex1(), Formulation::kCompact);
  SolveResult r = solve(compiled->model);
  std::string broken = "none";
  if (r.status == SolveStatus::kOptimal) {
    const Schedule s = decode(*compiled, r);
    const ScheduleEntry *a = nullptr, *c = nullptr;
    for (const ScheduleEntry& e : s.units.at(0).entries) {
      if (e.task == "A") a = &e;
      if (e.task == "C") c = &e;
    }
    if (a && c) {
      const CoreBuild& core = compiled->core;
      const int ci = core.index().task_index("C");
      r.assignment[core.ts(ci, c->event).value] = a->start;
      r.assignment[core.tf(ci, c->event).value] = a->start + (c->finish - c->start);
      try {
        decode(*compiled, r);
      } catch (const VerificationError& e) {
        broken = e.rule();
      }
    }
  }
  return {worst <= kResidualTol && rejected == 0 && broken == kRuleNonOverlap,
          fmt::format("{} decoded, {} rejected, largest residual {:.2e} <= {:.0e}, corrupted "
                      "point fails on '{}'",
                      decoded, rejected, worst, kResidualTol, broken)};
}

// Terminal stock of each horizon recomputed from decoded batches and
// recorded deliveries.
double replay_gap(const Instance& plant, const HorizonOutcome& h) {
  std::map<std::string, double> stock = h.stock_in;
  if (h.schedule) {
    for (const UnitSchedule& u : h.schedule->units) {
      for (const ScheduleEntry& e : u.entries) {
        for (const StnArc& a : plant.arcs) {
          if (a.task != e.task) continue;
          const double sign = a.direction == ArcDirection::kProduces ? 1.0 : -1.0;
          stock[a.state] += sign * a.coefficient * e.batch;
        }
      }
    }
  }
  for (const auto& [state, amount] : h.delivered) stock[state] -= amount;
  double gap = 0.0;
  for (const auto& [state, amount] : h.stock_out) gap = std::max(gap, std::abs(amount - stock[state]));
  return gap;
}

Outcome rolling() {
  const MonthPlan month = load_month_file(t::data_path("month4.json"));
  const HorizonPlan plan = plan_horizons(month, Budgets{});
  const RollingResult legacy = run_rolling(plan, Formulation::kLegacy, Limits{});
  const RollingResult compact = run_rolling(plan, Formulation::kCompact, Limits{});
  bool ok = plan.selected_count() == 4 && legacy.complete && compact.complete &&
            legacy.horizons.size() == 4 && compact.horizons.size() == 4;
  int breaks = 0;
  double replay = 0.0, level1 = 0.0;
  for (size_t h = 0; ok && h < 4; ++h) {
    for (const RollingResult* r : {&legacy, &compact}) {
      if (h + 1 < 4) breaks += r->horizons[h].stock_out != r->horizons[h + 1].stock_in;
      replay = std::max(replay, replay_gap(month.plant, r->horizons[h]));
    }
    level1 = std::max(level1, std::abs(legacy.horizons[h].objective_vector[0] -
                                       compact.horizons[h].objective_vector[0]));
  }
  ok = ok && breaks == 0 && replay <= kMatchTol && level1 <= kMatchTol;
  return {ok, fmt::format("{} horizons, {} stock hand-over breaks, replay gap {:.2e}, "
                          "level-1 gap {:.2e}",
                          compact.horizons.size(), breaks, replay, level1)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"constraint growth", growth},
      {"objective equivalence", equivalence},
      {"event window rounding", rounding},
      {"changeover windows", windows},
      {"first-active semantics", semantic_oracle},
      {"MPS round-trip", mps},
      {"solution verification", verification},
      {"rolling horizons", rolling},
  };
  int failed = 0;
  for (size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s [%zu] %s: %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu of %zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
