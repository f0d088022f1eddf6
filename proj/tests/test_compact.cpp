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

#include <cmath>
#include <string>
#include <vector>

#include "chsched/compact.hpp"
#include "chsched/compile.hpp"
#include "chsched/harness.hpp"
#include "chsched/schedule.hpp"
#include "chsched/solver.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace chsched;
namespace t = chsched::testing;

namespace {

// Two P1 tasks with one-hour changeovers both ways and a demand on each.
Instance two_product_instance() {
  Instance inst;
  inst.units = {{"U1", true}};
  inst.tasks = {{"A", "U1", TaskKind::kP1, 10, 10, 10},
                {"B", "U1", TaskKind::kP1, 10, 10, 10},
                {"CO", "U1", TaskKind::kChangeoverC, 0, 0, 0}};
  inst.states = {{"R", false, 0, 100}, {"PA", true, 10, 0}, {"PB", true, 10, 0}};
  inst.arcs = {{"A", "R", ArcDirection::kConsumes, 1},
               {"A", "PA", ArcDirection::kProduces, 1},
               {"B", "R", ArcDirection::kConsumes, 1},
               {"B", "PB", ArcDirection::kProduces, 1}};
  inst.changeovers = {{"A", "B", 1}, {"B", "A", 1}};
  inst.horizon_h = 12;
  inst.n_max = 3;
  inst.windows.c = {{0, 4}, {7, 12}};
  return inst;
}

}  // namespace

TEST_CASE("EX1 group sizes") {
  auto compiled = compile(fixture_ex1(), Formulation::kCompact);
  const CountReport r = count(compiled->model);
  CHECK(r.group("compact.new1") == 12);
  CHECK(r.group("compact.copy") == 9);
  CHECK(r.group("compact.act_p1p1") == 6);
  CHECK(r.group("compact.act_np1") == 3);
  CHECK(r.group("compact.act_p1np1") == 6);
  CHECK(r.group("compact.dur_p1p1") == 6);
  CHECK(r.group("compact.dur_np1") == 3);
  CHECK(r.group("compact.dur_p1np1") == 6);
  CHECK(r.groups_with_prefix("compact.") == 51);
  CHECK(r.variables("x") == 12);
  CHECK(compiled->model.group_notes().count("compact.dur_p1np1") == 1);
}

TEST_CASE("eight tasks and sixteen event points") {
  auto compiled = compile(generate_family({1, 8, 0.5, 16, 1.0, 1}), Formulation::kCompact);
  const CountReport r = count(compiled->model);
  CHECK(r.groups_with_prefix("compact.") == 608);
  CHECK(r.variables("x") == 128);
}

TEST_CASE("new1 plus copy is k(2N - 1) per unit") {
  for (unsigned seed = 1; seed <= 40; ++seed) {
    const Instance inst = random_small_instance(seed);
    auto compiled = compile(inst, Formulation::kCompact);
    const CountReport r = count(compiled->model);
    PlantIndex idx(inst);
    long expect = 0;
    for (int u = 0; u < idx.num_units(); ++u) {
      if (!inst.units[u].is_main) continue;
      expect += static_cast<long>(idx.processing_on(u).size()) * (2 * inst.n_max - 1);
    }
    CHECK(r.group("compact.new1") + r.group("compact.copy") == expect);
  }
}

TEST_CASE("a lone processing task still gets its rows") {
  Instance inst = t::single_task_instance(10, 10, 20, 20, 3);
  inst.tasks.push_back({"CO", "U1", TaskKind::kChangeoverC, 0, 0, 0});
  auto compiled = compile(inst, Formulation::kCompact);
  const CountReport r = count(compiled->model);
  CHECK(r.group("compact.act_p1p1") == 2);
  CHECK(r.group("compact.dur_p1p1") == 2);
  for (const Constraint& c : compiled->model.constraints()) {
    if (c.group != "compact.act_p1p1") continue;
    // wv(CO, n+1) - wv(T, n) >= -1
    CHECK(c.terms.size() == 2);
    CHECK(c.rhs == -1.0);
  }
  SolveResult res = solve(compiled->model);
  REQUIRE(res.status == SolveStatus::kOptimal);
  CHECK(std::abs(res.objective_vector[1]) <= 1e-6);
}

TEST_CASE("the first-active-task assignment is feasible and minimal") {
  const Instance inst = fixture_ex1();
  auto compiled = compile(inst, Formulation::kCompact);
  const LinearModel& m = compiled->model;
  const auto proc = compiled->core.index().processing_on(0);
  const int k = static_cast<int>(proc.size());
  const int N = inst.n_max;
  std::vector<const Constraint*> rows;
  for (const Constraint& c : m.constraints()) {
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
    for (int n = 1; n <= N; ++n) xs.push_back(compiled->compact->at(proc[i], n));
  }

  for (int code = 0; code < t::pattern_count(k, N); ++code) {
    const t::Pattern p = t::decode_pattern(code, k, N);
    std::vector<double> point = t::semantic_point(*compiled, p);
    REQUIRE(feasible(point));

    std::vector<double> semantic(xs.size());
    for (size_t j = 0; j < xs.size(); ++j) semantic[j] = point[xs[j].value];
    // Every x satisfying new1 and copy dominates the semantic one.
    bool dominated = true;
    for (int bits = 0; bits < (1 << xs.size()); ++bits) {
      for (size_t j = 0; j < xs.size(); ++j) point[xs[j].value] = (bits >> j) & 1;
      if (!feasible(point)) continue;
      for (size_t j = 0; j < xs.size(); ++j) {
        dominated = dominated && point[xs[j].value] >= semantic[j];
      }
    }
    CHECK_MESSAGE(dominated, "pattern " << code);
  }
}

TEST_CASE("activations and durations agree with the pairwise rows") {
  const Instance inst = fixture_ex1();
  auto legacy = compile(inst, Formulation::kLegacy);
  auto compact = compile(inst, Formulation::kCompact);
  const auto proc = compact->core.index().processing_on(0);
  const int k = static_cast<int>(proc.size());
  int with_changeover = 0;
  for (int code = 0; code < t::pattern_count(k, inst.n_max); ++code) {
    const t::Pattern p = t::decode_pattern(code, k, inst.n_max);
    auto fl = t::forced_changeovers(*legacy, t::semantic_point(*legacy, p));
    auto fc = t::forced_changeovers(*compact, t::semantic_point(*compact, p));
    for (const auto& [key, f] : fl) {
      const t::Forced g = fc[key];
      CHECK_MESSAGE(f.active == g.active, "pattern " << code);
      CHECK(f.duration == doctest::Approx(g.duration));
      with_changeover += f.active ? 1 : 0;
    }
  }
  CHECK(with_changeover > 0);
}

TEST_CASE("window pick rows") {
  Instance inst = fixture_ex1();
  inst.horizon_h = 28;
  inst.windows.c = {{0, 4}, {7, 16}, {19, 28}};
  auto compiled = compile(inst, Formulation::kCompact, WindowMode::kExplicit);
  const CountReport r = count(compiled->model);
  CHECK(r.group("compact.win_pick") == 2 * inst.n_max);
  for (const Constraint& c : compiled->model.constraints()) {
    if (c.name.rfind("compact.win_pick[CO,", 0) == 0) {
      CHECK(c.terms.size() == 4);  // three z plus wv
    }
  }
  CHECK(r.variables("z") == (3 + 1) * inst.n_max);

  Instance no_c = fixture_ex1();
  no_c.windows.c.clear();
  CHECK_THROWS_AS(compile(no_c, Formulation::kCompact, WindowMode::kExplicit), Error);
  CHECK_THROWS_AS(compile(fixture_ex1(), Formulation::kCompact, WindowMode::kAssign),
                  Error);
}

TEST_CASE("changeovers are moved out of blocked hours") {
  const Instance inst = two_product_instance();
  auto compiled = compile(inst, Formulation::kCompact, WindowMode::kExplicit);
  SolveResult res = solve(compiled->model);
  REQUIRE(res.status == SolveStatus::kOptimal);
  CHECK(std::abs(res.objective_vector[0]) <= 1e-6);
  CHECK(res.objective_vector[1] == doctest::Approx(1.0));
  Schedule s = decode(*compiled, res);

  const CoreBuild& core = compiled->core;
  const int co = core.index().task_index("CO");
  int placed = 0;
  for (int n = 1; n <= inst.n_max; ++n) {
    if (res.value(core.wv(co, n)) < 0.5) {
      for (int w = 0; w < 2; ++w) CHECK(res.value(compiled->compact->z.at({co, w, n})) == 0);
      continue;
    }
    ++placed;
    const double ts = res.value(core.ts(co, n)), tf = res.value(core.tf(co, n));
    CHECK((tf <= 4 + 1e-6 || ts >= 7 - 1e-6));

    // The same plan with the changeover at 5:00-6:00 breaks a row whatever
    // window is picked.
    for (int pick = 0; pick < 2; ++pick) {
      std::vector<double> moved = res.assignment;
      moved[core.ts(co, n).value] = 5;
      moved[core.tf(co, n).value] = 6;
      for (int w = 0; w < 2; ++w) {
        moved[compiled->compact->z.at({co, w, n}).value] = w == pick ? 1 : 0;
      }
      CHECK(max_violation(compiled->model, moved) > 1e-6);
    }
  }
  CHECK(placed == 1);
}
