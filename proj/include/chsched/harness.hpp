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

#ifndef CHSCHED_HARNESS_HPP_
#define CHSCHED_HARNESS_HPP_

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chsched/compile.hpp"
#include "chsched/instance.hpp"
#include "chsched/solver.hpp"

namespace chsched {

// One main unit U1 with P1 tasks A, B, NP1 task C, changeover tasks CO (C)
// and CO1 (C1), all six ordered Ctime values positive, n_max = 4, H = 12.
// Demands on PA and PC make A then C the cheapest plan without windows.
Instance fixture_ex1();

// --- equivalence -----------------------------------------------------------

struct FormulationOutcome {
  SolveStatus status = SolveStatus::kInfeasible;
  std::vector<double> objective_vector;
  SolveStats stats;
  // Empty when decode() accepted the solution or there was nothing to decode.
  std::string verification_error;
  double max_residual = 0.0;
};

struct EquivalenceRow {
  std::string key;
  FormulationOutcome legacy;
  FormulationOutcome compact;
  // Both solves finished with status optimal or both infeasible.
  bool conclusive = false;
  // Objective vectors agree level by level within the tolerance.
  bool match = false;
};

struct EquivalenceReport {
  std::vector<EquivalenceRow> rows;

  int matches() const;
  int inconclusive() const;
  bool all_match() const { return matches() == static_cast<int>(rows.size()); }
  bool all_verified() const;
  std::string to_csv() const;
  std::string to_text() const;
};

inline constexpr double kEquivalenceTolerance = 1e-6;

// Solves the instance with both formulations (no windows) and compares the
// lexicographic objective vectors.
EquivalenceRow check_equivalence(const Instance& instance, const Limits& limits,
                                 std::string key = "instance");

// Rows come back in input order whatever the thread count.
EquivalenceReport check_equivalence_suite(
    const std::vector<std::pair<std::string, Instance>>& instances, const Limits& limits);

// Small random plant: up to 2 units (the second sometimes subsidiary and fed
// by the first), 1-3 processing tasks per unit with mixed P1/NP1 classes,
// n_max in 2..4, every ordered Ctime on a main unit positive, and demands on
// 0-3 products. Deterministic in `seed`.
Instance random_small_instance(unsigned seed);
std::vector<std::pair<std::string, Instance>> random_suite(int count, unsigned seed);

// One main unit with 2-3 processing tasks, two demanded products on
// different tasks (so a feasible optimum runs a changeover), and random
// non-overlapping windows for both classes.
Instance random_window_instance(unsigned seed);

// --- growth ----------------------------------------------------------------

struct GridPoint {
  int n_max = 4;
  int tasks = 3;
  int p1 = 2;  // P1 tasks; the rest are NP1
};

struct GrowthRow {
  GridPoint point;
  long legacy = 0;  // changeover-group constraint totals
  long compact = 0;
  long legacy_closed_form = 0;
  long compact_closed_form = 0;
  long legacy_x = 0;
  long compact_x = 0;
  long legacy_ch2 = 0;
  long compact_new1 = 0;
  double ratio = 0.0;

  bool closed_form_ok() const {
    return legacy == legacy_closed_form && compact == compact_closed_form;
  }
};

struct GrowthReport {
  std::vector<GrowthRow> rows;

  const GrowthRow* find(int n_max, int tasks) const;
  // Least-squares slope of log(count) against log(n_max) over the rows with
  // the given task count.
  double legacy_slope(int tasks) const;
  double compact_slope(int tasks) const;
  std::string to_csv() const;
  std::string to_text() const;
};

// {4, 8, 16} x {3, 8} with p1 = ceil(tasks / 2).
std::vector<GridPoint> default_grid();
// "4,8,16:3,8" -> cartesian product, p1 = ceil(tasks / 2). Throws Error.
std::vector<GridPoint> parse_grid(std::string_view text);

long legacy_closed_form(const GridPoint& p);
long compact_closed_form(const GridPoint& p);

// Compile-only: one main unit at changeover density 1 per grid point.
GrowthReport measure_growth(const std::vector<GridPoint>& grid);

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace chsched

#endif  // CHSCHED_HARNESS_HPP_
