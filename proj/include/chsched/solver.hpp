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

#ifndef CHSCHED_SOLVER_HPP_
#define CHSCHED_SOLVER_HPP_

#include <string_view>
#include <vector>

#include "chsched/lp.hpp"
#include "chsched/model.hpp"

namespace chsched {

struct Limits {
  long max_nodes = 2'000'000;
  double max_seconds = 3600.0;
};

enum class SolveStatus { kOptimal, kInfeasible, kNodeLimit, kTimeLimit };

std::string_view to_string(SolveStatus status);

struct SolveStats {
  long nodes = 0;  // branch-and-bound nodes below the root
  long lp_iterations = 0;
  double wall_seconds = 0.0;
};

struct SolveResult {
  SolveStatus status = SolveStatus::kInfeasible;
  // Optimal value of each objective level solved so far. On a limit this
  // holds the finished levels followed by the incumbent value of the level
  // that was interrupted.
  std::vector<double> objective_vector;
  // Indexed by VarId; empty when no feasible point was found.
  std::vector<double> assignment;
  SolveStats stats;

  bool has_solution() const { return !assignment.empty(); }
  double value(VarId v) const { return assignment[v.value]; }
};

// Lexicographic branch and bound. Each level is solved to optimality, then
// bounded by its value plus `tol.level_slack` while the next level is
// optimized. Nodes are explored depth first (deepest node, then best parent
// bound, then most recent), branching on the most fractional binary with
// ties broken by registration order.
SolveResult solve(const LinearModel& model, const Limits& limits = {},
                  const Tolerances& tol = {});

// Largest constraint violation of `x`, including variable bounds and binary
// integrality.
double max_violation(const LinearModel& model, std::span<const double> x);

}  // namespace chsched

#endif  // CHSCHED_SOLVER_HPP_
