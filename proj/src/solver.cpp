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

#include "chsched/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>

#include "chsched/errors.hpp"

namespace chsched {
namespace {

using Clock = std::chrono::steady_clock;

enum class Outcome { kSolved, kInfeasible, kNodeLimit, kTimeLimit };

struct LevelResult {
  Outcome outcome = Outcome::kInfeasible;
  double value = 0.0;
  std::vector<double> x;
};

struct Node {
  long id = 0;
  long parent = -1;
  int depth = 0;
  double parent_bound = -kInf;
  std::vector<std::pair<int, std::int8_t>> fixes;
  std::shared_ptr<const Basis> basis;
};

double dot(const std::vector<double>& cost, std::span<const double> x) {
  double z = 0.0;
  for (size_t j = 0; j < cost.size(); ++j) z += cost[j] * x[j];
  return z;
}

double row_violation(const LpRow& row, std::span<const double> x) {
  double a = 0.0;
  for (const Term& t : row.terms) a += t.coef * x[t.var.value];
  switch (row.sense) {
    case Sense::kLe:
      return std::max(0.0, a - row.rhs);
    case Sense::kGe:
      return std::max(0.0, row.rhs - a);
    case Sense::kEq:
      return std::abs(a - row.rhs);
  }
  return 0.0;
}

class LevelSearch {
 public:
  LevelSearch(const LinearModel& model, const std::vector<LpRow>& rows,
              std::vector<double> cost, const Limits& limits, const Tolerances& tol,
              Clock::time_point start, SolveStats& stats)
      : model_(model),
        rows_(rows),
        cost_(std::move(cost)),
        limits_(limits),
        tol_(tol),
        start_(start),
        stats_(stats) {
    const int n = model.num_variables();
    root_lo_.resize(n);
    root_hi_.resize(n);
    for (int j = 0; j < n; ++j) {
      const Variable& v = model.variables()[j];
      root_lo_[j] = v.lo;
      root_hi_[j] = v.hi;
      if (v.kind == VarKind::kBinary) binaries_.push_back(j);
    }
  }

  LevelResult run(const std::vector<double>& seed) {
    const int n = model_.num_variables();
    BoundedSimplex lp(n, rows_, root_lo_, root_hi_, cost_, tol_);
    const long base_iterations = stats_.lp_iterations;
    auto sync_iterations = [&] { stats_.lp_iterations = base_iterations + lp.iterations(); };

    LevelResult result;
    double best = kInf;
    if (!seed.empty()) {
      best = dot(cost_, seed);
      result.x = seed;
    }
    auto gap_reached = [&](double bound) { return bound >= best - tol_.objective_gap; };

    // -1 free, otherwise the fixed value of each binary in lp.
    std::vector<std::int8_t> current(n, -1);
    std::vector<std::int8_t> wanted(n, -1);
    auto apply = [&](const std::vector<std::pair<int, std::int8_t>>& fixes) {
      for (int j : binaries_) wanted[j] = -1;
      for (const auto& [j, v] : fixes) wanted[j] = v;
      for (int j : binaries_) {
        if (wanted[j] == current[j]) continue;
        current[j] = wanted[j];
        if (wanted[j] < 0) {
          lp.set_bounds(j, root_lo_[j], root_hi_[j]);
        } else {
          lp.set_bounds(j, wanted[j], wanted[j]);
        }
      }
    };

    std::vector<Node> open;
    open.push_back(Node{});
    long next_id = 1;
    long last_solved = -1;

    while (!open.empty()) {
      size_t pick = 0;
      for (size_t k = 1; k < open.size(); ++k) {
        const Node& a = open[k];
        const Node& b = open[pick];
        if (a.depth != b.depth) {
          if (a.depth > b.depth) pick = k;
        } else if (a.parent_bound != b.parent_bound) {
          if (a.parent_bound < b.parent_bound) pick = k;
        } else if (a.id > b.id) {
          pick = k;
        }
      }
      Node node = std::move(open[pick]);
      open.erase(open.begin() + static_cast<long>(pick));
      if (gap_reached(node.parent_bound)) continue;

      if (node.depth > 0 && stats_.nodes >= limits_.max_nodes) {
        result.outcome = Outcome::kNodeLimit;
        break;
      }
      if (std::chrono::duration<double>(Clock::now() - start_).count() >
          limits_.max_seconds) {
        result.outcome = Outcome::kTimeLimit;
        break;
      }

      apply(node.fixes);
      if (node.basis && node.parent != last_solved) lp.load_basis(*node.basis);
      const LpStatus status = lp.solve();
      if (node.depth > 0) ++stats_.nodes;
      last_solved = node.id;
      if (status == LpStatus::kUnbounded) {
        throw NumericalError("LP relaxation is unbounded; objective levels must be bounded");
      }
      if (status == LpStatus::kInfeasible) continue;
      const double bound = lp.objective();
      if (gap_reached(bound)) continue;

      const std::span<const double> x = lp.values();
      int branch = -1;
      double widest = tol_.integrality;
      for (int j : binaries_) {
        const double frac = std::abs(x[j] - std::round(x[j]));
        if (frac > widest) {
          widest = frac;
          branch = j;
        }
      }

      if (branch < 0) {
        std::vector<double> candidate(x.begin(), x.end());
        for (int j : binaries_) {
          candidate[j] = std::round(candidate[j]);
          current[j] = static_cast<std::int8_t>(candidate[j]);
          lp.set_bounds(j, candidate[j], candidate[j]);
        }
        // Re-solving with every binary fixed clears the integrality residue
        // from the continuous part.
        if (lp.solve() == LpStatus::kOptimal) {
          candidate.assign(lp.values().begin(), lp.values().end());
          for (int j : binaries_) candidate[j] = std::round(candidate[j]);
        }
        last_solved = -1;
        if (acceptable(candidate)) {
          const double value = dot(cost_, candidate);
          if (value < best) {
            best = value;
            result.x = std::move(candidate);
          }
        }
        continue;
      }

      auto basis = std::make_shared<const Basis>(lp.basis());
      const std::int8_t preferred = x[branch] >= 0.5 ? 1 : 0;
      for (std::int8_t v : {static_cast<std::int8_t>(1 - preferred), preferred}) {
        Node child;
        child.id = next_id++;
        child.parent = node.id;
        child.depth = node.depth + 1;
        child.parent_bound = bound;
        child.fixes = node.fixes;
        child.fixes.emplace_back(branch, v);
        child.basis = basis;
        open.push_back(std::move(child));
      }
    }
    sync_iterations();

    if (open.empty() && result.outcome != Outcome::kNodeLimit &&
        result.outcome != Outcome::kTimeLimit) {
      result.outcome = result.x.empty() ? Outcome::kInfeasible : Outcome::kSolved;
    }
    if (!result.x.empty()) result.value = best;
    return result;
  }

 private:
  bool acceptable(std::span<const double> x) const {
    if (max_violation(model_, x) > tol_.verification) return false;
    for (const LpRow& row : rows_) {
      if (row_violation(row, x) > tol_.verification) return false;
    }
    return true;
  }

  const LinearModel& model_;
  const std::vector<LpRow>& rows_;
  std::vector<double> cost_;
  const Limits& limits_;
  const Tolerances& tol_;
  Clock::time_point start_;
  SolveStats& stats_;
  std::vector<double> root_lo_, root_hi_;
  std::vector<int> binaries_;
};

}  // namespace

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal:
      return "optimal";
    case SolveStatus::kInfeasible:
      return "infeasible";
    case SolveStatus::kNodeLimit:
      return "node_limit";
    case SolveStatus::kTimeLimit:
      return "time_limit";
  }
  return "?";
}

double max_violation(const LinearModel& model, std::span<const double> x) {
  double worst = 0.0;
  for (const Constraint& c : model.constraints()) worst = std::max(worst, violation(c, x));
  for (int j = 0; j < model.num_variables(); ++j) {
    const Variable& v = model.variables()[j];
    worst = std::max({worst, v.lo - x[j], x[j] - v.hi});
    if (v.kind == VarKind::kBinary) {
      worst = std::max(worst, std::abs(x[j] - std::round(x[j])));
    }
  }
  return worst;
}

SolveResult solve(const LinearModel& model, const Limits& limits, const Tolerances& tol) {
  const Clock::time_point start = Clock::now();
  const int n = model.num_variables();
  SolveResult out;

  std::vector<LpRow> rows;
  rows.reserve(model.num_constraints() + model.objectives().size());
  for (const Constraint& c : model.constraints()) rows.push_back({c.terms, c.sense, c.rhs});

  std::vector<ObjectiveLevel> levels = model.objectives();
  std::stable_sort(levels.begin(), levels.end(),
                   [](const auto& a, const auto& b) { return a.priority < b.priority; });
  if (levels.empty()) levels.push_back(ObjectiveLevel{});

  std::vector<double> incumbent;
  out.status = SolveStatus::kOptimal;
  for (const ObjectiveLevel& level : levels) {
    std::vector<double> cost(n, 0.0);
    for (const Term& t : level.terms) cost[t.var.value] += t.coef;
    LevelSearch search(model, rows, std::move(cost), limits, tol, start, out.stats);
    LevelResult r = search.run(incumbent);
    if (r.outcome == Outcome::kInfeasible) {
      out.status = SolveStatus::kInfeasible;
      out.objective_vector.clear();
      incumbent.clear();
      break;
    }
    if (!r.x.empty()) incumbent = std::move(r.x);
    if (r.outcome != Outcome::kSolved) {
      out.status = r.outcome == Outcome::kNodeLimit ? SolveStatus::kNodeLimit
                                                    : SolveStatus::kTimeLimit;
      if (!incumbent.empty()) out.objective_vector.push_back(r.value);
      break;
    }
    out.objective_vector.push_back(r.value);
    if (!level.terms.empty()) rows.push_back({level.terms, Sense::kLe, r.value + tol.level_slack});
  }
  out.assignment = std::move(incumbent);
  out.stats.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return out;
}

}  // namespace chsched
