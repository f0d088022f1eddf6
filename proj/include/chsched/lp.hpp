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

#ifndef CHSCHED_LP_HPP_
#define CHSCHED_LP_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "chsched/model.hpp"

namespace chsched {

// Every numeric tolerance used by the LP and MIP solvers and by solution
// verification.
struct Tolerances {
  double feasibility = 1e-7;   // primal bound violation
  double optimality = 1e-9;    // reduced cost
  double pivot = 1e-9;         // smallest usable pivot element
  double integrality = 1e-6;   // binary distance from {0, 1}
  double objective_gap = 1e-7; // absolute pruning gap
  double level_slack = 1e-6;   // slack on fixed higher objective levels
  double verification = 1e-6; // substitution check of returned points
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpRow {
  std::vector<Term> terms;
  Sense sense = Sense::kLe;
  double rhs = 0.0;
};

// Basis snapshot: the column basic in each row, and for nonbasic columns
// whether they sit at their upper bound.
struct Basis {
  std::vector<int> head;
  std::vector<std::uint8_t> at_upper;
};

// Bounded-variable primal simplex on a dense tableau.
//
// Each row i gets a logical column r_i with A_i x - r_i = 0 whose bounds encode
// the row sense, so the all-logical basis is always available and any basis
// can be warm-started after bound changes. Phase 1 minimizes the sum of bound
// violations of basic columns; phase 2 uses Dantzig pricing with a Harris
// ratio test and falls back to Bland's rule after a run of degenerate pivots.
class BoundedSimplex {
 public:
  BoundedSimplex(int num_structural, std::vector<LpRow> rows, std::vector<double> lo,
                 std::vector<double> hi, std::vector<double> cost,
                 const Tolerances& tol = {});

  int num_structural() const { return n_; }
  int num_rows() const { return m_; }

  void set_bounds(int col, double lo, double hi);
  double lower(int col) const { return lo_[col]; }
  double upper(int col) const { return hi_[col]; }

  LpStatus solve();

  double objective() const;
  // Structural values of the last solve.
  std::span<const double> values() const { return {x_.data(), static_cast<size_t>(n_)}; }
  long iterations() const { return iterations_; }

  Basis basis() const;
  // Moves to `basis`, pivoting from the current tableau when possible and
  // rebuilding from the original rows otherwise.
  void load_basis(const Basis& basis);

 private:
  double& t(int row, int col) { return tableau_[static_cast<size_t>(row) * cols_ + col]; }
  double t(int row, int col) const {
    return tableau_[static_cast<size_t>(row) * cols_ + col];
  }

  // Throws NumericalError after `budget` further iterations.
  LpStatus iterate(double feasibility, long budget);
  void reset_tableau();
  void pivot(int row, int col);
  void recompute_basics();
  void place_nonbasic(int col);
  double max_row_residual() const;
  bool switch_basis(const Basis& target);
  void reinvert(const Basis& target);
  [[noreturn]] void numerical_failure(const char* what) const;

  int n_ = 0;
  int m_ = 0;
  int cols_ = 0;
  Tolerances tol_;
  std::vector<LpRow> rows_;
  std::vector<double> lo_, hi_, cost_;
  std::vector<double> tableau_;
  std::vector<double> x_;
  std::vector<int> head_;       // row -> basic column
  std::vector<int> row_of_;     // column -> row, or -1 when nonbasic
  std::vector<std::uint8_t> at_upper_;
  long iterations_ = 0;
  double smallest_pivot_ = 0.0;
};

struct LpResult {
  LpStatus status = LpStatus::kInfeasible;
  double objective = 0.0;
  std::vector<double> x;
  long iterations = 0;
};

// LP relaxation of `model` (binaries relaxed to [0, 1]) minimizing objective
// level 1.
LpResult lp_solve(const LinearModel& model, const Tolerances& tol = {});

}  // namespace chsched

#endif  // CHSCHED_LP_HPP_
