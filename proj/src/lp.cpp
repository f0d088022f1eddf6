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

#include "chsched/lp.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "chsched/errors.hpp"

namespace chsched {
namespace {

// Entries below this magnitude are flushed to zero after a pivot so the
// tableau keeps its sparsity.
constexpr double kDropTolerance = 1e-13;
// Pivot threshold when moving between bases outside the ratio test.
constexpr double kSwitchPivot = 1e-7;
// Degenerate pivots in a row before pricing switches to Bland's rule.
constexpr int kDegenerateRun = 50;
constexpr int kRefreshInterval = 100;
constexpr double kResidualLimit = 1e-7;
// Feasibility tolerance of the cleanup pass after an optimal solve.
constexpr double kCleanFeasibility = 1e-9;
// Iterations the cleanup pass may spend beyond one per row and column.
constexpr long kCleanBudget = 100;

}  // namespace

BoundedSimplex::BoundedSimplex(int num_structural, std::vector<LpRow> rows,
                               std::vector<double> lo, std::vector<double> hi,
                               std::vector<double> cost, const Tolerances& tol)
    : n_(num_structural),
      m_(static_cast<int>(rows.size())),
      cols_(n_ + m_),
      tol_(tol),
      rows_(std::move(rows)),
      lo_(std::move(lo)),
      hi_(std::move(hi)),
      cost_(std::move(cost)) {
  if (static_cast<int>(lo_.size()) != n_ || static_cast<int>(hi_.size()) != n_ ||
      static_cast<int>(cost_.size()) != n_) {
    throw Error("BoundedSimplex: bound or cost vector size mismatch");
  }
  lo_.resize(cols_);
  hi_.resize(cols_);
  cost_.resize(cols_, 0.0);
  for (int r = 0; r < m_; ++r) {
    const LpRow& row = rows_[r];
    const int col = n_ + r;
    lo_[col] = row.sense == Sense::kLe ? -kInf : row.rhs;
    hi_[col] = row.sense == Sense::kGe ? kInf : row.rhs;
    for (const Term& term : row.terms) {
      if (term.var.value < 0 || term.var.value >= n_) {
        throw Error("BoundedSimplex: row references an unknown column");
      }
    }
  }
  x_.assign(cols_, 0.0);
  at_upper_.assign(cols_, 0);
  reset_tableau();
  for (int j = 0; j < n_; ++j) place_nonbasic(j);
  recompute_basics();
}

void BoundedSimplex::reset_tableau() {
  tableau_.assign(static_cast<size_t>(m_) * cols_, 0.0);
  head_.assign(m_, -1);
  row_of_.assign(cols_, -1);
  for (int r = 0; r < m_; ++r) {
    for (const Term& term : rows_[r].terms) t(r, term.var.value) -= term.coef;
    t(r, n_ + r) = 1.0;
    head_[r] = n_ + r;
    row_of_[n_ + r] = r;
  }
}

void BoundedSimplex::place_nonbasic(int col) {
  double value;
  if (at_upper_[col] && std::isfinite(hi_[col])) {
    value = hi_[col];
  } else if (std::isfinite(lo_[col])) {
    value = lo_[col];
    at_upper_[col] = 0;
  } else if (std::isfinite(hi_[col])) {
    value = hi_[col];
    at_upper_[col] = 1;
  } else {
    value = 0.0;
    at_upper_[col] = 0;
  }
  x_[col] = value;
}

void BoundedSimplex::set_bounds(int col, double lo, double hi) {
  lo_[col] = lo;
  hi_[col] = hi;
  if (row_of_[col] >= 0) return;
  const double old = x_[col];
  place_nonbasic(col);
  const double delta = x_[col] - old;
  if (delta == 0.0) return;
  for (int i = 0; i < m_; ++i) {
    const double a = t(i, col);
    if (a != 0.0) x_[head_[i]] -= a * delta;
  }
}

void BoundedSimplex::recompute_basics() {
  std::vector<int> active;
  for (int j = 0; j < cols_; ++j) {
    if (row_of_[j] < 0 && x_[j] != 0.0) active.push_back(j);
  }
  for (int i = 0; i < m_; ++i) {
    const double* row = &tableau_[static_cast<size_t>(i) * cols_];
    double sum = 0.0;
    for (int j : active) sum -= row[j] * x_[j];
    x_[head_[i]] = sum;
  }
}

void BoundedSimplex::pivot(int p, int q) {
  double* rp = &tableau_[static_cast<size_t>(p) * cols_];
  const double inv = 1.0 / rp[q];
  smallest_pivot_ =
      smallest_pivot_ == 0.0 ? std::abs(rp[q]) : std::min(smallest_pivot_, std::abs(rp[q]));
  std::vector<int> nz;
  nz.reserve(64);
  for (int j = 0; j < cols_; ++j) {
    if (rp[j] != 0.0) {
      rp[j] *= inv;
      nz.push_back(j);
    }
  }
  rp[q] = 1.0;
  for (int i = 0; i < m_; ++i) {
    if (i == p) continue;
    double* ri = &tableau_[static_cast<size_t>(i) * cols_];
    const double f = ri[q];
    if (f == 0.0) continue;
    for (int j : nz) {
      const double v = ri[j] - f * rp[j];
      ri[j] = std::abs(v) < kDropTolerance ? 0.0 : v;
    }
    ri[q] = 0.0;
  }
  row_of_[head_[p]] = -1;
  head_[p] = q;
  row_of_[q] = p;
}

double BoundedSimplex::max_row_residual() const {
  double worst = 0.0;
  for (int r = 0; r < m_; ++r) {
    double activity = 0.0;
    for (const Term& term : rows_[r].terms) activity += term.coef * x_[term.var.value];
    worst = std::max(worst, std::abs(activity - x_[n_ + r]));
  }
  return worst;
}

double BoundedSimplex::objective() const {
  double z = 0.0;
  for (int j = 0; j < n_; ++j) z += cost_[j] * x_[j];
  return z;
}

Basis BoundedSimplex::basis() const { return {head_, at_upper_}; }

bool BoundedSimplex::switch_basis(const Basis& target) {
  std::vector<std::uint8_t> wanted(cols_, 0);
  for (int col : target.head) wanted[col] = 1;
  bool complete = true;
  for (int q : target.head) {
    if (row_of_[q] >= 0) continue;
    int best_row = -1;
    double best = kSwitchPivot;
    for (int i = 0; i < m_; ++i) {
      if (wanted[head_[i]]) continue;
      const double a = std::abs(t(i, q));
      if (a > best) {
        best = a;
        best_row = i;
      }
    }
    if (best_row < 0) {
      complete = false;
      continue;
    }
    pivot(best_row, q);
  }
  for (int j = 0; j < cols_; ++j) {
    if (row_of_[j] >= 0) continue;
    at_upper_[j] = target.at_upper[j];
    place_nonbasic(j);
  }
  recompute_basics();
  return complete;
}

void BoundedSimplex::reinvert(const Basis& target) {
  reset_tableau();
  // Columns that cannot enter stay nonbasic; phase 1 repairs the point.
  switch_basis(target);
}

void BoundedSimplex::load_basis(const Basis& target) {
  if (static_cast<int>(target.head.size()) != m_ ||
      static_cast<int>(target.at_upper.size()) != cols_) {
    throw Error("BoundedSimplex: basis snapshot does not match the tableau");
  }
  if (!switch_basis(target)) reinvert(target);
}

void BoundedSimplex::numerical_failure(const char* what) const {
  int infeasible = 0;
  std::string sample;
  for (int i = 0; i < m_; ++i) {
    const int col = head_[i];
    const double v = x_[col];
    if (v < lo_[col] - tol_.feasibility || v > hi_[col] + tol_.feasibility) {
      if (++infeasible <= 5) {
        sample += fmt::format(" {}{}={:.6g} in [{:.6g},{:.6g}]", col < n_ ? "x" : "r",
                              col < n_ ? col : col - n_, v, lo_[col], hi_[col]);
      }
    }
  }
  throw NumericalError(fmt::format(
      "simplex {}: rows={} columns={} iterations={} smallest pivot={:.3g} "
      "infeasible basics={}{}",
      what, m_, n_, iterations_, smallest_pivot_, infeasible, sample));
}

LpStatus BoundedSimplex::solve() {
  const LpStatus status = iterate(tol_.feasibility, 50L * (m_ + n_) + 10000);
  if (status != LpStatus::kOptimal) return status;
  // The Harris ratio test leaves basic columns up to the feasibility
  // tolerance outside their bounds; tighten and re-optimize from the final
  // basis so those errors do not accumulate in objective values.
  double worst = 0.0;
  for (int i = 0; i < m_; ++i) {
    const int col = head_[i];
    worst = std::max({worst, lo_[col] - x_[col], x_[col] - hi_[col]});
  }
  if (worst <= kCleanFeasibility) return status;
  // The pass is a refinement only. Tableau noise near the tight tolerance
  // can make phase 1 undo each phase-2 step, so a stalled pass falls back to
  // the basis that was already optimal.
  const Basis saved = basis();
  try {
    if (iterate(kCleanFeasibility, kCleanBudget + m_ + n_) != LpStatus::kOptimal) {
      load_basis(saved);
    }
  } catch (const NumericalError&) {
    load_basis(saved);
  }
  return LpStatus::kOptimal;
}

LpStatus BoundedSimplex::iterate(double feasibility, long budget) {
  const long limit = iterations_ + budget;
  std::vector<double> cb(m_), d(cols_);
  struct Candidate {
    int row;
    double ratio;
    double size;
    bool to_upper;
  };
  std::vector<Candidate> candidates;
  int degenerate = 0;
  int reinverts = 0;
  int since_refresh = 0;
  bool fresh = false;

  for (;;) {
    if (iterations_ > limit) numerical_failure("iteration limit");

    bool phase1 = false;
    for (int i = 0; i < m_; ++i) {
      const int col = head_[i];
      const double v = x_[col];
      if (v < lo_[col] - feasibility) {
        cb[i] = -1.0;
        phase1 = true;
      } else if (v > hi_[col] + feasibility) {
        cb[i] = 1.0;
        phase1 = true;
      } else {
        cb[i] = 0.0;
      }
    }
    if (phase1) {
      std::fill(d.begin(), d.end(), 0.0);
    } else {
      for (int i = 0; i < m_; ++i) cb[i] = cost_[head_[i]];
      d = cost_;
    }
    for (int i = 0; i < m_; ++i) {
      if (cb[i] == 0.0) continue;
      const double* row = &tableau_[static_cast<size_t>(i) * cols_];
      for (int j = 0; j < cols_; ++j) {
        if (row[j] != 0.0) d[j] -= cb[i] * row[j];
      }
    }

    const bool bland = degenerate > kDegenerateRun;
    int q = -1;
    int dir = 0;
    double score = 0.0;
    for (int j = 0; j < cols_; ++j) {
      if (row_of_[j] >= 0) continue;
      const double dj = d[j];
      int s = 0;
      if (dj < -tol_.optimality && x_[j] < hi_[j]) {
        s = 1;
      } else if (dj > tol_.optimality && x_[j] > lo_[j]) {
        s = -1;
      }
      if (s == 0) continue;
      if (bland) {
        q = j;
        dir = s;
        break;
      }
      if (std::abs(dj) > score) {
        score = std::abs(dj);
        q = j;
        dir = s;
      }
    }

    if (q < 0) {
      if (!fresh) {
        recompute_basics();
        fresh = true;
        continue;
      }
      if (phase1) return LpStatus::kInfeasible;
      if (max_row_residual() > kResidualLimit && reinverts < 2) {
        ++reinverts;
        reinvert(basis());
        fresh = false;
        continue;
      }
      return LpStatus::kOptimal;
    }

    candidates.clear();
    double theta = kInf;
    for (int i = 0; i < m_; ++i) {
      const double a = t(i, q);
      if (std::abs(a) <= tol_.pivot) continue;
      const double alpha = -a * dir;
      const int col = head_[i];
      const double v = x_[col];
      const double l = lo_[col];
      const double u = hi_[col];
      double ratio;
      double relaxed;
      bool to_upper;
      if (v < l - feasibility) {
        if (alpha <= 0.0) continue;
        ratio = relaxed = (l - v) / alpha;
        to_upper = false;
      } else if (v > u + feasibility) {
        if (alpha >= 0.0) continue;
        ratio = relaxed = (v - u) / -alpha;
        to_upper = true;
      } else if (alpha < 0.0 && std::isfinite(l)) {
        ratio = (v - l) / -alpha;
        relaxed = (v - l + feasibility) / -alpha;
        to_upper = false;
      } else if (alpha > 0.0 && std::isfinite(u)) {
        ratio = (u - v) / alpha;
        relaxed = (u - v + feasibility) / alpha;
        to_upper = true;
      } else {
        continue;
      }
      candidates.push_back({i, ratio, std::abs(alpha), to_upper});
      theta = std::min(theta, relaxed);
    }

    int chosen = -1;
    if (bland) {
      double best_ratio = kInf;
      for (int c = 0; c < static_cast<int>(candidates.size()); ++c) {
        const Candidate& cand = candidates[c];
        if (cand.ratio < best_ratio - 1e-12 ||
            (cand.ratio <= best_ratio + 1e-12 && chosen >= 0 &&
             head_[cand.row] < head_[candidates[chosen].row])) {
          best_ratio = std::min(best_ratio, cand.ratio);
          chosen = c;
        }
      }
    } else {
      double best_size = 0.0;
      for (int c = 0; c < static_cast<int>(candidates.size()); ++c) {
        const Candidate& cand = candidates[c];
        if (cand.ratio <= theta && cand.size > best_size) {
          best_size = cand.size;
          chosen = c;
        }
      }
    }

    const double range = hi_[q] - lo_[q];
    double step = chosen >= 0 ? std::max(0.0, candidates[chosen].ratio) : kInf;
    const bool flip = range <= step;
    if (flip) step = range;
    if (!std::isfinite(step)) {
      if (phase1) numerical_failure("unbounded phase-1 ray");
      return LpStatus::kUnbounded;
    }

    if (step != 0.0) {
      for (int i = 0; i < m_; ++i) {
        const double a = t(i, q);
        if (a != 0.0) x_[head_[i]] -= a * dir * step;
      }
    }
    if (flip) {
      at_upper_[q] = dir > 0;
      x_[q] = dir > 0 ? hi_[q] : lo_[q];
    } else {
      x_[q] += dir * step;
      const Candidate& cand = candidates[chosen];
      const int leaving = head_[cand.row];
      at_upper_[leaving] = cand.to_upper;
      x_[leaving] = cand.to_upper ? hi_[leaving] : lo_[leaving];
      pivot(cand.row, q);
    }
    degenerate = step <= 1e-12 ? degenerate + 1 : 0;
    fresh = false;
    ++iterations_;
    if (++since_refresh >= kRefreshInterval) {
      since_refresh = 0;
      recompute_basics();
    }
  }
}

LpResult lp_solve(const LinearModel& model, const Tolerances& tol) {
  const int n = model.num_variables();
  std::vector<LpRow> rows;
  rows.reserve(model.num_constraints());
  for (const Constraint& c : model.constraints()) rows.push_back({c.terms, c.sense, c.rhs});
  std::vector<double> lo(n), hi(n), cost(n, 0.0);
  for (int j = 0; j < n; ++j) {
    lo[j] = model.variables()[j].lo;
    hi[j] = model.variables()[j].hi;
  }
  if (!model.objectives().empty()) {
    for (const Term& term : model.objectives().front().terms) cost[term.var.value] += term.coef;
  }
  BoundedSimplex lp(n, std::move(rows), std::move(lo), std::move(hi), std::move(cost), tol);
  LpResult result;
  result.status = lp.solve();
  result.iterations = lp.iterations();
  if (result.status == LpStatus::kOptimal) {
    result.objective = lp.objective();
    result.x.assign(lp.values().begin(), lp.values().end());
  }
  return result;
}

}  // namespace chsched
