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

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "chsched/compile.hpp"
#include "chsched/harness.hpp"
#include "chsched/lp.hpp"
#include "chsched/random.hpp"
#include "chsched/solver.hpp"
#include "doctest.h"

using namespace chsched;

namespace {

LpRow row(std::vector<double> coefs, Sense sense, double rhs) {
  LpRow r;
  for (size_t j = 0; j < coefs.size(); ++j) {
    if (coefs[j] != 0.0) r.terms.push_back({coefs[j], VarId{static_cast<int>(j)}});
  }
  r.sense = sense;
  r.rhs = rhs;
  return r;
}

// Small dense LP in three variables used by the vertex oracle.
struct Dense3 {
  std::vector<std::array<double, 3>> a;
  std::vector<Sense> sense;
  std::vector<double> b;
  std::array<double, 3> lo, hi, c;
};

bool feasible(const Dense3& p, const std::array<double, 3>& x) {
  for (int j = 0; j < 3; ++j) {
    if (x[j] < p.lo[j] - 1e-9 || x[j] > p.hi[j] + 1e-9) return false;
  }
  for (size_t i = 0; i < p.a.size(); ++i) {
    const double act = p.a[i][0] * x[0] + p.a[i][1] * x[1] + p.a[i][2] * x[2];
    if (p.sense[i] == Sense::kLe && act > p.b[i] + 1e-9) return false;
    if (p.sense[i] == Sense::kGe && act < p.b[i] - 1e-9) return false;
    if (p.sense[i] == Sense::kEq && std::abs(act - p.b[i]) > 1e-9) return false;
  }
  return true;
}

// Every vertex lies on three active hyperplanes taken from the rows and the
// finite bounds; the best feasible one is the optimum of a bounded LP.
std::optional<double> vertex_optimum(const Dense3& p) {
  std::vector<std::array<double, 4>> planes;
  for (size_t i = 0; i < p.a.size(); ++i) {
    planes.push_back({p.a[i][0], p.a[i][1], p.a[i][2], p.b[i]});
  }
  for (int j = 0; j < 3; ++j) {
    std::array<double, 4> e{0, 0, 0, 0};
    e[j] = 1;
    e[3] = p.lo[j];
    planes.push_back(e);
    e[3] = p.hi[j];
    planes.push_back(e);
  }
  auto det3 = [](const std::array<std::array<double, 3>, 3>& m) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  };
  std::optional<double> best;
  const size_t n = planes.size();
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      for (size_t k = j + 1; k < n; ++k) {
        std::array<std::array<double, 3>, 3> m;
        const std::array<size_t, 3> ids{i, j, k};
        for (int r = 0; r < 3; ++r) {
          for (int c = 0; c < 3; ++c) m[r][c] = planes[ids[r]][c];
        }
        const double d = det3(m);
        if (std::abs(d) < 1e-9) continue;
        std::array<double, 3> x;
        for (int c = 0; c < 3; ++c) {
          auto mc = m;
          for (int r = 0; r < 3; ++r) mc[r][c] = planes[ids[r]][3];
          x[c] = det3(mc) / d;
        }
        if (!feasible(p, x)) continue;
        const double v = p.c[0] * x[0] + p.c[1] * x[1] + p.c[2] * x[2];
        if (!best || v < *best) best = v;
      }
    }
  }
  return best;
}

BoundedSimplex make(const Dense3& p) {
  std::vector<LpRow> rows;
  for (size_t i = 0; i < p.a.size(); ++i) {
    rows.push_back(row({p.a[i][0], p.a[i][1], p.a[i][2]}, p.sense[i], p.b[i]));
  }
  return BoundedSimplex(3, rows, {p.lo.begin(), p.lo.end()}, {p.hi.begin(), p.hi.end()},
                        {p.c.begin(), p.c.end()});
}

Dense3 random_dense(Rng& rng) {
  Dense3 p;
  const int m = rng.uniform(1, 5);
  for (int i = 0; i < m; ++i) {
    p.a.push_back({double(rng.uniform(-4, 4)), double(rng.uniform(-4, 4)),
                   double(rng.uniform(-4, 4))});
    p.sense.push_back(static_cast<Sense>(rng.uniform(0, 2)));
    p.b.push_back(rng.uniform(-6, 6));
  }
  for (int j = 0; j < 3; ++j) {
    p.lo[j] = rng.uniform(-5, 0);
    p.hi[j] = p.lo[j] + rng.uniform(0, 6);
    p.c[j] = rng.uniform(-3, 3);
  }
  return p;
}

}  // namespace

TEST_CASE("minimize x subject to x >= 3") {
  BoundedSimplex lp(1, {row({1}, Sense::kGe, 3)}, {0}, {10}, {1});
  REQUIRE(lp.solve() == LpStatus::kOptimal);
  CHECK(lp.objective() == doctest::Approx(3));
  CHECK(lp.values()[0] == doctest::Approx(3));
}

TEST_CASE("x >= 3 and x <= 2 is infeasible") {
  BoundedSimplex lp(1, {row({1}, Sense::kGe, 3), row({1}, Sense::kLe, 2)}, {0}, {10}, {1});
  CHECK(lp.solve() == LpStatus::kInfeasible);
}

TEST_CASE("unbounded direction") {
  const double inf = std::numeric_limits<double>::infinity();
  BoundedSimplex lp(2, {row({1, -1}, Sense::kLe, 1)}, {0, 0}, {inf, inf}, {-1, 0});
  CHECK(lp.solve() == LpStatus::kUnbounded);
}

TEST_CASE("degenerate problem that cycles under plain Dantzig pricing") {
  // Beale's example, maximization turned into minimization.
  const double inf = std::numeric_limits<double>::infinity();
  BoundedSimplex lp(4,
                    {row({0.25, -8, -1, 9}, Sense::kLe, 0),
                     row({0.5, -12, -0.5, 3}, Sense::kLe, 0), row({0, 0, 1, 0}, Sense::kLe, 1)},
                    {0, 0, 0, 0}, {inf, inf, inf, inf}, {-0.75, 20, -0.5, 6});
  REQUIRE(lp.solve() == LpStatus::kOptimal);
  CHECK(lp.objective() == doctest::Approx(-1.25));
}

TEST_CASE("random three-variable LPs match vertex enumeration") {
  Rng rng(2024);
  int optimal = 0, infeasible = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const Dense3 p = random_dense(rng);
    const auto expect = vertex_optimum(p);
    BoundedSimplex lp = make(p);
    const LpStatus st = lp.solve();
    if (expect) {
      ++optimal;
      REQUIRE_MESSAGE(st == LpStatus::kOptimal, "trial " << trial);
      CHECK(lp.objective() == doctest::Approx(*expect).epsilon(1e-7));
    } else {
      ++infeasible;
      CHECK_MESSAGE(st == LpStatus::kInfeasible, "trial " << trial);
    }
  }
  CHECK(optimal > 50);
  CHECK(infeasible > 20);
}

TEST_CASE("bound changes and basis reloads reach the same optimum") {
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    Dense3 p = random_dense(rng);
    BoundedSimplex warm = make(p);
    if (warm.solve() != LpStatus::kOptimal) continue;
    const Basis start = warm.basis();

    const int j = rng.uniform(0, 2);
    p.lo[j] = p.hi[j] = std::round((p.lo[j] + p.hi[j]) / 2);
    warm.set_bounds(j, p.lo[j], p.hi[j]);
    BoundedSimplex cold = make(p);
    const LpStatus a = warm.solve(), b = cold.solve();
    CHECK(a == b);
    if (a == LpStatus::kOptimal) CHECK(warm.objective() == doctest::Approx(cold.objective()));

    warm.load_basis(start);
    CHECK(warm.solve() == b);
  }
}

TEST_CASE("relaxation bounds the integer optimum") {
  for (Formulation f : {Formulation::kLegacy, Formulation::kCompact}) {
    auto compiled = compile(fixture_ex1(), f);
    const LpResult relax = lp_solve(compiled->model);
    REQUIRE(relax.status == LpStatus::kOptimal);
    const SolveResult mip = solve(compiled->model);
    REQUIRE(mip.status == SolveStatus::kOptimal);
    CHECK(relax.objective <= mip.objective_vector[0] + 1e-9);
  }
  for (unsigned seed = 1; seed <= 20; ++seed) {
    auto compiled = compile(random_small_instance(seed), Formulation::kCompact);
    const LpResult relax = lp_solve(compiled->model);
    REQUIRE(relax.status == LpStatus::kOptimal);
    const SolveResult mip = solve(compiled->model);
    CHECK(relax.objective <= mip.objective_vector[0] + 1e-9);
  }
}
