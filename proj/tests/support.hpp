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

#ifndef CHSCHED_TESTS_SUPPORT_HPP_
#define CHSCHED_TESTS_SUPPORT_HPP_

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "chsched/compile.hpp"
#include "chsched/instance.hpp"
#include "chsched/model.hpp"
#include "chsched/random.hpp"

namespace chsched::testing {

inline std::string data_path(const std::string& name) {
  return std::string(CHSCHED_TEST_DATA) + "/" + name;
}

inline std::string read_data(const std::string& name) {
  std::ifstream in(data_path(name));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline bool has_rule(const std::vector<Violation>& vs, const std::string& rule) {
  return std::any_of(vs.begin(), vs.end(),
                     [&](const Violation& v) { return v.rule == rule; });
}

// One main unit with a single P1 task T making P from R.
inline Instance single_task_instance(double rate, double b_min, double b_max,
                                     double demand, int n_max = 2) {
  Instance inst;
  inst.units = {{"U1", true}};
  inst.tasks = {{"T", "U1", TaskKind::kP1, rate, b_min, b_max}};
  inst.states = {{"R", false, 0.0, 1e4}, {"P", true, demand, 0.0}};
  inst.arcs = {{"T", "R", ArcDirection::kConsumes, 1.0},
               {"T", "P", ArcDirection::kProduces, 1.0}};
  inst.horizon_h = 12.0;
  inst.n_max = n_max;
  return inst;
}

// Random model exercising every bound shape, sense, group and objective
// level the MPS writer knows about. Coefficients have few digits on purpose:
// some integers, some eighths, some arbitrary decimals.
inline LinearModel random_model(unsigned seed) {
  Rng rng(seed);
  LinearModel m;
  auto number = [&]() {
    const int sign = rng.coin() ? 1 : -1;
    switch (rng.uniform(0, 2)) {
      case 0: return sign * static_cast<double>(rng.uniform(1, 50));
      case 1: return sign * rng.uniform(1, 400) / 8.0;
      default: return sign * rng.uniform(1, 999999) / 1000.0;
    }
  };
  const int nv = rng.uniform(1, 25);
  std::vector<VarId> vars;
  for (int k = 0; k < nv; ++k) {
    const std::string name = "v" + std::to_string(rng.uniform(0, 3)) + "[" +
                             std::to_string(k) + "," + std::to_string(seed) + "]";
    switch (rng.uniform(0, 5)) {
      case 0: vars.push_back(m.add_binary(name)); break;
      case 1: vars.push_back(m.add_continuous(name, 0.0, kInf)); break;
      case 2: vars.push_back(m.add_continuous(name, -kInf, kInf)); break;
      case 3: vars.push_back(m.add_continuous(name, -kInf, std::abs(number()))); break;
      case 4: {
        const double v = number();
        vars.push_back(m.add_continuous(name, v, v));
        break;
      }
      default: {
        const double a = number(), b = number();
        vars.push_back(m.add_continuous(name, std::min(a, b), std::max(a, b) + 1.0));
      }
    }
  }
  const int nc = rng.uniform(0, 20);
  for (int k = 0; k < nc; ++k) {
    LinExpr e;
    const int nt = rng.uniform(0, 6);
    for (int j = 0; j < nt; ++j) e.add(number(), vars[rng.uniform(0, nv - 1)]);
    const Sense sense = static_cast<Sense>(rng.uniform(0, 2));
    const double rhs = rng.uniform(0, 3) == 0 ? 0.0 : number();
    m.add_constraint("c" + std::to_string(k), e, sense, rhs,
                     "g." + std::to_string(rng.uniform(0, 3)));
  }
  const int levels = rng.uniform(0, 3);
  for (int l = 0; l < levels; ++l) {
    LinExpr e;
    const int nt = rng.uniform(0, 5);
    for (int j = 0; j < nt; ++j) e.add(number(), vars[rng.uniform(0, nv - 1)]);
    m.add_objective_level(e);
  }
  if (rng.coin()) m.set_group_note("g.0", "guard reads i != i'");
  return m;
}

// Occupancy pattern of one unit: pattern[n-1] is the processing task index
// (into a list of k tasks) active at event point n, or -1 when empty.
using Pattern = std::vector<int>;

// Pattern number `code` in base k+1 over n_max digits.
inline Pattern decode_pattern(int code, int k, int n_max) {
  Pattern p(n_max);
  for (int n = 0; n < n_max; ++n) {
    p[n] = code % (k + 1) - 1;
    code /= k + 1;
  }
  return p;
}

inline int pattern_count(int k, int n_max) {
  int total = 1;
  for (int n = 0; n < n_max; ++n) total *= k + 1;
  return total;
}

// First active task at event points n..n_max (1-based n), or -1.
inline int first_active_from(const Pattern& p, int n) {
  for (int m = n; m <= static_cast<int>(p.size()); ++m) {
    if (p[m - 1] >= 0) return p[m - 1];
  }
  return -1;
}

// Task active at n and the next active task after it, if they differ.
inline bool switches_after(const Pattern& p, int n, int* from, int* to) {
  if (p[n - 1] < 0) return false;
  const int next = first_active_from(p, n + 1);
  if (next < 0 || next == p[n - 1]) return false;
  *from = p[n - 1];
  *to = next;
  return true;
}

// Point with the pattern's processing tasks active on unit 0, every
// changeover idle at time 0, and the formulation's sequencing variables at
// their semantic values: legacy pair variables on consecutive distinct
// tasks, compact x on the first active task from n on.
inline std::vector<double> semantic_point(const CompiledModel& cm, const Pattern& p) {
  const CoreBuild& core = cm.core;
  const auto proc = core.index().processing_on(0);
  const int N = core.n_max();
  std::vector<double> x(cm.model.num_variables(), 0.0);
  for (int n = 1; n <= N; ++n) {
    if (p[n - 1] >= 0) x[core.wv(proc[p[n - 1]], n).value] = 1.0;
  }
  if (cm.legacy) {
    for (int n = 1; n < N; ++n) {
      int from, to;
      if (!switches_after(p, n, &from, &to)) continue;
      auto it = cm.legacy->x.find({proc[from], proc[to], n});
      if (it != cm.legacy->x.end()) x[it->second.value] = 1.0;
    }
  }
  if (cm.compact) {
    for (int n = 1; n <= N; ++n) {
      const int first = first_active_from(p, n);
      if (first >= 0) x[cm.compact->at(proc[first], n).value] = 1.0;
    }
  }
  return x;
}

struct Forced {
  bool active = false;
  double duration = 0.0;
};

// What the activation and duration rows demand of each changeover task at
// each event point, read off the rows at `x` (changeovers idle): for a row
// with coefficient a on the key variable, the requirement is
// (rhs - activity) / a. Keyed by (changeover task, event point).
inline std::map<std::pair<int, int>, Forced> forced_changeovers(
    const CompiledModel& cm, const std::vector<double>& x) {
  const CoreBuild& core = cm.core;
  const PlantIndex& idx = core.index();
  std::map<int, std::pair<int, int>> wv_key, tf_key;
  for (int i = 0; i < idx.num_tasks(); ++i) {
    if (!is_changeover(idx.kind(i))) continue;
    for (int n = 1; n <= core.n_max(); ++n) {
      wv_key[core.wv(i, n).value] = {i, n};
      tf_key[core.tf(i, n).value] = {i, n};
    }
  }
  std::map<std::pair<int, int>, Forced> out;
  for (const Constraint& c : cm.model.constraints()) {
    const bool act = c.group.find(".act") != std::string::npos;
    const bool dur = c.group.find(".dur") != std::string::npos &&
                     c.group.rfind("core.", 0) != 0;
    if (!act && !dur) continue;
    const auto& keys = act ? wv_key : tf_key;
    for (const Term& t : c.terms) {
      auto k = keys.find(t.var.value);
      if (k == keys.end()) continue;
      const double need = (c.rhs - activity(c, x)) / t.coef;
      Forced& f = out[k->second];
      if (act) f.active = f.active || need > 0.5;
      if (dur) f.duration = std::max(f.duration, need);
    }
  }
  return out;
}

}  // namespace chsched::testing

#endif  // CHSCHED_TESTS_SUPPORT_HPP_
