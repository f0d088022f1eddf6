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

#include "chsched/core.hpp"

#include <set>

#include <fmt/format.h>

namespace chsched {

CoreBuild::CoreBuild(const Instance& instance, int n_max)
    : instance_(&instance),
      index_(std::make_unique<PlantIndex>(instance)),
      n_max_(n_max) {}

CoreBuild build_core(const Instance& inst, LinearModel& model) {
  CoreBuild core(inst, inst.n_max);
  const PlantIndex& idx = core.index();
  const int N = inst.n_max;
  const double H = inst.horizon_h;
  const int num_tasks = idx.num_tasks();

  core.wv_.resize(num_tasks);
  core.ts_.resize(num_tasks);
  core.tf_.resize(num_tasks);
  core.batch_.resize(num_tasks);
  for (int i = 0; i < num_tasks; ++i) {
    const std::string& id = inst.tasks[i].id;
    for (int n = 1; n <= N; ++n) {
      core.wv_[i].push_back(model.add_binary(fmt::format("wv[{},{}]", id, n)));
    }
  }
  for (int i = 0; i < num_tasks; ++i) {
    const Task& task = inst.tasks[i];
    for (int n = 1; n <= N; ++n) {
      core.ts_[i].push_back(
          model.add_continuous(fmt::format("Ts[{},{}]", task.id, n), 0.0, H));
      core.tf_[i].push_back(
          model.add_continuous(fmt::format("Tf[{},{}]", task.id, n), 0.0, H));
      if (is_processing(task.kind)) {
        core.batch_[i].push_back(model.add_continuous(
            fmt::format("B[{},{}]", task.id, n), 0.0, task.b_max));
      } else {
        core.batch_[i].push_back(std::nullopt);
      }
    }
  }
  core.stock_.resize(idx.num_states());
  core.under_.resize(idx.num_states());
  for (int s = 0; s < idx.num_states(); ++s) {
    const State& state = inst.states[s];
    for (int stage = 1; stage <= N + 1; ++stage) {
      core.stock_[s].push_back(model.add_continuous(
          fmt::format("ST[{},{}]", state.id, stage), 0.0, kInf));
    }
    if (state.demand > 0.0) {
      core.under_[s] = model.add_continuous(fmt::format("U[{}]", state.id), 0.0, kInf);
    }
  }

  // core.alloc
  for (int u = 0; u < idx.num_units(); ++u) {
    if (idx.tasks_on(u).empty()) continue;
    for (int n = 1; n <= N; ++n) {
      LinExpr e;
      for (int i : idx.tasks_on(u)) e.add(1.0, core.wv(i, n));
      model.add_constraint(fmt::format("core.alloc[{},{}]", inst.units[u].id, n), e,
                           Sense::kLe, 1.0, "core.alloc");
    }
  }

  for (int i = 0; i < num_tasks; ++i) {
    const Task& task = inst.tasks[i];
    for (int n = 1; n <= N; ++n) {
      if (is_processing(task.kind)) {
        const VarId b = *core.batch(i, n);
        model.add_constraint(fmt::format("core.batch[{},{},lo]", task.id, n),
                             LinExpr().add(1.0, b).add(-task.b_min, core.wv(i, n)),
                             Sense::kGe, 0.0, "core.batch");
        model.add_constraint(fmt::format("core.batch[{},{},hi]", task.id, n),
                             LinExpr().add(1.0, b).add(-task.b_max, core.wv(i, n)),
                             Sense::kLe, 0.0, "core.batch");
        model.add_constraint(fmt::format("core.dur[{},{}]", task.id, n),
                             LinExpr()
                                 .add(1.0, core.tf(i, n))
                                 .add(-1.0, core.ts(i, n))
                                 .add(-1.0 / task.rate, b),
                             Sense::kEq, 0.0, "core.dur");
      }
      model.add_constraint(fmt::format("core.timebox[{},{}]", task.id, n),
                           LinExpr().add(1.0, core.ts(i, n)).add(-1.0, core.tf(i, n)),
                           Sense::kLe, 0.0, "core.timebox");
    }
  }

  // Ts(later, n2) >= Tf(earlier, n1) - H * (2 - wv(later, n2) - wv(earlier, n1))
  auto precedence = [&](std::string name, std::string group, int later, int n2,
                        int earlier, int n1) {
    LinExpr e;
    e.add(1.0, core.ts(later, n2))
        .add(-1.0, core.tf(earlier, n1))
        .add(-H, core.wv(later, n2))
        .add(-H, core.wv(earlier, n1));
    model.add_constraint(std::move(name), e, Sense::kGe, -2.0 * H, std::move(group));
  };

  // core.seq
  for (int u = 0; u < idx.num_units(); ++u) {
    for (int i : idx.tasks_on(u)) {
      for (int ip : idx.tasks_on(u)) {
        for (int n = 1; n <= N; ++n) {
          for (int n2 = n + 1; n2 <= N; ++n2) {
            precedence(fmt::format("core.seq[{},{},{},{}]", inst.tasks[i].id, n2,
                                   inst.tasks[ip].id, n),
                       "core.seq", i, n2, ip, n);
          }
        }
      }
    }
  }

  // core.bal: material made at stage n is available from stage n+1 on.
  for (int s = 0; s < idx.num_states(); ++s) {
    const State& state = inst.states[s];
    for (int stage = 1; stage <= N + 1; ++stage) {
      LinExpr e;
      e.add(1.0, core.stock(s, stage));
      double rhs = 0.0;
      if (stage == 1) {
        rhs = state.initial_stock;
      } else {
        e.add(-1.0, core.stock(s, stage - 1));
        for (const auto& arc : idx.producers(s)) {
          e.add(-arc.coefficient, *core.batch(arc.task, stage - 1));
        }
      }
      if (stage <= N) {
        for (const auto& arc : idx.consumers(s)) {
          e.add(arc.coefficient, *core.batch(arc.task, stage));
        }
      }
      model.add_constraint(fmt::format("core.bal[{},{}]", state.id, stage), e,
                           Sense::kEq, rhs, "core.bal");
    }
  }

  // core.sync
  std::set<std::pair<int, int>> linked;
  for (int s = 0; s < idx.num_states(); ++s) {
    for (const auto& prod : idx.producers(s)) {
      for (const auto& cons : idx.consumers(s)) {
        if (!linked.emplace(prod.task, cons.task).second) continue;
        for (int n = 1; n <= N; ++n) {
          for (int n2 = n + 1; n2 <= N; ++n2) {
            precedence(fmt::format("core.sync[{},{},{},{}]", inst.tasks[cons.task].id,
                                   n2, inst.tasks[prod.task].id, n),
                       "core.sync", cons.task, n2, prod.task, n);
          }
        }
      }
    }
  }

  // core.demand
  LinExpr shortfall;
  for (int s = 0; s < idx.num_states(); ++s) {
    const auto under = core.underproduction(s);
    if (!under) continue;
    model.add_constraint(
        fmt::format("core.demand[{}]", inst.states[s].id),
        LinExpr().add(1.0, *under).add(1.0, core.stock(s, N + 1)), Sense::kGe,
        inst.states[s].demand, "core.demand");
    shortfall.add(1.0, *under);
  }

  LinExpr changeover_time;
  for (int i = 0; i < num_tasks; ++i) {
    if (!is_changeover(inst.tasks[i].kind)) continue;
    for (int n = 1; n <= N; ++n) {
      changeover_time.add(1.0, core.tf(i, n)).add(-1.0, core.ts(i, n));
    }
  }
  model.set_objective(1, shortfall);
  model.set_objective(2, changeover_time);
  return core;
}

}  // namespace chsched
