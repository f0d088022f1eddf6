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

#include "chsched/schedule.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "json.hpp"

namespace chsched {
namespace {

struct Active {
  int task;
  int event;
  double start;
  double finish;
  double batch;
};

}  // namespace

bool Schedule::empty() const {
  return std::all_of(units.begin(), units.end(),
                     [](const UnitSchedule& u) { return u.entries.empty(); });
}

Schedule decode(const CompiledModel& compiled, const SolveResult& result,
                const Tolerances& tol) {
  if (!result.has_solution()) {
    throw Error(fmt::format("cannot decode a result with status {} and no assignment",
                            to_string(result.status)));
  }
  const Instance& inst = compiled.instance;
  const CoreBuild& core = compiled.core;
  const PlantIndex& idx = core.index();
  const LinearModel& model = compiled.model;
  const int N = core.n_max();
  const double H = inst.horizon_h;
  const double eps = tol.verification;
  const std::vector<double>& x = result.assignment;
  if (static_cast<int>(x.size()) != model.num_variables()) {
    throw Error("assignment size does not match the compiled model");
  }

  Schedule out;
  auto fail = [](const char* rule, std::string detail) {
    throw VerificationError(rule, std::move(detail));
  };
  auto task_id = [&](int i) -> const std::string& { return inst.tasks[i].id; };

  for (int j = 0; j < model.num_variables(); ++j) {
    if (model.variables()[j].kind != VarKind::kBinary) continue;
    if (std::abs(x[j] - std::round(x[j])) > tol.integrality) {
      fail(kRuleIntegrality,
           fmt::format("{} = {} is not binary", model.variables()[j].name, x[j]));
    }
  }
  out.report.rules.push_back(kRuleIntegrality);

  auto on = [&](int i, int n) { return std::round(x[core.wv(i, n).value]) == 1.0; };

  // Per unit, active tasks in event order.
  std::vector<std::vector<Active>> active(idx.num_units());
  for (int u = 0; u < idx.num_units(); ++u) {
    for (int n = 1; n <= N; ++n) {
      int count = 0;
      for (int i : idx.tasks_on(u)) {
        if (!on(i, n)) continue;
        ++count;
        const auto b = core.batch(i, n);
        active[u].push_back({i, n, x[core.ts(i, n).value], x[core.tf(i, n).value],
                             b ? x[b->value] : 0.0});
      }
      if (count > 1) {
        fail(kRuleAllocation, fmt::format("unit {} runs {} tasks at event point {}",
                                          inst.units[u].id, count, n));
      }
    }
  }
  out.report.rules.push_back(kRuleAllocation);

  for (int i = 0; i < idx.num_tasks(); ++i) {
    const Task& task = inst.tasks[i];
    if (!is_processing(task.kind)) continue;
    for (int n = 1; n <= N; ++n) {
      const double b = x[core.batch(i, n)->value];
      const bool lit = on(i, n);
      if (lit && (b < task.b_min - eps || b > task.b_max + eps)) {
        fail(kRuleBatch, fmt::format("{} at event point {} has batch {} outside [{}, {}]",
                                     task.id, n, b, task.b_min, task.b_max));
      }
      if (!lit && std::abs(b) > eps) {
        fail(kRuleBatch,
             fmt::format("inactive {} at event point {} has batch {}", task.id, n, b));
      }
    }
  }
  out.report.rules.push_back(kRuleBatch);

  for (const auto& unit : active) {
    for (const Active& a : unit) {
      const Task& task = inst.tasks[a.task];
      if (a.start < -eps || a.finish > H + eps || a.start > a.finish + eps) {
        fail(kRuleDuration, fmt::format("{} at event point {} spans [{}, {}]", task.id,
                                        a.event, a.start, a.finish));
      }
      if (is_processing(task.kind) &&
          std::abs(a.finish - a.start - a.batch / task.rate) > eps) {
        fail(kRuleDuration,
             fmt::format("{} at event point {} lasts {} h for batch {} at rate {}",
                         task.id, a.event, a.finish - a.start, a.batch, task.rate));
      }
    }
  }
  out.report.rules.push_back(kRuleDuration);

  for (int u = 0; u < idx.num_units(); ++u) {
    for (size_t k = 1; k < active[u].size(); ++k) {
      const Active& prev = active[u][k - 1];
      const Active& next = active[u][k];
      if (next.start < prev.finish - eps) {
        fail(kRuleNonOverlap,
             fmt::format("on unit {}, {} at event point {} starts at {} before {} at "
                         "event point {} finishes at {}",
                         inst.units[u].id, task_id(next.task), next.event, next.start,
                         task_id(prev.task), prev.event, prev.finish));
      }
    }
  }
  out.report.rules.push_back(kRuleNonOverlap);

  for (int u = 0; u < idx.num_units(); ++u) {
    if (!inst.units[u].is_main) continue;
    const Active* prev = nullptr;
    for (const Active& a : active[u]) {
      if (!is_processing(idx.kind(a.task))) continue;
      if (prev != nullptr && prev->task != a.task) {
        const double ctime = idx.ctime(prev->task, a.task);
        if (ctime > 0.0) {
          const bool c1 = idx.kind(prev->task) == TaskKind::kP1 &&
                          idx.kind(a.task) == TaskKind::kNP1;
          const std::optional<int> co = c1 ? idx.changeover_c1(u) : idx.changeover_c(u);
          const int n = prev->event + 1;
          const auto describe = [&] {
            return fmt::format("{} at event point {} followed by {} at event point {}",
                               task_id(prev->task), prev->event, task_id(a.task),
                               a.event);
          };
          if (!co || n > N || !on(*co, n)) {
            fail(kRuleChangeover,
                 fmt::format("{} needs a {} changeover at event point {}", describe(),
                             c1 ? "C1" : "C", n));
          }
          const double length = x[core.tf(*co, n).value] - x[core.ts(*co, n).value];
          if (length < ctime - eps) {
            fail(kRuleChangeover,
                 fmt::format("{}: changeover {} lasts {} h, needs {} h", describe(),
                             task_id(*co), length, ctime));
          }
        }
      }
      prev = &a;
    }
  }
  out.report.rules.push_back(kRuleChangeover);

  if (compiled.windows != WindowMode::kNone) {
    for (int u = 0; u < idx.num_units(); ++u) {
      for (const Active& a : active[u]) {
        const TaskKind kind = idx.kind(a.task);
        if (!is_changeover(kind)) continue;
        const auto& windows =
            kind == TaskKind::kChangeoverC ? inst.windows.c : inst.windows.c1;
        bool inside = false;
        std::string allowed;
        if (compiled.windows == WindowMode::kAssign) {
          const Window w = assign_event_windows(windows, H, N).window_for(a.event);
          inside = a.start >= w.start - eps && a.finish <= w.end + eps;
          allowed = fmt::format("[{}, {}]", w.start, w.end);
        } else {
          for (const Window& w : windows) {
            inside = inside || (a.start >= w.start - eps && a.finish <= w.end + eps);
            allowed += fmt::format("{}[{}, {}]", allowed.empty() ? "" : " ", w.start, w.end);
          }
        }
        if (!inside) {
          fail(kRuleWindow, fmt::format("{} at event point {} runs [{}, {}] outside {}",
                                        task_id(a.task), a.event, a.start, a.finish,
                                        allowed));
        }
      }
    }
  }
  out.report.rules.push_back(kRuleWindow);

  // Batches started at event point n consume at stage n and deliver from
  // stage n+1 on.
  for (int s = 0; s < idx.num_states(); ++s) {
    double stock = inst.states[s].initial_stock;
    for (int stage = 1; stage <= N + 1; ++stage) {
      if (stage > 1) {
        for (const auto& arc : idx.producers(s)) {
          stock += arc.coefficient * x[core.batch(arc.task, stage - 1)->value];
        }
      }
      if (stage <= N) {
        for (const auto& arc : idx.consumers(s)) {
          stock -= arc.coefficient * x[core.batch(arc.task, stage)->value];
        }
      }
      if (stock < -eps) {
        fail(kRuleInventory, fmt::format("state {} drops to {} at stage {}",
                                         inst.states[s].id, stock, stage));
      }
    }
    const State& state = inst.states[s];
    out.terminal_stock[state.id] = stock;
    if (state.demand > 0.0) {
      const double gap = state.demand - stock;
      // Lower objective levels may spend up to level_slack of the shortfall.
      out.underproduction[state.id] = gap > eps + tol.level_slack ? gap : 0.0;
    }
  }
  out.report.rules.push_back(kRuleInventory);

  for (int s = 0; s < idx.num_states(); ++s) {
    for (const auto& prod : idx.producers(s)) {
      for (const auto& cons : idx.consumers(s)) {
        for (int n = 1; n <= N; ++n) {
          if (!on(prod.task, n)) continue;
          const double done = x[core.tf(prod.task, n).value];
          for (int n2 = n + 1; n2 <= N; ++n2) {
            if (!on(cons.task, n2)) continue;
            const double begin = x[core.ts(cons.task, n2).value];
            if (begin < done - eps) {
              fail(kRuleSync,
                   fmt::format("{} at event point {} starts at {} before producer {} at "
                               "event point {} finishes at {}",
                               task_id(cons.task), n2, begin, task_id(prod.task), n,
                               done));
            }
          }
        }
      }
    }
  }
  out.report.rules.push_back(kRuleSync);

  out.report.max_residual = max_violation(model, x);
  if (out.report.max_residual > eps) {
    std::string worst;
    double amount = 0.0;
    for (const Constraint& c : model.constraints()) {
      const double v = violation(c, x);
      if (v > amount) {
        amount = v;
        worst = c.name;
      }
    }
    fail(kRuleResidual, fmt::format("largest violation {} (row {})",
                                    out.report.max_residual,
                                    worst.empty() ? "variable bounds" : worst));
  }
  out.report.rules.push_back(kRuleResidual);

  for (int u = 0; u < idx.num_units(); ++u) {
    UnitSchedule unit{inst.units[u].id, {}};
    for (const Active& a : active[u]) {
      const TaskKind kind = idx.kind(a.task);
      unit.entries.push_back({a.event, task_id(a.task), kind, a.start, a.finish, a.batch});
      if (is_changeover(kind)) out.changeover_hours += a.finish - a.start;
    }
    out.units.push_back(std::move(unit));
  }
  return out;
}

std::string schedule_to_json(const Schedule& schedule) {
  nlohmann::ordered_json doc;
  doc["units"] = nlohmann::ordered_json::array();
  for (const UnitSchedule& unit : schedule.units) {
    nlohmann::ordered_json u;
    u["unit"] = unit.unit;
    u["entries"] = nlohmann::ordered_json::array();
    for (const ScheduleEntry& e : unit.entries) {
      u["entries"].push_back({{"event", e.event},
                              {"task", e.task},
                              {"kind", std::string(to_string(e.kind))},
                              {"start", e.start},
                              {"finish", e.finish},
                              {"batch", e.batch}});
    }
    doc["units"].push_back(std::move(u));
  }
  doc["underproduction"] = schedule.underproduction;
  doc["terminal_stock"] = schedule.terminal_stock;
  doc["changeover_hours"] = schedule.changeover_hours;
  doc["verification"] = {{"rules", schedule.report.rules},
                         {"max_residual", schedule.report.max_residual}};
  return doc.dump(2);
}

std::string format_schedule(const Schedule& schedule) {
  std::string text;
  for (const UnitSchedule& unit : schedule.units) {
    text += fmt::format("unit {}\n", unit.unit);
    if (unit.entries.empty()) text += "  (idle)\n";
    for (const ScheduleEntry& e : unit.entries) {
      text += fmt::format("  n={:<3} {:<16} {:<14} {:8.3f} -> {:8.3f}", e.event, e.task,
                          to_string(e.kind), e.start, e.finish);
      if (is_processing(e.kind)) text += fmt::format("  batch {:.3f}", e.batch);
      text += "\n";
    }
  }
  for (const auto& [state, amount] : schedule.underproduction) {
    text += fmt::format("underproduction {} = {:.6g}\n", state, amount);
  }
  text += fmt::format("changeover hours = {:.6g}\n", schedule.changeover_hours);
  text += fmt::format("verification passed ({} rules, max residual {:.3g})\n",
                      schedule.report.rules.size(), schedule.report.max_residual);
  return text;
}

}  // namespace chsched
