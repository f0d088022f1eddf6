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

#include "chsched/compact.hpp"

#include <fmt/format.h>

namespace chsched {

CompactVars build_compact(const CoreBuild& core, LinearModel& model) {
  const Instance& inst = core.instance();
  const PlantIndex& idx = core.index();
  const int N = core.n_max();
  const double H = inst.horizon_h;
  CompactVars out;

  model.set_group_note("compact.dur_p1np1",
                       "quantified over the C1 task of the unit (printed as I^c)");
  model.set_group_note("compact.act_np1", "successor sum over all processing tasks");

  auto id = [&](int task) -> const std::string& { return inst.tasks[task].id; };

  for (int u = 0; u < idx.num_units(); ++u) {
    if (!inst.units[u].is_main) continue;
    const auto processing = idx.processing_on(u);

    for (int i : processing) {
      for (int n = 1; n <= N; ++n) {
        out.x[{i, n}] = model.add_binary(fmt::format("x[{},{}]", id(i), n));
      }
    }

    for (int i : processing) {
      for (int n = 1; n <= N; ++n) {
        model.add_constraint(fmt::format("compact.new1[{},{}]", id(i), n),
                             LinExpr().add(1.0, out.at(i, n)).add(-1.0, core.wv(i, n)),
                             Sense::kGe, 0.0, "compact.new1");
      }
      for (int n = 1; n < N; ++n) {
        LinExpr e;
        e.add(1.0, out.at(i, n)).add(-1.0, out.at(i, n + 1));
        for (int other : processing) {
          if (other != i) e.add(1.0, core.wv(other, n));
        }
        model.add_constraint(fmt::format("compact.copy[{},{}]", id(i), n), e,
                             Sense::kGe, 0.0, "compact.copy");
      }
    }

    // wv(co,n+1) >= sum_{successors} x(i',n+1) + wv(i,n) - 1
    // Tf(co,n+1) - Ts(co,n+1) >= sum Ctime(i,i') x(i',n+1) - H (1 - wv(i,n))
    auto emit = [&](std::optional<int> changeover, std::span<const int> from_set,
                    std::span<const int> successor_set, std::string_view suffix) {
      if (!changeover) return;
      const int co = *changeover;
      for (int i : from_set) {
        for (int n = 1; n < N; ++n) {
          LinExpr act, dur;
          act.add(1.0, core.wv(co, n + 1)).add(-1.0, core.wv(i, n));
          dur.add(1.0, core.tf(co, n + 1))
              .add(-1.0, core.ts(co, n + 1))
              .add(-H, core.wv(i, n));
          for (int next : successor_set) {
            if (next == i) continue;
            act.add(-1.0, out.at(next, n + 1));
            dur.add(-idx.ctime(i, next), out.at(next, n + 1));
          }
          model.add_constraint(
              fmt::format("compact.act_{}[{},{},{}]", suffix, id(i), id(co), n), act,
              Sense::kGe, -1.0, fmt::format("compact.act_{}", suffix));
          model.add_constraint(
              fmt::format("compact.dur_{}[{},{},{}]", suffix, id(i), id(co), n), dur,
              Sense::kGe, -H, fmt::format("compact.dur_{}", suffix));
        }
      }
    };
    emit(idx.changeover_c(u), idx.p1_on(u), idx.p1_on(u), "p1p1");
    emit(idx.changeover_c(u), idx.np1_on(u), processing, "np1");
    emit(idx.changeover_c1(u), idx.p1_on(u), idx.np1_on(u), "p1np1");
  }
  return out;
}

void build_windows(const CoreBuild& core, CompactVars& vars, LinearModel& model) {
  const Instance& inst = core.instance();
  const PlantIndex& idx = core.index();
  const int N = core.n_max();
  const double H = inst.horizon_h;

  auto emit = [&](int co, const std::vector<Window>& windows, std::string_view label) {
    const std::string& id = inst.tasks[co].id;
    if (windows.empty()) {
      throw Error(fmt::format("changeover task {} needs a non-empty '{}' window list",
                              id, label));
    }
    const int K = static_cast<int>(windows.size());
    for (int n = 1; n <= N; ++n) {
      LinExpr pick;
      for (int k = 0; k < K; ++k) {
        const VarId z = model.add_binary(fmt::format("z[{},{},{}]", id, k + 1, n));
        vars.z[{co, k, n}] = z;
        pick.add(1.0, z);
      }
      pick.add(-1.0, core.wv(co, n));
      model.add_constraint(fmt::format("compact.win_pick[{},{}]", id, n), pick,
                           Sense::kEq, 0.0, "compact.win_pick");
      for (int k = 0; k < K; ++k) {
        const VarId z = vars.z.at({co, k, n});
        model.add_constraint(
            fmt::format("compact.win_lo[{},{},{}]", id, k + 1, n),
            LinExpr().add(1.0, core.ts(co, n)).add(-windows[k].start, z), Sense::kGe,
            0.0, "compact.win_lo");
        model.add_constraint(
            fmt::format("compact.win_hi[{},{},{}]", id, k + 1, n),
            LinExpr().add(1.0, core.tf(co, n)).add(H, z), Sense::kLe,
            windows[k].end + H, "compact.win_hi");
      }
    }
  };

  for (int u = 0; u < idx.num_units(); ++u) {
    if (auto c = idx.changeover_c(u)) emit(*c, inst.windows.c, "c");
    if (auto c1 = idx.changeover_c1(u)) emit(*c1, inst.windows.c1, "c1");
  }
}

}  // namespace chsched
