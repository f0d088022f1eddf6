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

#include "chsched/legacy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

namespace chsched {

namespace {

bool c1_class(const PlantIndex& idx, int from, int to) {
  return idx.kind(from) == TaskKind::kP1 && idx.kind(to) == TaskKind::kNP1;
}

}  // namespace

LegacyVars build_legacy(const CoreBuild& core, LinearModel& model) {
  const Instance& inst = core.instance();
  const PlantIndex& idx = core.index();
  const int N = core.n_max();
  LegacyVars out;

  model.set_group_note("legacy.dur_c",
                       "inner sum guard read as i != i' (printed i != i)");
  model.set_group_note("legacy.dur_c1",
                       "inner sum guard read as i != i' (printed i != i)");

  auto id = [&](int task) -> const std::string& { return inst.tasks[task].id; };

  for (int u = 0; u < idx.num_units(); ++u) {
    if (!inst.units[u].is_main) continue;
    const auto processing = idx.processing_on(u);

    std::vector<LegacyVars::Pair> pairs;
    for (int from : processing) {
      for (int to : processing) {
        if (from != to && idx.ctime(from, to) > 0.0) {
          pairs.push_back({from, to, idx.ctime(from, to)});
        }
      }
    }

    for (const auto& p : pairs) {
      for (int n = 1; n < N; ++n) {
        out.x[{p.from, p.to, n}] =
            model.add_binary(fmt::format("x[{},{},{}]", id(p.from), id(p.to), n));
      }
    }

    // Sum of wv over processing tasks of the unit at event points strictly
    // between n and n2.
    auto add_between = [&](LinExpr& e, double coef, int n, int n2) {
      for (int mid = n + 1; mid < n2; ++mid) {
        for (int other : processing) e.add(coef, core.wv(other, mid));
      }
    };

    for (const auto& p : pairs) {
      for (int n = 1; n < N; ++n) {
        const VarId x = out.at(p.from, p.to, n);
        model.add_constraint(
            fmt::format("legacy.upper[{},{},{}]", id(p.from), id(p.to), n),
            LinExpr().add(1.0, x).add(-1.0, core.wv(p.from, n)), Sense::kLe, 0.0,
            "legacy.upper");

        for (int n2 = n + 1; n2 <= N; ++n2) {
          // x <= wv(to,n2) + (1 - sum wv(.,n2)) + sum_between wv
          LinExpr ch2;
          ch2.add(1.0, x).add(-1.0, core.wv(p.to, n2));
          for (int other : processing) ch2.add(1.0, core.wv(other, n2));
          add_between(ch2, -1.0, n, n2);
          model.add_constraint(fmt::format("legacy.ch2[{},{},{},{}]", id(p.from),
                                           id(p.to), n, n2),
                               ch2, Sense::kLe, 1.0, "legacy.ch2");

          // x >= wv(from,n) + wv(to,n2) - 1 - sum_between wv
          LinExpr ch3;
          ch3.add(1.0, x).add(-1.0, core.wv(p.from, n)).add(-1.0, core.wv(p.to, n2));
          add_between(ch3, 1.0, n, n2);
          model.add_constraint(fmt::format("legacy.ch3[{},{},{},{}]", id(p.from),
                                           id(p.to), n, n2),
                               ch3, Sense::kGe, -1.0, "legacy.ch3");
        }
      }
    }

    // Class C covers P1->P1 and NP1->anything; class C1 covers P1->NP1.
    auto emit_class = [&](std::optional<int> changeover, bool c1,
                          std::string_view act_group, std::string_view dur_group) {
      if (!changeover) return;
      const int co = *changeover;
      for (int n = 1; n < N; ++n) {
        LinExpr act, dur;
        act.add(1.0, core.wv(co, n + 1));
        dur.add(1.0, core.tf(co, n + 1)).add(-1.0, core.ts(co, n + 1));
        for (const auto& p : pairs) {
          if (c1_class(idx, p.from, p.to) != c1) continue;
          act.add(-1.0, out.at(p.from, p.to, n));
          dur.add(-p.ctime, out.at(p.from, p.to, n));
        }
        model.add_constraint(fmt::format("{}[{},{}]", act_group, id(co), n + 1), act,
                             Sense::kEq, 0.0, std::string(act_group));
        model.add_constraint(fmt::format("{}[{},{}]", dur_group, id(co), n + 1), dur,
                             Sense::kEq, 0.0, std::string(dur_group));
      }
    };
    emit_class(idx.changeover_c(u), false, "legacy.act_c", "legacy.dur_c");
    emit_class(idx.changeover_c1(u), true, "legacy.act_c1", "legacy.dur_c1");

    out.pairs.insert(out.pairs.end(), pairs.begin(), pairs.end());
  }
  return out;
}

EventWindowAssignment assign_event_windows(std::span<const Window> windows,
                                           double horizon, int n_max) {
  EventWindowAssignment out;
  for (const Window& w : windows) {
    Window clipped{std::max(0.0, w.start), std::min(horizon, w.end)};
    if (clipped.length() > 0.0) out.intervals.push_back(clipped);
  }
  const int k = static_cast<int>(out.intervals.size());
  if (k == 0) throw Error("no allowed changeover interval inside the horizon");
  if (k > n_max) {
    throw Error(fmt::format(
        "{} allowed intervals but only {} event points; some interval would "
        "receive no event point",
        k, n_max));
  }

  double total = 0.0;
  for (const Window& w : out.intervals) total += w.length();
  std::vector<double> share(k);
  for (int j = 0; j < k; ++j) share[j] = n_max * out.intervals[j].length() / total;

  out.counts.resize(k);
  for (int j = 0; j < k; ++j) out.counts[j] = static_cast<int>(std::lround(share[j]));
  const int sum = std::accumulate(out.counts.begin(), out.counts.end(), 0);
  if (sum != n_max) {
    const int last = n_max - (sum - out.counts[k - 1]);
    if (last >= 0 && std::abs(last - share[k - 1]) < 1.0) {
      out.counts[k - 1] = last;
    } else {
      int assigned = 0;
      std::vector<int> order(k);
      for (int j = 0; j < k; ++j) {
        out.counts[j] = static_cast<int>(std::floor(share[j]));
        assigned += out.counts[j];
        order[j] = j;
      }
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return share[a] - std::floor(share[a]) > share[b] - std::floor(share[b]);
      });
      for (int j = 0; assigned < n_max; ++j, ++assigned) ++out.counts[order[j]];
    }
  }

  for (int j = 0; j < k; ++j) {
    out.interval_of_event.insert(out.interval_of_event.end(), out.counts[j], j);
  }
  return out;
}

void build_event_window_blockage(const CoreBuild& core, LinearModel& model) {
  const Instance& inst = core.instance();
  const PlantIndex& idx = core.index();
  const double H = inst.horizon_h;

  auto emit = [&](int task, const std::vector<Window>& windows, std::string_view label) {
    if (windows.empty()) {
      throw Error(fmt::format("changeover task {} needs a non-empty '{}' window list",
                              inst.tasks[task].id, label));
    }
    const auto assignment = assign_event_windows(windows, H, core.n_max());
    for (int n = 1; n <= core.n_max(); ++n) {
      const Window& w = assignment.window_for(n);
      model.add_constraint(
          fmt::format("legacy.win_lo[{},{}]", inst.tasks[task].id, n),
          LinExpr().add(1.0, core.ts(task, n)), Sense::kGe, w.start, "legacy.win_lo");
      model.add_constraint(
          fmt::format("legacy.win_hi[{},{}]", inst.tasks[task].id, n),
          LinExpr().add(1.0, core.tf(task, n)).add(H, core.wv(task, n)), Sense::kLe,
          w.end + H, "legacy.win_hi");
    }
  };

  for (int u = 0; u < idx.num_units(); ++u) {
    if (auto c = idx.changeover_c(u)) emit(*c, inst.windows.c, "c");
    if (auto c1 = idx.changeover_c1(u)) emit(*c1, inst.windows.c1, "c1");
  }
}

}  // namespace chsched
