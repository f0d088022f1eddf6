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

#ifndef CHSCHED_LEGACY_HPP_
#define CHSCHED_LEGACY_HPP_

#include <map>
#include <span>
#include <tuple>
#include <vector>

#include "chsched/core.hpp"

namespace chsched {

// Pairwise changeover formulation. One binary x[from,to,n] per ordered pair of
// processing tasks with positive changeover time and per n < n_max; x = 1 iff
// `from` runs at n and `to` is the next active processing task on the unit.
//
// Groups:
//   legacy.upper   x <= wv(from, n)
//   legacy.ch2     x is 0 unless `to` is the next active processing task
//   legacy.ch3     x is 1 if it is
//   legacy.act_c   wv(C task, n+1) = sum of class-C pair variables
//   legacy.act_c1  wv(C1 task, n+1) = sum of P1->NP1 pair variables
//   legacy.dur_c   duration of the C task at n+1 = sum Ctime * x
//   legacy.dur_c1  same for the C1 task
struct LegacyVars {
  struct Pair {
    int from;
    int to;
    double ctime;
  };
  std::vector<Pair> pairs;
  // (from, to, n) -> x
  std::map<std::tuple<int, int, int>, VarId> x;

  VarId at(int from, int to, int n) const { return x.at({from, to, n}); }
};

LegacyVars build_legacy(const CoreBuild& core, LinearModel& model);

// Event points of one changeover class split over its allowed intervals.
struct EventWindowAssignment {
  std::vector<Window> intervals;
  std::vector<int> counts;
  // 0-based interval index for event point n at position n-1.
  std::vector<int> interval_of_event;

  const Window& window_for(int n) const { return intervals[interval_of_event[n - 1]]; }
};

// Splits n_max event points over `windows` (clipped to [0, horizon]) in
// proportion to their lengths. Counts are rounded to the closest integer and
// the last interval absorbs any rounding surplus or deficit; when that would
// leave the last count negative or a full point away from its share, the
// split falls back to largest remainders. Earlier points go to earlier
// intervals. Throws when there are more intervals than event points.
EventWindowAssignment assign_event_windows(std::span<const Window> windows,
                                           double horizon, int n_max);

// Emits legacy.win_lo / legacy.win_hi for every changeover task, using the
// `c` windows for class C and `c1` for class C1.
void build_event_window_blockage(const CoreBuild& core, LinearModel& model);

}  // namespace chsched

#endif  // CHSCHED_LEGACY_HPP_
