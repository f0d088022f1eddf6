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

#ifndef CHSCHED_COMPACT_HPP_
#define CHSCHED_COMPACT_HPP_

#include <map>
#include <tuple>
#include <utility>

#include "chsched/core.hpp"

namespace chsched {

// First-active-task formulation. x[i,n] = 1 iff processing task i is the
// first active processing task of its unit at event points n..n_max. Size is
// linear in n_max and in the number of tasks per unit.
//
// Groups:
//   compact.new1        x(i,n) >= wv(i,n)
//   compact.copy        x(i,n) >= x(i,n+1) - sum_{i' != i} wv(i',n)
//   compact.act_p1p1    P1 followed by another P1 activates the C task
//   compact.act_np1     NP1 followed by any other task activates the C task
//   compact.act_p1np1   P1 followed by NP1 activates the C1 task
//   compact.dur_*       matching lower bounds on changeover duration
// and, from build_windows():
//   compact.win_pick    sum_k z(i,k,n) = wv(i,n)
//   compact.win_lo      Ts(i,n) >= start_k * z(i,k,n)
//   compact.win_hi      Tf(i,n) <= end_k + H * (1 - z(i,k,n))
struct CompactVars {
  std::map<std::pair<int, int>, VarId> x;         // (task, n)
  std::map<std::tuple<int, int, int>, VarId> z;   // (changeover, window, n)

  VarId at(int task, int n) const { return x.at({task, n}); }
};

CompactVars build_compact(const CoreBuild& core, LinearModel& model);

// Explicit time-window placement for every changeover task. Throws when a
// changeover class is present but its window list is empty.
void build_windows(const CoreBuild& core, CompactVars& vars, LinearModel& model);

}  // namespace chsched

#endif  // CHSCHED_COMPACT_HPP_
