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

#ifndef CHSCHED_SCHEDULE_HPP_
#define CHSCHED_SCHEDULE_HPP_

#include <map>
#include <string>
#include <vector>

#include "chsched/compile.hpp"
#include "chsched/solver.hpp"

namespace chsched {

struct ScheduleEntry {
  int event = 0;
  std::string task;
  TaskKind kind = TaskKind::kP1;
  double start = 0.0;
  double finish = 0.0;
  double batch = 0.0;  // 0 for changeover tasks
};

struct UnitSchedule {
  std::string unit;
  std::vector<ScheduleEntry> entries;  // sorted by event point
};

struct VerificationReport {
  // Rules checked, in order. decode() throws on the first failure, so a
  // report that exists lists only passed rules.
  std::vector<std::string> rules;
  double max_residual = 0.0;
};

struct Schedule {
  std::vector<UnitSchedule> units;
  // Demanded states only; demand minus replayed terminal stock, floored at 0.
  // Gaps within the verification tolerance plus the level slack read as 0.
  std::map<std::string, double> underproduction;
  // Replayed terminal stock of every state.
  std::map<std::string, double> terminal_stock;
  double changeover_hours = 0.0;
  VerificationReport report;

  bool empty() const;
};

// Rule names used by decode() and VerificationError::rule().
inline constexpr const char* kRuleIntegrality = "integrality";
inline constexpr const char* kRuleAllocation = "allocation";
inline constexpr const char* kRuleBatch = "batch";
inline constexpr const char* kRuleDuration = "duration";
inline constexpr const char* kRuleNonOverlap = "non-overlap";
inline constexpr const char* kRuleChangeover = "changeover";
inline constexpr const char* kRuleWindow = "window";
inline constexpr const char* kRuleInventory = "inventory";
inline constexpr const char* kRuleSync = "sync";
inline constexpr const char* kRuleResidual = "constraint residual";

// Rounds binaries, extracts the active tasks and checks the scheduling rules
// directly on the decoded plan, independent of the formulation that produced
// it. Throws VerificationError naming the first broken rule.
Schedule decode(const CompiledModel& compiled, const SolveResult& result,
                const Tolerances& tol = {});

std::string schedule_to_json(const Schedule& schedule);
std::string format_schedule(const Schedule& schedule);

}  // namespace chsched

#endif  // CHSCHED_SCHEDULE_HPP_
