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

#ifndef CHSCHED_ROLLING_HPP_
#define CHSCHED_ROLLING_HPP_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chsched/compile.hpp"
#include "chsched/instance.hpp"
#include "chsched/schedule.hpp"
#include "chsched/solver.hpp"

namespace chsched {

inline constexpr double kHorizonLength = 12.0;

struct DemandOrder {
  std::string state;
  int horizon = 1;  // 1-based; due at the end of that horizon
  double amount = 0.0;
};

// A long planning period over one plant. Demands live in `demands`; the
// plant's own state demands must be zero.
struct MonthPlan {
  Instance plant;
  double period_h = 0.0;
  std::vector<DemandOrder> demands;
};

// {"plant": <instance document>, "period_h": 48,
//  "demands": [{"state": "PA", "horizon": 2, "amount": 20}]}
MonthPlan parse_month(std::string_view text);
MonthPlan load_month_file(const std::string& path);

struct Budgets {
  long max_binaries = 5000;
  double max_load_h = kHorizonLength;  // per main unit and horizon
};

struct HorizonSlot {
  int index = 1;
  double start_h = 0.0;
  bool selected = false;
  std::map<std::string, double> demand;  // due at the end of this horizon
  std::vector<std::string> tasks;        // demanded products plus STN closure
  std::vector<std::string> states;
  long binary_estimate = 0;
  std::map<std::string, double> load_h;  // main unit -> hours
};

struct HorizonPlan {
  MonthPlan month;
  Budgets budgets;
  std::vector<HorizonSlot> horizons;

  int selected_count() const;
};

// Rule-based selection: horizons are 12 h long; each demand goes to its due
// horizon together with the producing tasks of the product and, recursively,
// of every state those tasks consume; the selection is the longest prefix
// up to the last demanded horizon whose horizons fit both budgets. Binaries
// are estimated as (processing tasks on main units) * n_max + (all included
// tasks) * n_max, load as the sum of demand / rate per main unit. Throws
// Error when horizon 1 alone exceeds a budget or the period is not a
// multiple of 12 h.
HorizonPlan plan_horizons(const MonthPlan& month, const Budgets& budgets);

struct HorizonOutcome {
  int index = 1;
  Instance instance;  // the short-term instance that was solved
  SolveStatus status = SolveStatus::kOptimal;
  std::vector<double> objective_vector;
  SolveStats stats;
  std::optional<Schedule> schedule;
  // Keyed by every plant state.
  std::map<std::string, double> stock_in;
  std::map<std::string, double> stock_out;
  // Demanded states only.
  std::map<std::string, double> demand;  // due now plus rolled-over backlog
  std::map<std::string, double> delivered;
  std::map<std::string, double> backlog;  // carried into the next horizon
};

struct RollingResult {
  std::vector<HorizonOutcome> horizons;
  // False when a horizon stopped on a limit; later horizons were not solved.
  bool complete = true;

  std::string to_text() const;
  std::string to_json() const;
};

// Solves the selected horizons in order. Terminal stock minus deliveries
// becomes the next horizon's initial stock; unmet demand rolls forward.
RollingResult run_rolling(const HorizonPlan& plan, Formulation formulation,
                          const Limits& limits);

}  // namespace chsched

#endif  // CHSCHED_ROLLING_HPP_
