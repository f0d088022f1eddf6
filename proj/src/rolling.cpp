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

#include "chsched/rolling.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"

namespace chsched {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// Backlog below this is treated as delivered.
constexpr double kBacklogFloor = 1e-6;

struct Content {
  std::set<std::string> tasks;
  std::set<std::string> states;
};

// Producers of every demanded state and, recursively, of the states they
// consume, plus the changeover tasks of main units that run any of them.
Content closure(const Instance& plant, const std::map<std::string, double>& demand) {
  Content out;
  std::vector<std::string> queue;
  for (const auto& [state, amount] : demand) {
    if (amount > 0.0 && out.states.insert(state).second) queue.push_back(state);
  }
  while (!queue.empty()) {
    const std::string state = queue.back();
    queue.pop_back();
    for (const StnArc& arc : plant.arcs) {
      if (arc.state != state || arc.direction != ArcDirection::kProduces) continue;
      if (!out.tasks.insert(arc.task).second) continue;
      for (const StnArc& other : plant.arcs) {
        if (other.task != arc.task) continue;
        const bool fresh = out.states.insert(other.state).second;
        if (fresh && other.direction == ArcDirection::kConsumes) queue.push_back(other.state);
      }
    }
  }
  std::set<std::string> busy_units;
  for (const Task& t : plant.tasks) {
    if (out.tasks.contains(t.id)) busy_units.insert(t.unit);
  }
  for (const Task& t : plant.tasks) {
    if (is_changeover(t.kind) && busy_units.contains(t.unit)) out.tasks.insert(t.id);
  }
  return out;
}

const Unit& unit_named(const Instance& plant, const std::string& id) {
  for (const Unit& u : plant.units) {
    if (u.id == id) return u;
  }
  throw Error(fmt::format("unknown unit '{}'", id));
}

Instance restrict(const Instance& plant, const Content& content,
                  const std::map<std::string, double>& stock,
                  const std::map<std::string, double>& demand) {
  Instance inst;
  inst.units = plant.units;
  inst.horizon_h = kHorizonLength;
  inst.n_max = plant.n_max;
  inst.windows = plant.windows;
  for (const Task& t : plant.tasks) {
    if (content.tasks.contains(t.id)) inst.tasks.push_back(t);
  }
  for (const State& s : plant.states) {
    if (!content.states.contains(s.id)) continue;
    State copy = s;
    copy.initial_stock = stock.at(s.id);
    const auto due = demand.find(s.id);
    copy.demand = due == demand.end() ? 0.0 : due->second;
    inst.states.push_back(copy);
  }
  for (const StnArc& a : plant.arcs) {
    if (content.tasks.contains(a.task)) inst.arcs.push_back(a);
  }
  for (const Changeover& c : plant.changeovers) {
    if (content.tasks.contains(c.from) && content.tasks.contains(c.to)) {
      inst.changeovers.push_back(c);
    }
  }
  return inst;
}

}  // namespace

MonthPlan parse_month(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(fmt::format("byte {}", e.byte), e.what());
  }
  if (!doc.is_object()) throw ParseError("$", "month document must be an object");
  for (const auto& [key, value] : doc.items()) {
    if (key != "plant" && key != "period_h" && key != "demands") {
      throw ParseError("$." + key, "unknown key");
    }
  }
  for (const char* key : {"plant", "period_h", "demands"}) {
    if (!doc.contains(key)) throw ParseError(std::string("$.") + key, "missing");
  }

  MonthPlan month;
  try {
    month.plant = load_instance(doc["plant"].dump());
  } catch (const ParseError& e) {
    throw ParseError("$.plant", e.what());
  }
  if (!doc["period_h"].is_number()) throw ParseError("$.period_h", "must be a number");
  month.period_h = doc["period_h"].get<double>();
  if (!doc["demands"].is_array()) throw ParseError("$.demands", "must be an array");
  for (size_t k = 0; k < doc["demands"].size(); ++k) {
    const json& d = doc["demands"][k];
    const std::string where = fmt::format("$.demands[{}]", k);
    if (!d.is_object() || !d.contains("state") || !d.contains("horizon") ||
        !d.contains("amount") || d.size() != 3) {
      throw ParseError(where, "expected exactly {state, horizon, amount}");
    }
    if (!d["state"].is_string() || !d["horizon"].is_number_integer() ||
        !d["amount"].is_number()) {
      throw ParseError(where, "state must be a string, horizon an integer, amount a number");
    }
    month.demands.push_back(
        {d["state"].get<std::string>(), d["horizon"].get<int>(), d["amount"].get<double>()});
  }
  return month;
}

MonthPlan load_month_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot open '{}'", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_month(buffer.str());
}

int HorizonPlan::selected_count() const {
  return static_cast<int>(std::count_if(horizons.begin(), horizons.end(),
                                        [](const HorizonSlot& h) { return h.selected; }));
}

HorizonPlan plan_horizons(const MonthPlan& month, const Budgets& budgets) {
  const Instance& plant = month.plant;
  const double count_f = month.period_h / kHorizonLength;
  if (!(month.period_h > 0.0) || count_f != std::floor(count_f)) {
    throw Error(fmt::format("period of {} h is not a positive multiple of {} h",
                            month.period_h, kHorizonLength));
  }
  const int count = static_cast<int>(count_f);
  for (const State& s : plant.states) {
    if (s.demand != 0.0) {
      throw Error(fmt::format("plant state {} carries a demand; use the demands list", s.id));
    }
  }

  HorizonPlan plan;
  plan.month = month;
  plan.budgets = budgets;
  plan.horizons.resize(count);
  for (int h = 0; h < count; ++h) {
    plan.horizons[h].index = h + 1;
    plan.horizons[h].start_h = h * kHorizonLength;
  }
  int last = 0;
  for (const DemandOrder& d : month.demands) {
    const auto state = std::find_if(plant.states.begin(), plant.states.end(),
                                    [&](const State& s) { return s.id == d.state; });
    if (state == plant.states.end()) throw Error(fmt::format("unknown state '{}'", d.state));
    if (!state->is_final) {
      throw Error(fmt::format("demand on non-final state '{}'", d.state));
    }
    if (d.horizon < 1 || d.horizon > count) {
      throw Error(fmt::format("demand for {} due in horizon {} outside 1..{}", d.state,
                              d.horizon, count));
    }
    if (!(d.amount >= 0.0)) throw Error(fmt::format("negative demand for {}", d.state));
    if (d.amount == 0.0) continue;
    plan.horizons[d.horizon - 1].demand[d.state] += d.amount;
    last = std::max(last, d.horizon);
  }

  const long n_max = plant.n_max;
  for (int h = 0; h < last; ++h) {
    HorizonSlot& slot = plan.horizons[h];
    const Content content = closure(plant, slot.demand);
    for (const Task& t : plant.tasks) {
      if (!content.tasks.contains(t.id)) continue;
      slot.tasks.push_back(t.id);
      slot.binary_estimate += n_max;
      if (is_processing(t.kind) && unit_named(plant, t.unit).is_main) {
        slot.binary_estimate += n_max;
      }
    }
    for (const State& s : plant.states) {
      if (content.states.contains(s.id)) slot.states.push_back(s.id);
    }
    for (const auto& [state, amount] : slot.demand) {
      for (const StnArc& arc : plant.arcs) {
        if (arc.state != state || arc.direction != ArcDirection::kProduces) continue;
        const Task& task = *std::find_if(plant.tasks.begin(), plant.tasks.end(),
                                         [&](const Task& t) { return t.id == arc.task; });
        if (unit_named(plant, task.unit).is_main) slot.load_h[task.unit] += amount / task.rate;
        break;
      }
    }

    std::string overflow;
    if (slot.binary_estimate > budgets.max_binaries) {
      overflow = fmt::format("needs about {} binaries, budget {}", slot.binary_estimate,
                             budgets.max_binaries);
    }
    for (const auto& [unit, load] : slot.load_h) {
      if (overflow.empty() && load > budgets.max_load_h) {
        overflow = fmt::format("loads unit {} for {} h, budget {} h", unit, load,
                               budgets.max_load_h);
      }
    }
    if (!overflow.empty()) {
      if (h == 0) throw Error("horizon 1 alone exceeds the budget: it " + overflow);
      break;
    }
    slot.selected = true;
  }
  return plan;
}

RollingResult run_rolling(const HorizonPlan& plan, Formulation formulation,
                          const Limits& limits) {
  const Instance& plant = plan.month.plant;
  RollingResult result;
  std::map<std::string, double> stock;
  for (const State& s : plant.states) stock[s.id] = s.initial_stock;
  std::map<std::string, double> backlog;

  for (const HorizonSlot& slot : plan.horizons) {
    if (!slot.selected) break;
    HorizonOutcome out;
    out.index = slot.index;
    out.stock_in = stock;
    out.demand = slot.demand;
    for (const auto& [state, amount] : backlog) out.demand[state] += amount;

    const Content content = closure(plant, out.demand);
    out.instance = restrict(plant, content, stock, out.demand);
    out.stock_out = stock;
    if (out.instance.tasks.empty() && out.instance.states.empty()) {
      out.objective_vector = {0.0, 0.0};
      out.schedule = Schedule{};
      result.horizons.push_back(std::move(out));
      continue;
    }

    const auto compiled = compile(out.instance, formulation);
    const SolveResult solved = solve(compiled->model, limits);
    out.status = solved.status;
    out.objective_vector = solved.objective_vector;
    out.stats = solved.stats;
    if (solved.status != SolveStatus::kOptimal) {
      result.complete = false;
      result.horizons.push_back(std::move(out));
      break;
    }
    out.schedule = decode(*compiled, solved);

    backlog.clear();
    for (const auto& [state, terminal] : out.schedule->terminal_stock) {
      double left = terminal;
      const auto due = out.demand.find(state);
      if (due != out.demand.end()) {
        const double delivered = std::clamp(terminal, 0.0, due->second);
        out.delivered[state] = delivered;
        left = terminal - delivered;
        const double unmet = due->second - delivered;
        if (unmet > kBacklogFloor) {
          out.backlog[state] = unmet;
          backlog[state] = unmet;
        }
      }
      out.stock_out[state] = left;
    }
    stock = out.stock_out;
    result.horizons.push_back(std::move(out));
  }
  return result;
}

std::string RollingResult::to_text() const {
  std::string text;
  for (const HorizonOutcome& h : horizons) {
    text += fmt::format("horizon {} [{}]: {} tasks, status {}, objectives [", h.index,
                        h.index * kHorizonLength - kHorizonLength,
                        h.instance.tasks.size(), to_string(h.status));
    for (size_t k = 0; k < h.objective_vector.size(); ++k) {
      text += (k ? ", " : "") + format_number(h.objective_vector[k]);
    }
    text += "]\n";
    for (const auto& [state, amount] : h.demand) {
      const auto got = h.delivered.find(state);
      text += fmt::format("  demand {} = {:.6g}, delivered {:.6g}\n", state, amount,
                          got == h.delivered.end() ? 0.0 : got->second);
    }
    for (const auto& [state, amount] : h.stock_out) {
      if (amount != h.stock_in.at(state)) {
        text += fmt::format("  stock {}: {:.6g} -> {:.6g}\n", state, h.stock_in.at(state),
                            amount);
      }
    }
    if (h.schedule) {
      std::istringstream lines(format_schedule(*h.schedule));
      for (std::string line; std::getline(lines, line);) text += "  | " + line + "\n";
    }
  }
  if (!complete) text += "stopped early on a solver limit\n";
  return text;
}

std::string RollingResult::to_json() const {
  ordered_json doc;
  doc["complete"] = complete;
  doc["horizons"] = ordered_json::array();
  for (const HorizonOutcome& h : horizons) {
    ordered_json j;
    j["index"] = h.index;
    j["status"] = std::string(to_string(h.status));
    j["objective_vector"] = h.objective_vector;
    j["nodes"] = h.stats.nodes;
    j["stock_in"] = h.stock_in;
    j["stock_out"] = h.stock_out;
    j["demand"] = h.demand;
    j["delivered"] = h.delivered;
    j["backlog"] = h.backlog;
    j["schedule"] = h.schedule ? ordered_json::parse(schedule_to_json(*h.schedule))
                               : ordered_json(nullptr);
    doc["horizons"].push_back(std::move(j));
  }
  return doc.dump(2);
}

}  // namespace chsched
