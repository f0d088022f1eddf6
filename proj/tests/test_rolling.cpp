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

#include <cmath>
#include <map>
#include <string>

#include "chsched/harness.hpp"
#include "chsched/rolling.hpp"
#include "doctest.h"
#include "json.hpp"
#include "support.hpp"

using namespace chsched;
namespace t = chsched::testing;

namespace {

MonthPlan ex1_month(double period_h, std::vector<DemandOrder> demands) {
  MonthPlan m;
  m.plant = fixture_ex1();
  for (State& s : m.plant.states) s.demand = 0;
  m.period_h = period_h;
  m.demands = std::move(demands);
  return m;
}

// Stock after one horizon recomputed from the decoded batches and the
// recorded deliveries.
std::map<std::string, double> replay(const Instance& plant, const HorizonOutcome& h) {
  std::map<std::string, double> stock = h.stock_in;
  if (h.schedule) {
    for (const UnitSchedule& u : h.schedule->units) {
      for (const ScheduleEntry& e : u.entries) {
        for (const StnArc& a : plant.arcs) {
          if (a.task != e.task) continue;
          const double sign = a.direction == ArcDirection::kProduces ? 1.0 : -1.0;
          stock[a.state] += sign * a.coefficient * e.batch;
        }
      }
    }
  }
  for (const auto& [state, amount] : h.delivered) stock[state] -= amount;
  return stock;
}

}  // namespace

TEST_CASE("month documents") {
  const MonthPlan m = parse_month(t::read_data("month4.json"));
  CHECK(m.period_h == 48);
  CHECK(m.demands.size() == 5);
  CHECK(m.demands[2].state == "PB");
  CHECK(m.demands[2].horizon == 3);
  CHECK(m.plant.tasks.size() == 5);

  auto where = [](const std::string& text) {
    try {
      parse_month(text);
    } catch (const ParseError& e) {
      return e.where();
    }
    return std::string("no error");
  };
  const std::string plant = t::read_data("ex1.json");
  CHECK(where("[]") == "$");
  CHECK(where("{") .rfind("byte", 0) == 0);
  CHECK(where(R"({"plant": {}, "period_h": 24, "demands": [], "extra": 1})") == "$.extra");
  CHECK(where(R"({"plant": {}, "period_h": 24})") == "$.demands");
  CHECK(where(R"({"plant": {"units": 3}, "period_h": 24, "demands": []})") == "$.plant");
  CHECK(where(R"({"plant": )" + plant + R"(, "period_h": "x", "demands": []})") ==
        "$.period_h");
  CHECK(where(R"({"plant": )" + plant +
              R"(, "period_h": 24, "demands": [{"state": "PA", "horizon": 1}]})") ==
        "$.demands[0]");
  CHECK(where(R"({"plant": )" + plant +
              R"(, "period_h": 24, "demands": [{"state": "PA", "horizon": 1.5, "amount": 1}]})") ==
        "$.demands[0]");
  CHECK_THROWS_AS(load_month_file(t::data_path("missing.json")), Error);

  // A plant that parses but does not validate.
  const std::string broken = t::read_data("broken.json");
  CHECK_THROWS_AS(parse_month(R"({"plant": )" + broken + R"(, "period_h": 24, "demands": []})"),
                  ValidationError);
}

TEST_CASE("horizon selection") {
  SUBCASE("a single demand in the first horizon") {
    const HorizonPlan plan = plan_horizons(ex1_month(48, {{"PA", 1, 20}}), Budgets{});
    REQUIRE(plan.horizons.size() == 4);
    CHECK(plan.selected_count() == 1);
    CHECK(plan.horizons[0].selected);
    CHECK(plan.horizons[0].demand.at("PA") == 20);
    // A plus the two changeover tasks of U1, RAW and PA.
    CHECK(plan.horizons[0].tasks == std::vector<std::string>{"A", "CO", "CO1"});
    CHECK(plan.horizons[0].states == std::vector<std::string>{"RAW", "PA"});
    CHECK(plan.horizons[0].binary_estimate == 4 * 4);
    CHECK(plan.horizons[0].load_h.at("U1") == doctest::Approx(2.0));
  }
  SUBCASE("demands in the first and third horizons select a prefix") {
    const HorizonPlan plan =
        plan_horizons(ex1_month(48, {{"PA", 1, 20}, {"PC", 3, 10}}), Budgets{});
    CHECK(plan.selected_count() == 3);
    CHECK(plan.horizons[1].selected);
    CHECK(plan.horizons[1].demand.empty());
    CHECK(plan.horizons[1].tasks.empty());
    CHECK_FALSE(plan.horizons[3].selected);
  }
  SUBCASE("a later horizon over the load budget ends the prefix") {
    const HorizonPlan plan =
        plan_horizons(ex1_month(48, {{"PA", 1, 20}, {"PC", 2, 80}, {"PA", 3, 10}}),
                      Budgets{5000, 12.0});
    CHECK(plan.selected_count() == 1);
  }
  SUBCASE("budgets horizon 1 cannot meet") {
    CHECK_THROWS_AS(plan_horizons(ex1_month(48, {{"PA", 1, 20}}), Budgets{10, 12.0}), Error);
    CHECK_THROWS_AS(plan_horizons(ex1_month(48, {{"PA", 1, 200}}), Budgets{}), Error);
  }
  SUBCASE("period and demand errors") {
    CHECK_THROWS_AS(plan_horizons(ex1_month(30, {}), Budgets{}), Error);
    CHECK_THROWS_AS(plan_horizons(ex1_month(0, {}), Budgets{}), Error);
    CHECK_THROWS_AS(plan_horizons(ex1_month(24, {{"PA", 3, 1}}), Budgets{}), Error);
    CHECK_THROWS_AS(plan_horizons(ex1_month(24, {{"RAW", 1, 1}}), Budgets{}), Error);
    CHECK_THROWS_AS(plan_horizons(ex1_month(24, {{"PZ", 1, 1}}), Budgets{}), Error);
    CHECK_THROWS_AS(plan_horizons(ex1_month(24, {{"PA", 1, -1}}), Budgets{}), Error);
    MonthPlan own = ex1_month(24, {});
    own.plant.states[1].demand = 5;
    CHECK_THROWS_AS(plan_horizons(own, Budgets{}), Error);
  }
  SUBCASE("no demand selects nothing") {
    CHECK(plan_horizons(ex1_month(24, {}), Budgets{}).selected_count() == 0);
  }
}

TEST_CASE("stock carries over between horizons") {
  const MonthPlan month = ex1_month(24, {{"PA", 1, 20}, {"PC", 2, 20}});
  const RollingResult r =
      run_rolling(plan_horizons(month, Budgets{}), Formulation::kCompact, Limits{});
  REQUIRE(r.complete);
  REQUIRE(r.horizons.size() == 2);
  const HorizonOutcome& h1 = r.horizons[0];
  const HorizonOutcome& h2 = r.horizons[1];
  CHECK(h1.stock_in.at("RAW") == 1000);
  CHECK(h1.delivered.at("PA") == doctest::Approx(20));
  CHECK(h1.backlog.empty());
  CHECK(h2.stock_in == h1.stock_out);
  CHECK(h2.delivered.at("PC") == doctest::Approx(20));
  // Everything produced came out of RAW one for one.
  double produced = 0;
  for (const HorizonOutcome& h : r.horizons) {
    for (const auto& [state, amount] : h.delivered) produced += amount;
  }
  for (const std::string s : {"PA", "PB", "PC"}) produced += h2.stock_out.at(s);
  CHECK(h2.stock_out.at("RAW") == doctest::Approx(1000 - produced));
  for (const HorizonOutcome& h : r.horizons) {
    const auto expect = replay(month.plant, h);
    for (const auto& [state, amount] : h.stock_out) {
      CHECK_MESSAGE(std::abs(amount - expect.at(state)) <= 1e-6, state);
    }
  }
}

TEST_CASE("horizons without demand solve nothing") {
  const RollingResult r = run_rolling(
      plan_horizons(ex1_month(36, {{"PA", 1, 20}, {"PA", 3, 20}}), Budgets{}),
      Formulation::kLegacy, Limits{});
  REQUIRE(r.horizons.size() == 3);
  const HorizonOutcome& idle = r.horizons[1];
  CHECK(idle.instance.tasks.empty());
  REQUIRE(idle.schedule);
  CHECK(idle.schedule->empty());
  CHECK(idle.stock_out == idle.stock_in);
  CHECK(idle.objective_vector == std::vector<double>{0.0, 0.0});
}

TEST_CASE("unmet demand rolls forward") {
  // 50 of C need 10 h, which leaves no room in horizon 1 for the 2 h of A
  // plus a changeover; the shortfall shows up as backlog.
  const MonthPlan month = ex1_month(24, {{"PC", 1, 50}, {"PA", 1, 40}, {"PA", 2, 10}});
  const RollingResult r = run_rolling(plan_horizons(month, Budgets{5000, 20.0}),
                                      Formulation::kCompact, Limits{});
  REQUIRE(r.horizons.size() == 2);
  const HorizonOutcome& h1 = r.horizons[0];
  CHECK(h1.objective_vector[0] > 1e-6);
  double backlog = 0;
  for (const auto& [state, amount] : h1.backlog) {
    CHECK(amount == doctest::Approx(h1.demand.at(state) - h1.delivered.at(state)));
    const double fresh = state == "PA" ? 10 : 0;
    CHECK(r.horizons[1].demand.at(state) == doctest::Approx(amount + fresh));
    backlog += amount;
  }
  CHECK(backlog == doctest::Approx(h1.objective_vector[0]).epsilon(1e-6));
}

TEST_CASE("both formulations agree horizon by horizon") {
  const MonthPlan month = load_month_file(t::data_path("month4.json"));
  const HorizonPlan plan = plan_horizons(month, Budgets{});
  REQUIRE(plan.selected_count() == 4);
  const RollingResult legacy = run_rolling(plan, Formulation::kLegacy, Limits{});
  const RollingResult compact = run_rolling(plan, Formulation::kCompact, Limits{});
  REQUIRE(legacy.complete);
  REQUIRE(compact.complete);
  REQUIRE(legacy.horizons.size() == 4);
  REQUIRE(compact.horizons.size() == 4);
  for (size_t h = 0; h < 4; ++h) {
    CHECK(std::abs(legacy.horizons[h].objective_vector[0] -
                   compact.horizons[h].objective_vector[0]) <= 1e-6);
    if (h + 1 < 4) {
      CHECK(legacy.horizons[h].stock_out == legacy.horizons[h + 1].stock_in);
      CHECK(compact.horizons[h].stock_out == compact.horizons[h + 1].stock_in);
    }
    const auto expect = replay(month.plant, compact.horizons[h]);
    for (const auto& [state, amount] : compact.horizons[h].stock_out) {
      CHECK(std::abs(amount - expect.at(state)) <= 1e-6);
    }
  }

  const auto doc = nlohmann::json::parse(compact.to_json());
  CHECK(doc["horizons"].size() == 4);
  CHECK(compact.to_text().find("horizon 4") != std::string::npos);
}
