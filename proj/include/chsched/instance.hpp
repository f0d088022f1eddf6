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

#ifndef CHSCHED_INSTANCE_HPP_
#define CHSCHED_INSTANCE_HPP_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chsched/errors.hpp"

namespace chsched {

enum class TaskKind { kP1, kNP1, kChangeoverC, kChangeoverC1 };

constexpr bool is_processing(TaskKind kind) {
  return kind == TaskKind::kP1 || kind == TaskKind::kNP1;
}
constexpr bool is_changeover(TaskKind kind) { return !is_processing(kind); }

std::string_view to_string(TaskKind kind);
std::optional<TaskKind> parse_task_kind(std::string_view text);

struct Unit {
  std::string id;
  bool is_main = false;
  bool operator==(const Unit&) const = default;
};

// Processing tasks carry a rate (amount per hour) and batch bounds; changeover
// tasks leave all three at zero.
struct Task {
  std::string id;
  std::string unit;
  TaskKind kind = TaskKind::kP1;
  double rate = 0.0;
  double b_min = 0.0;
  double b_max = 0.0;
  bool operator==(const Task&) const = default;
};

struct State {
  std::string id;
  bool is_final = false;
  double demand = 0.0;
  double initial_stock = 0.0;
  bool operator==(const State&) const = default;
};

enum class ArcDirection { kProduces, kConsumes };

struct StnArc {
  std::string task;
  std::string state;
  ArcDirection direction = ArcDirection::kProduces;
  double coefficient = 1.0;
  bool operator==(const StnArc&) const = default;
};

// One positive or zero entry of the changeover matrix. Pairs without an entry
// need no changeover.
struct Changeover {
  std::string from;
  std::string to;
  double ctime = 0.0;
  bool operator==(const Changeover&) const = default;
};

struct Window {
  double start = 0.0;
  double end = 0.0;
  double length() const { return end - start; }
  bool operator==(const Window&) const = default;
};

// Allowed changeover intervals, one list per changeover class.
struct WindowSet {
  std::vector<Window> c;
  std::vector<Window> c1;
  bool operator==(const WindowSet&) const = default;
};

struct Instance {
  std::vector<Unit> units;
  std::vector<Task> tasks;
  std::vector<State> states;
  std::vector<StnArc> arcs;
  std::vector<Changeover> changeovers;
  double horizon_h = 0.0;
  int n_max = 0;
  WindowSet windows;
  bool operator==(const Instance&) const = default;
};

struct Violation {
  std::string entity;
  std::string rule;
  std::string message;
};

// Returns every broken invariant; empty means the instance is well formed.
std::vector<Violation> validate(const Instance& instance);

// Non-fatal observations, e.g. a changeover that cannot fit any window.
std::vector<std::string> warnings(const Instance& instance);

// Parses the JSON instance document without running validate().
Instance parse_instance(std::string_view text);

// parse_instance() followed by validate(); throws ValidationError on
// violations.
Instance load_instance(std::string_view text);
Instance load_instance_file(const std::string& path);

std::string emit_instance(const Instance& instance);

// Integer-indexed view over a validated instance. Indices follow the order of
// Instance::tasks / units / states.
class PlantIndex {
 public:
  explicit PlantIndex(const Instance& instance);

  const Instance& instance() const { return *instance_; }
  int num_tasks() const { return static_cast<int>(instance_->tasks.size()); }
  int num_units() const { return static_cast<int>(instance_->units.size()); }
  int num_states() const { return static_cast<int>(instance_->states.size()); }

  int task_index(std::string_view id) const;
  int unit_index(std::string_view id) const;
  int state_index(std::string_view id) const;

  int unit_of(int task) const { return unit_of_[task]; }
  TaskKind kind(int task) const { return instance_->tasks[task].kind; }

  std::span<const int> tasks_on(int unit) const { return tasks_on_[unit]; }
  std::span<const int> processing_on(int unit) const {
    return processing_on_[unit];
  }
  std::span<const int> p1_on(int unit) const { return p1_on_[unit]; }
  std::span<const int> np1_on(int unit) const { return np1_on_[unit]; }
  // Changeover task of class C / C1 on the unit, if any.
  std::optional<int> changeover_c(int unit) const { return co_c_[unit]; }
  std::optional<int> changeover_c1(int unit) const { return co_c1_[unit]; }

  double ctime(int from, int to) const {
    return ctime_[static_cast<size_t>(from) * instance_->tasks.size() + to];
  }

  struct ArcRef {
    int task;
    double coefficient;
  };
  std::span<const ArcRef> producers(int state) const { return producers_[state]; }
  std::span<const ArcRef> consumers(int state) const { return consumers_[state]; }

 private:
  const Instance* instance_;
  std::vector<int> unit_of_;
  std::vector<std::vector<int>> tasks_on_, processing_on_, p1_on_, np1_on_;
  std::vector<std::optional<int>> co_c_, co_c1_;
  std::vector<double> ctime_;
  std::vector<std::vector<ArcRef>> producers_, consumers_;
};

// Parameters of a synthetic instance family used for size measurements.
struct FamilySpec {
  int n_units = 1;
  int tasks_per_unit = 3;
  double p1_fraction = 2.0 / 3.0;
  int n_max = 4;
  double changeover_density = 1.0;
  unsigned seed = 1;
};

Instance generate_family(const FamilySpec& spec);

}  // namespace chsched

#endif  // CHSCHED_INSTANCE_HPP_
