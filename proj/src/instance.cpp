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

#include "chsched/instance.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"

namespace chsched {

using nlohmann::json;
using nlohmann::ordered_json;

ValidationError::ValidationError(std::vector<std::string> messages)
    : Error([&] {
        std::string text = "instance failed validation";
        for (const auto& m : messages) text += "\n  " + m;
        return text;
      }()),
      messages_(std::move(messages)) {}

std::string_view to_string(TaskKind kind) {
  switch (kind) {
    case TaskKind::kP1:
      return "P1";
    case TaskKind::kNP1:
      return "NP1";
    case TaskKind::kChangeoverC:
      return "CHANGEOVER_C";
    case TaskKind::kChangeoverC1:
      return "CHANGEOVER_C1";
  }
  return "?";
}

std::optional<TaskKind> parse_task_kind(std::string_view text) {
  for (TaskKind k : {TaskKind::kP1, TaskKind::kNP1, TaskKind::kChangeoverC,
                     TaskKind::kChangeoverC1}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

namespace {

// Switching from a P1 task to an NP1 task uses the C1 changeover class.
bool is_c1_pair(TaskKind from, TaskKind to) {
  return from == TaskKind::kP1 && to == TaskKind::kNP1;
}

class ViolationSink {
 public:
  void add(std::string entity, std::string rule, std::string message) {
    out_.push_back({std::move(entity), std::move(rule), std::move(message)});
  }
  std::vector<Violation> take() { return std::move(out_); }

 private:
  std::vector<Violation> out_;
};

void check_windows(const std::vector<Window>& list, std::string_view label,
                   ViolationSink& sink) {
  for (size_t k = 0; k < list.size(); ++k) {
    const Window& w = list[k];
    std::string entity = fmt::format("windows.{}[{}]", label, k);
    if (!(w.start < w.end)) {
      sink.add(entity, "window order",
               fmt::format("start {} is not before end {}", w.start, w.end));
    }
    if (w.start < 0.0) {
      sink.add(entity, "window start", "window starts before time 0");
    }
    if (k > 0 && !(list[k - 1].end < w.start)) {
      sink.add(entity, "window overlap",
               "windows must be sorted ascending and pairwise disjoint");
    }
  }
}

}  // namespace

std::vector<Violation> validate(const Instance& inst) {
  ViolationSink sink;

  if (!(inst.horizon_h > 0.0)) {
    sink.add("horizon_h", "horizon", "horizon must be positive");
  }
  if (inst.n_max < 1) {
    sink.add("n_max", "event points", "n_max must be at least 1");
  }

  std::map<std::string, const Unit*> units;
  for (const Unit& u : inst.units) {
    if (!units.emplace(u.id, &u).second) {
      sink.add("unit " + u.id, "duplicate id", "unit id used twice");
    }
  }
  std::map<std::string, const Task*> tasks;
  for (const Task& t : inst.tasks) {
    if (!tasks.emplace(t.id, &t).second) {
      sink.add("task " + t.id, "duplicate id", "task id used twice");
    }
  }
  std::map<std::string, const State*> states;
  for (const State& s : inst.states) {
    if (!states.emplace(s.id, &s).second) {
      sink.add("state " + s.id, "duplicate id", "state id used twice");
    }
  }

  std::map<std::string, int> c_count, c1_count;
  for (const Task& t : inst.tasks) {
    std::string entity = "task " + t.id;
    auto unit = units.find(t.unit);
    if (unit == units.end()) {
      sink.add(entity, "unresolved unit",
               fmt::format("unknown unit '{}'", t.unit));
    }
    if (is_processing(t.kind)) {
      if (!(t.rate > 0.0)) sink.add(entity, "rate", "rate must be positive");
      if (!(0.0 <= t.b_min && t.b_min <= t.b_max)) {
        sink.add(entity, "batch bounds",
                 fmt::format("need 0 <= b_min <= b_max, got b_min={} b_max={}",
                             t.b_min, t.b_max));
      }
    } else {
      if (t.rate != 0.0 || t.b_min != 0.0 || t.b_max != 0.0) {
        sink.add(entity, "changeover fields",
                 "changeover tasks carry no rate or batch bounds");
      }
      if (unit != units.end() && !unit->second->is_main) {
        sink.add(entity, "changeover unit",
                 "changeover tasks live on main units only");
      }
      auto& counter = t.kind == TaskKind::kChangeoverC ? c_count : c1_count;
      if (++counter[t.unit] == 2) {
        sink.add("unit " + t.unit, "changeover tasks per unit",
                 fmt::format("more than one {} task on the unit",
                             to_string(t.kind)));
      }
    }
  }

  for (const State& s : inst.states) {
    std::string entity = "state " + s.id;
    if (s.demand < 0.0 || s.initial_stock < 0.0) {
      sink.add(entity, "amounts", "demand and initial stock must be >= 0");
    }
    if (s.demand > 0.0 && !s.is_final) {
      sink.add(entity, "demand on non-final state",
               "only final states may carry demand");
    }
  }

  std::map<std::pair<std::string, ArcDirection>, double> coefficient_sums;
  for (size_t a = 0; a < inst.arcs.size(); ++a) {
    const StnArc& arc = inst.arcs[a];
    std::string entity = fmt::format("arc[{}] {}->{}", a, arc.task, arc.state);
    auto task = tasks.find(arc.task);
    if (task == tasks.end()) {
      sink.add(entity, "unresolved task",
               fmt::format("unknown task '{}'", arc.task));
    } else if (is_changeover(task->second->kind)) {
      sink.add(entity, "arc on changeover task",
               "changeover tasks neither consume nor produce");
    }
    if (!states.contains(arc.state)) {
      sink.add(entity, "unresolved state",
               fmt::format("unknown state '{}'", arc.state));
    }
    if (!(arc.coefficient > 0.0 && arc.coefficient <= 1.0)) {
      sink.add(entity, "coefficient range", "coefficient must lie in (0, 1]");
    }
    coefficient_sums[{arc.task, arc.direction}] += arc.coefficient;
  }
  for (const auto& [key, sum] : coefficient_sums) {
    if (sum > 1.0 + 1e-9) {
      sink.add("task " + key.first, "coefficient sum",
               fmt::format("{} coefficients sum to {} > 1",
                           key.second == ArcDirection::kProduces ? "production"
                                                                 : "consumption",
                           sum));
    }
  }

  std::set<std::pair<std::string, std::string>> seen_pairs;
  std::set<std::string> needs_c, needs_c1;
  for (const Changeover& co : inst.changeovers) {
    std::string entity = fmt::format("changeover {}->{}", co.from, co.to);
    if (!seen_pairs.emplace(co.from, co.to).second) {
      sink.add(entity, "duplicate entry", "pair listed twice");
    }
    if (co.ctime < 0.0) sink.add(entity, "negative ctime", "Ctime must be >= 0");
    if (co.ctime > inst.horizon_h) {
      sink.add(entity, "ctime exceeds horizon",
               fmt::format("Ctime {} exceeds horizon {}", co.ctime,
                           inst.horizon_h));
    }
    if (co.from == co.to) {
      sink.add(entity, "self changeover", "from and to must differ");
    }
    auto from = tasks.find(co.from);
    auto to = tasks.find(co.to);
    if (from == tasks.end() || to == tasks.end()) {
      sink.add(entity, "unresolved task", "changeover references unknown task");
      continue;
    }
    const Task& tf = *from->second;
    const Task& tt = *to->second;
    if (!is_processing(tf.kind) || !is_processing(tt.kind)) {
      sink.add(entity, "processing tasks only",
               "changeover entries connect processing tasks");
      continue;
    }
    if (tf.unit != tt.unit) {
      sink.add(entity, "same unit", "both tasks must share a unit");
      continue;
    }
    auto unit = units.find(tf.unit);
    if (unit != units.end() && !unit->second->is_main) {
      sink.add(entity, "main unit", "changeovers are defined on main units");
    }
    if (co.ctime > 0.0) {
      (is_c1_pair(tf.kind, tt.kind) ? needs_c1 : needs_c).insert(tf.unit);
    }
  }
  for (const auto& u : needs_c) {
    if (!c_count.contains(u)) {
      sink.add("unit " + u, "missing C changeover task",
               "positive Ctime entries require a CHANGEOVER_C task");
    }
  }
  for (const auto& u : needs_c1) {
    if (!c1_count.contains(u)) {
      sink.add("unit " + u, "missing C1 changeover task",
               "positive P1->NP1 Ctime entries require a CHANGEOVER_C1 task");
    }
  }

  check_windows(inst.windows.c, "c", sink);
  check_windows(inst.windows.c1, "c1", sink);
  return sink.take();
}

std::vector<std::string> warnings(const Instance& inst) {
  std::map<std::string, const Task*> tasks;
  for (const Task& t : inst.tasks) tasks.emplace(t.id, &t);
  double min_c = 0.0, min_c1 = 0.0;
  for (const Changeover& co : inst.changeovers) {
    if (co.ctime <= 0.0) continue;
    auto f = tasks.find(co.from);
    auto t = tasks.find(co.to);
    if (f == tasks.end() || t == tasks.end()) continue;
    double& slot = is_c1_pair(f->second->kind, t->second->kind) ? min_c1 : min_c;
    slot = slot == 0.0 ? co.ctime : std::min(slot, co.ctime);
  }
  std::vector<std::string> out;
  auto check = [&](double min_ctime, const std::vector<Window>& windows,
                   std::string_view label) {
    if (min_ctime <= 0.0 || windows.empty()) return;
    double longest = 0.0;
    for (const Window& w : windows) longest = std::max(longest, w.length());
    if (min_ctime > longest) {
      out.push_back(fmt::format(
          "shortest positive {} changeover ({} h) exceeds the longest {} "
          "window ({} h); such changeovers cannot be placed",
          label, min_ctime, label, longest));
    }
  };
  check(min_c, inst.windows.c, "c");
  check(min_c1, inst.windows.c1, "c1");
  return out;
}

// ---------------------------------------------------------------------------
// JSON document

namespace {

class Reader {
 public:
  Reader(const json& node, std::string path)
      : node_(node), path_(std::move(path)) {}

  void expect_object(std::initializer_list<std::string_view> allowed) const {
    if (!node_.is_object()) throw ParseError(path_, "expected an object");
    for (const auto& [key, value] : node_.items()) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        throw ParseError(path_ + "." + key, "unknown key");
      }
    }
  }

  const json& required(std::string_view key) const {
    auto it = node_.find(key);
    if (it == node_.end()) {
      throw ParseError(path_ + "." + std::string(key), "missing required field");
    }
    return *it;
  }

  std::string string(std::string_view key) const {
    const json& v = required(key);
    if (v.is_array()) {
      throw ParseError(child(key),
                       "expected a single id; multi-unit suitability is not "
                       "supported");
    }
    if (!v.is_string()) throw ParseError(child(key), "expected a string");
    return v.get<std::string>();
  }

  double number(std::string_view key) const { return as_number(required(key), key); }

  double number_or(std::string_view key, double fallback) const {
    auto it = node_.find(key);
    return it == node_.end() ? fallback : as_number(*it, key);
  }

  bool flag_or(std::string_view key, bool fallback) const {
    auto it = node_.find(key);
    if (it == node_.end()) return fallback;
    if (!it->is_boolean()) throw ParseError(child(key), "expected true/false");
    return it->get<bool>();
  }

  bool has(std::string_view key) const { return node_.contains(key); }

  std::string child(std::string_view key) const {
    return path_ + "." + std::string(key);
  }

 private:
  double as_number(const json& v, std::string_view key) const {
    if (!v.is_number()) throw ParseError(child(key), "expected a number");
    return v.get<double>();
  }

  const json& node_;
  std::string path_;
};

const json& array_field(const Reader& r, std::string_view key) {
  const json& v = r.required(key);
  if (!v.is_array()) throw ParseError(r.child(key), "expected an array");
  return v;
}

std::vector<Window> parse_windows(const json& list, const std::string& path) {
  if (!list.is_array()) throw ParseError(path, "expected an array of pairs");
  std::vector<Window> out;
  for (size_t k = 0; k < list.size(); ++k) {
    const json& pair = list[k];
    std::string here = fmt::format("{}[{}]", path, k);
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() ||
        !pair[1].is_number()) {
      throw ParseError(here, "expected [start, end]");
    }
    out.push_back({pair[0].get<double>(), pair[1].get<double>()});
  }
  return out;
}

int line_of(std::string_view text, size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + byte, '\n'));
}

}  // namespace

Instance parse_instance(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(fmt::format("line {}", line_of(text, e.byte)),
                     "malformed JSON");
  }

  Reader top(doc, "$");
  top.expect_object({"units", "tasks", "states", "arcs", "changeovers",
                     "horizon_h", "n_max", "windows"});
  Instance inst;

  const json& units = array_field(top, "units");
  for (size_t k = 0; k < units.size(); ++k) {
    Reader r(units[k], fmt::format("$.units[{}]", k));
    r.expect_object({"id", "is_main"});
    inst.units.push_back({r.string("id"), r.flag_or("is_main", false)});
  }

  const json& tasks = array_field(top, "tasks");
  for (size_t k = 0; k < tasks.size(); ++k) {
    Reader r(tasks[k], fmt::format("$.tasks[{}]", k));
    r.expect_object({"id", "unit", "kind", "rate", "b_min", "b_max"});
    Task t;
    t.id = r.string("id");
    t.unit = r.string("unit");
    std::string kind = r.string("kind");
    auto parsed = parse_task_kind(kind);
    if (!parsed) throw ParseError(r.child("kind"), "unknown task kind '" + kind + "'");
    t.kind = *parsed;
    if (is_processing(t.kind)) {
      t.rate = r.number("rate");
      t.b_min = r.number("b_min");
      t.b_max = r.number("b_max");
    } else {
      for (std::string_view key : {"rate", "b_min", "b_max"}) {
        if (r.has(key)) {
          throw ParseError(r.child(key),
                           "changeover tasks carry no rate or batch bounds");
        }
      }
    }
    inst.tasks.push_back(std::move(t));
  }

  const json& states = array_field(top, "states");
  for (size_t k = 0; k < states.size(); ++k) {
    Reader r(states[k], fmt::format("$.states[{}]", k));
    r.expect_object({"id", "is_final", "demand", "initial_stock"});
    inst.states.push_back({r.string("id"), r.flag_or("is_final", false),
                           r.number_or("demand", 0.0),
                           r.number_or("initial_stock", 0.0)});
  }

  const json& arcs = array_field(top, "arcs");
  for (size_t k = 0; k < arcs.size(); ++k) {
    Reader r(arcs[k], fmt::format("$.arcs[{}]", k));
    r.expect_object({"task", "state", "direction", "coefficient"});
    StnArc arc;
    arc.task = r.string("task");
    arc.state = r.string("state");
    std::string dir = r.string("direction");
    if (dir == "produces") {
      arc.direction = ArcDirection::kProduces;
    } else if (dir == "consumes") {
      arc.direction = ArcDirection::kConsumes;
    } else {
      throw ParseError(r.child("direction"),
                       "expected 'produces' or 'consumes'");
    }
    arc.coefficient = r.number("coefficient");
    inst.arcs.push_back(std::move(arc));
  }

  const json& changeovers = array_field(top, "changeovers");
  for (size_t k = 0; k < changeovers.size(); ++k) {
    Reader r(changeovers[k], fmt::format("$.changeovers[{}]", k));
    r.expect_object({"from", "to", "ctime"});
    inst.changeovers.push_back({r.string("from"), r.string("to"), r.number("ctime")});
  }

  inst.horizon_h = top.number("horizon_h");
  const json& n_max = top.required("n_max");
  if (!n_max.is_number_integer()) {
    throw ParseError("$.n_max", "expected an integer");
  }
  inst.n_max = n_max.get<int>();

  const json& windows = top.required("windows");
  Reader w(windows, "$.windows");
  w.expect_object({"c", "c1"});
  inst.windows.c = parse_windows(w.required("c"), "$.windows.c");
  inst.windows.c1 = parse_windows(w.required("c1"), "$.windows.c1");
  return inst;
}

Instance load_instance(std::string_view text) {
  Instance inst = parse_instance(text);
  auto violations = validate(inst);
  if (!violations.empty()) {
    std::vector<std::string> messages;
    for (const auto& v : violations) {
      messages.push_back(fmt::format("{}: {}: {}", v.entity, v.rule, v.message));
    }
    throw ValidationError(std::move(messages));
  }
  return inst;
}

Instance load_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return load_instance(buffer.str());
}

std::string emit_instance(const Instance& inst) {
  ordered_json doc;
  doc["units"] = ordered_json::array();
  for (const Unit& u : inst.units) {
    doc["units"].push_back({{"id", u.id}, {"is_main", u.is_main}});
  }
  doc["tasks"] = ordered_json::array();
  for (const Task& t : inst.tasks) {
    ordered_json j = {{"id", t.id}, {"unit", t.unit}, {"kind", to_string(t.kind)}};
    if (is_processing(t.kind)) {
      j["rate"] = t.rate;
      j["b_min"] = t.b_min;
      j["b_max"] = t.b_max;
    }
    doc["tasks"].push_back(std::move(j));
  }
  doc["states"] = ordered_json::array();
  for (const State& s : inst.states) {
    doc["states"].push_back({{"id", s.id},
                             {"is_final", s.is_final},
                             {"demand", s.demand},
                             {"initial_stock", s.initial_stock}});
  }
  doc["arcs"] = ordered_json::array();
  for (const StnArc& a : inst.arcs) {
    doc["arcs"].push_back(
        {{"task", a.task},
         {"state", a.state},
         {"direction",
          a.direction == ArcDirection::kProduces ? "produces" : "consumes"},
         {"coefficient", a.coefficient}});
  }
  doc["changeovers"] = ordered_json::array();
  for (const Changeover& c : inst.changeovers) {
    doc["changeovers"].push_back({{"from", c.from}, {"to", c.to}, {"ctime", c.ctime}});
  }
  doc["horizon_h"] = inst.horizon_h;
  doc["n_max"] = inst.n_max;
  auto windows = [](const std::vector<Window>& list) {
    ordered_json arr = ordered_json::array();
    for (const Window& w : list) arr.push_back({w.start, w.end});
    return arr;
  };
  doc["windows"] = {{"c", windows(inst.windows.c)}, {"c1", windows(inst.windows.c1)}};
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------

PlantIndex::PlantIndex(const Instance& instance) : instance_(&instance) {
  const size_t nt = instance.tasks.size();
  const size_t nu = instance.units.size();
  const size_t ns = instance.states.size();
  unit_of_.resize(nt);
  tasks_on_.resize(nu);
  processing_on_.resize(nu);
  p1_on_.resize(nu);
  np1_on_.resize(nu);
  co_c_.resize(nu);
  co_c1_.resize(nu);
  for (size_t t = 0; t < nt; ++t) {
    const Task& task = instance.tasks[t];
    const int u = unit_index(task.unit);
    const int ti = static_cast<int>(t);
    unit_of_[t] = u;
    tasks_on_[u].push_back(ti);
    switch (task.kind) {
      case TaskKind::kP1:
        processing_on_[u].push_back(ti);
        p1_on_[u].push_back(ti);
        break;
      case TaskKind::kNP1:
        processing_on_[u].push_back(ti);
        np1_on_[u].push_back(ti);
        break;
      case TaskKind::kChangeoverC:
        co_c_[u] = ti;
        break;
      case TaskKind::kChangeoverC1:
        co_c1_[u] = ti;
        break;
    }
  }
  ctime_.assign(nt * nt, 0.0);
  for (const Changeover& c : instance.changeovers) {
    ctime_[task_index(c.from) * nt + task_index(c.to)] = c.ctime;
  }
  producers_.resize(ns);
  consumers_.resize(ns);
  for (const StnArc& a : instance.arcs) {
    ArcRef ref{task_index(a.task), a.coefficient};
    auto& list = a.direction == ArcDirection::kProduces ? producers_ : consumers_;
    list[state_index(a.state)].push_back(ref);
  }
}

namespace {
template <typename T>
int find_index(const std::vector<T>& items, std::string_view id,
               std::string_view what) {
  for (size_t k = 0; k < items.size(); ++k) {
    if (items[k].id == id) return static_cast<int>(k);
  }
  throw Error(fmt::format("unknown {} '{}'", what, id));
}
}  // namespace

int PlantIndex::task_index(std::string_view id) const {
  return find_index(instance_->tasks, id, "task");
}
int PlantIndex::unit_index(std::string_view id) const {
  return find_index(instance_->units, id, "unit");
}
int PlantIndex::state_index(std::string_view id) const {
  return find_index(instance_->states, id, "state");
}

}  // namespace chsched
