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

#include "chsched/model.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace chsched {

LinExpr& LinExpr::operator+=(const LinExpr& other) {
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  constant_ += other.constant_;
  return *this;
}

VarId LinearModel::add_variable(std::string name, VarKind kind, double lo,
                                double hi) {
  if (name.empty()) throw ModelError("variable name must not be empty");
  if (var_index_.contains(name)) {
    throw ModelError("duplicate variable name '" + name + "'");
  }
  if (kind == VarKind::kBinary && (lo != 0.0 || hi != 1.0)) {
    throw ModelError("binary variable '" + name + "' must have bounds [0, 1]");
  }
  if (!(lo <= hi)) {
    throw ModelError("variable '" + name + "' has lo > hi");
  }
  const int id = static_cast<int>(variables_.size());
  var_index_.emplace(name, id);
  variables_.push_back({std::move(name), kind, lo, hi});
  return VarId{id};
}

std::vector<Term> LinearModel::normalize(const std::vector<Term>& terms) const {
  for (const Term& t : terms) {
    if (t.var.value < 0 || t.var.value >= num_variables()) {
      throw ModelError(fmt::format("unknown variable handle {}", t.var.value));
    }
  }
  std::vector<Term> sorted = terms;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const Term& a, const Term& b) { return a.var < b.var; });
  std::vector<Term> out;
  out.reserve(sorted.size());
  for (const Term& t : sorted) {
    if (!out.empty() && out.back().var == t.var) {
      out.back().coef += t.coef;
    } else {
      out.push_back(t);
    }
  }
  std::erase_if(out, [](const Term& t) { return t.coef == 0.0; });
  return out;
}

ConId LinearModel::add_constraint(std::string name, const LinExpr& lhs,
                                  Sense sense, double rhs, std::string group) {
  if (name.empty()) throw ModelError("constraint name must not be empty");
  if (group.empty()) throw ModelError("constraint '" + name + "' has no group");
  if (con_index_.contains(name)) {
    throw ModelError("duplicate constraint name '" + name + "'");
  }
  std::vector<Term> terms = normalize(lhs.terms());
  const int id = static_cast<int>(constraints_.size());
  con_index_.emplace(name, id);
  constraints_.push_back(
      {std::move(name), std::move(terms), sense, rhs - lhs.constant(), std::move(group)});
  return ConId{id};
}

int LinearModel::add_objective_level(const LinExpr& expr) {
  const int priority = static_cast<int>(objectives_.size()) + 1;
  objectives_.push_back({priority, normalize(expr.terms())});
  return priority;
}

void LinearModel::set_objective(int priority, const LinExpr& expr) {
  if (priority < 1 || priority > static_cast<int>(objectives_.size()) + 1) {
    throw ModelError("objective levels must stay contiguous from 1");
  }
  if (priority == static_cast<int>(objectives_.size()) + 1) {
    add_objective_level(expr);
  } else {
    objectives_[priority - 1].terms = normalize(expr.terms());
  }
}

std::optional<VarId> LinearModel::find_variable(std::string_view name) const {
  auto it = var_index_.find(std::string(name));
  if (it == var_index_.end()) return std::nullopt;
  return VarId{it->second};
}

VarId LinearModel::var(std::string_view name) const {
  auto id = find_variable(name);
  if (!id) throw ModelError("unknown variable '" + std::string(name) + "'");
  return *id;
}

std::optional<ConId> LinearModel::find_constraint(std::string_view name) const {
  auto it = con_index_.find(std::string(name));
  if (it == con_index_.end()) return std::nullopt;
  return ConId{it->second};
}

double activity(const Constraint& c, std::span<const double> x) {
  double sum = 0.0;
  for (const Term& t : c.terms) sum += t.coef * x[t.var.value];
  return sum;
}

double violation(const Constraint& c, std::span<const double> x) {
  const double a = activity(c, x);
  switch (c.sense) {
    case Sense::kLe:
      return std::max(0.0, a - c.rhs);
    case Sense::kGe:
      return std::max(0.0, c.rhs - a);
    case Sense::kEq:
      return std::abs(a - c.rhs);
  }
  return 0.0;
}

double objective_value(const ObjectiveLevel& level, std::span<const double> x) {
  double sum = 0.0;
  for (const Term& t : level.terms) sum += t.coef * x[t.var.value];
  return sum;
}

// ---------------------------------------------------------------------------

long CountReport::group(const std::string& tag) const {
  auto it = constraints_by_group.find(tag);
  return it == constraints_by_group.end() ? 0 : it->second;
}

long CountReport::variables(const std::string& prefix) const {
  auto it = variables_by_prefix.find(prefix);
  return it == variables_by_prefix.end() ? 0 : it->second;
}

long CountReport::groups_with_prefix(std::string_view prefix) const {
  long sum = 0;
  for (const auto& [tag, n] : constraints_by_group) {
    if (tag.starts_with(prefix)) sum += n;
  }
  return sum;
}

CountReport count(const LinearModel& model) {
  CountReport report;
  for (const Constraint& c : model.constraints()) {
    ++report.constraints_by_group[c.group];
  }
  for (const Variable& v : model.variables()) {
    ++report.variables_by_prefix[v.name.substr(0, v.name.find('['))];
    if (v.kind == VarKind::kBinary) ++report.total_binaries;
  }
  report.total_constraints = model.num_constraints();
  report.total_variables = model.num_variables();
  return report;
}

// ---------------------------------------------------------------------------

std::string format_number(double value) {
  if (value == 0.0) return "0";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return fmt::format("{:.12g}", value);
}

namespace {

std::string_view sense_text(Sense s) {
  switch (s) {
    case Sense::kLe:
      return "<=";
    case Sense::kGe:
      return ">=";
    case Sense::kEq:
      return "=";
  }
  return "?";
}

std::string sorted_terms(const LinearModel& model, const std::vector<Term>& terms) {
  std::vector<std::pair<std::string, double>> named;
  for (const Term& t : terms) named.emplace_back(model.variable(t.var).name, t.coef);
  std::sort(named.begin(), named.end());
  std::string out;
  for (const auto& [name, coef] : named) {
    out += fmt::format(" {}*{}", format_number(coef), name);
  }
  return out;
}

}  // namespace

std::string canonical_form(const LinearModel& model) {
  std::vector<std::string> vars;
  for (const Variable& v : model.variables()) {
    vars.push_back(fmt::format("var {} {} {} {}", v.name,
                               v.kind == VarKind::kBinary ? "bin" : "cont",
                               format_number(v.lo), format_number(v.hi)));
  }
  std::sort(vars.begin(), vars.end());

  std::vector<std::string> rows;
  for (const Constraint& c : model.constraints()) {
    rows.push_back(fmt::format("row {} [{}]{} {} {}", c.name, c.group,
                               sorted_terms(model, c.terms), sense_text(c.sense),
                               format_number(c.rhs)));
  }
  std::sort(rows.begin(), rows.end());

  std::string out;
  for (const auto& line : vars) out += line + "\n";
  for (const auto& line : rows) out += line + "\n";
  for (const ObjectiveLevel& level : model.objectives()) {
    out += fmt::format("obj {}{}\n", level.priority, sorted_terms(model, level.terms));
  }
  for (const auto& [group, note] : model.group_notes()) {
    out += fmt::format("note [{}] {}\n", group, note);
  }
  return out;
}

}  // namespace chsched
