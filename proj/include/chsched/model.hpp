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

#ifndef CHSCHED_MODEL_HPP_
#define CHSCHED_MODEL_HPP_

#include <compare>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "chsched/errors.hpp"

namespace chsched {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct VarId {
  int value = -1;
  auto operator<=>(const VarId&) const = default;
};

struct ConId {
  int value = -1;
  auto operator<=>(const ConId&) const = default;
};

enum class VarKind { kBinary, kContinuous };
enum class Sense { kLe, kEq, kGe };

struct Term {
  double coef = 0.0;
  VarId var;
};

struct Variable {
  std::string name;
  VarKind kind = VarKind::kContinuous;
  double lo = 0.0;
  double hi = kInf;
};

// Terms are merged per variable and never contain a zero coefficient.
struct Constraint {
  std::string name;
  std::vector<Term> terms;
  Sense sense = Sense::kLe;
  double rhs = 0.0;
  std::string group;
};

// Minimized. Levels are numbered from 1 (highest priority).
struct ObjectiveLevel {
  int priority = 1;
  std::vector<Term> terms;
};

// Linear expression with a constant; the builder moves the constant to the
// right-hand side.
class LinExpr {
 public:
  LinExpr() = default;
  LinExpr(double constant) : constant_(constant) {}  // NOLINT

  LinExpr& add(double coef, VarId var) {
    terms_.push_back({coef, var});
    return *this;
  }
  LinExpr& add_constant(double value) {
    constant_ += value;
    return *this;
  }
  LinExpr& operator+=(const LinExpr& other);

  const std::vector<Term>& terms() const { return terms_; }
  double constant() const { return constant_; }

 private:
  std::vector<Term> terms_;
  double constant_ = 0.0;
};

class LinearModel {
 public:
  VarId add_variable(std::string name, VarKind kind, double lo, double hi);
  VarId add_binary(std::string name) {
    return add_variable(std::move(name), VarKind::kBinary, 0.0, 1.0);
  }
  VarId add_continuous(std::string name, double lo, double hi) {
    return add_variable(std::move(name), VarKind::kContinuous, lo, hi);
  }

  // lhs <sense> rhs; the constant of `lhs` is folded into the right-hand side.
  ConId add_constraint(std::string name, const LinExpr& lhs, Sense sense,
                       double rhs, std::string group);

  // Appends a new objective level and returns its priority.
  int add_objective_level(const LinExpr& expr);
  void set_objective(int priority, const LinExpr& expr);

  void set_group_note(const std::string& group, std::string note) {
    group_notes_[group] = std::move(note);
  }

  std::optional<VarId> find_variable(std::string_view name) const;
  VarId var(std::string_view name) const;
  std::optional<ConId> find_constraint(std::string_view name) const;

  const std::vector<Variable>& variables() const { return variables_; }
  const Variable& variable(VarId id) const { return variables_[id.value]; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  const Constraint& constraint(ConId id) const { return constraints_[id.value]; }
  const std::vector<ObjectiveLevel>& objectives() const { return objectives_; }
  const std::map<std::string, std::string>& group_notes() const {
    return group_notes_;
  }

  int num_variables() const { return static_cast<int>(variables_.size()); }
  int num_constraints() const { return static_cast<int>(constraints_.size()); }

 private:
  std::vector<Term> normalize(const std::vector<Term>& terms) const;

  std::vector<Variable> variables_;
  std::vector<Constraint> constraints_;
  std::vector<ObjectiveLevel> objectives_;
  std::map<std::string, std::string> group_notes_;
  std::unordered_map<std::string, int> var_index_;
  std::unordered_map<std::string, int> con_index_;
};

// Row activity of `c` at the given point.
double activity(const Constraint& c, std::span<const double> x);
// Amount by which `c` is violated at `x` (0 when satisfied).
double violation(const Constraint& c, std::span<const double> x);
double objective_value(const ObjectiveLevel& level, std::span<const double> x);

struct CountReport {
  std::map<std::string, long> constraints_by_group;
  // Keyed by the variable name up to the first '['.
  std::map<std::string, long> variables_by_prefix;
  long total_constraints = 0;
  long total_variables = 0;
  long total_binaries = 0;

  long group(const std::string& tag) const;
  long variables(const std::string& prefix) const;
  // Sum over all groups whose tag starts with `prefix`, e.g. "legacy.".
  long groups_with_prefix(std::string_view prefix) const;
};

CountReport count(const LinearModel& model);

// Order-independent text form: sorted variables, rows and terms, numbers
// printed with 12 significant digits. Two models are canonically equal iff
// their canonical forms are equal.
std::string canonical_form(const LinearModel& model);

// Shortest %.12g rendering, with -0 printed as 0.
std::string format_number(double value);

// Fixed-column MPS. Only objective level 1 becomes the OBJ row; lower levels,
// group tags and group notes travel as "*@" comment records that parse_mps
// reads back.
std::string export_mps(const LinearModel& model, std::string_view name = "CHSCHED");
std::string export_lp(const LinearModel& model);
LinearModel parse_mps(std::string_view text);

// Longest name accepted by the MPS/LP writers.
inline constexpr size_t kMaxNameLength = 64;

}  // namespace chsched

#endif  // CHSCHED_MODEL_HPP_
