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

// MPS and LP writers plus an MPS reader for models produced by the writer or
// any equivalent fixed-format file.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "chsched/model.hpp"

namespace chsched {

namespace {

constexpr std::string_view kObjRow = "OBJ";

bool valid_name(std::string_view name) {
  if (name.empty() || name.size() > kMaxNameLength) return false;
  return std::none_of(name.begin(), name.end(), [](char ch) {
    return ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r';
  });
}

void check_names(const LinearModel& model) {
  std::vector<std::string> bad;
  for (const Variable& v : model.variables()) {
    if (!valid_name(v.name)) bad.push_back(v.name);
  }
  for (const Constraint& c : model.constraints()) {
    if (!valid_name(c.name) || c.name == kObjRow) bad.push_back(c.name);
    if (!valid_name(c.group)) bad.push_back("group " + c.group);
  }
  if (!bad.empty()) {
    std::string list;
    for (const auto& b : bad) list += (list.empty() ? "" : ", ") + ("'" + b + "'");
    throw ModelError(fmt::format(
        "names not representable (empty, whitespace, reserved or longer than {} "
        "characters): {}",
        kMaxNameLength, list));
  }
}

// Pads to the classic 8-character field; longer names keep their length.
std::string field(std::string_view text, size_t width = 8) {
  std::string out(text);
  if (out.size() < width) out.append(width - out.size(), ' ');
  return out;
}

char row_type(Sense s) {
  switch (s) {
    case Sense::kLe:
      return 'L';
    case Sense::kGe:
      return 'G';
    case Sense::kEq:
      return 'E';
  }
  return '?';
}

}  // namespace

std::string export_mps(const LinearModel& model, std::string_view name) {
  check_names(model);
  const auto& vars = model.variables();
  const auto& rows = model.constraints();

  std::vector<std::vector<std::pair<int, double>>> columns(vars.size());
  for (size_t r = 0; r < rows.size(); ++r) {
    for (const Term& t : rows[r].terms) {
      columns[t.var.value].emplace_back(static_cast<int>(r), t.coef);
    }
  }
  std::vector<double> obj(vars.size(), 0.0);
  if (!model.objectives().empty()) {
    for (const Term& t : model.objectives()[0].terms) obj[t.var.value] = t.coef;
  }

  std::string out;
  out += "* chsched model export\n";
  out += fmt::format("*@ LEVELS {}\n", model.objectives().size());
  for (size_t k = 1; k < model.objectives().size(); ++k) {
    const ObjectiveLevel& level = model.objectives()[k];
    for (const Term& t : level.terms) {
      out += fmt::format("*@ OBJTERM {} {} {}\n", level.priority,
                         vars[t.var.value].name, format_number(t.coef));
    }
  }
  for (const Constraint& c : rows) {
    out += fmt::format("*@ GROUP {} {}\n", c.name, c.group);
  }
  for (const auto& [group, note] : model.group_notes()) {
    out += fmt::format("*@ NOTE {} {}\n", group, note);
  }

  out += fmt::format("NAME          {}\n", name);
  out += "ROWS\n";
  out += fmt::format(" N  {}\n", kObjRow);
  for (const Constraint& c : rows) {
    out += fmt::format(" {}  {}\n", row_type(c.sense), c.name);
  }

  out += "COLUMNS\n";
  bool in_marker = false;
  int marker = 0;
  for (size_t j = 0; j < vars.size(); ++j) {
    const bool integral = vars[j].kind == VarKind::kBinary;
    if (integral != in_marker) {
      out += fmt::format("    {}  'MARKER'                 '{}'\n",
                         field(fmt::format("MARKER{:02}", marker++)),
                         integral ? "INTORG" : "INTEND");
      in_marker = integral;
    }
    const std::string col = field(vars[j].name);
    bool wrote = false;
    if (obj[j] != 0.0) {
      out += fmt::format("    {}  {}  {}\n", col, field(kObjRow), format_number(obj[j]));
      wrote = true;
    }
    for (const auto& [r, coef] : columns[j]) {
      out += fmt::format("    {}  {}  {}\n", col, field(rows[r].name),
                         format_number(coef));
      wrote = true;
    }
    if (!wrote) {
      out += fmt::format("    {}  {}  0\n", col, field(kObjRow));
    }
  }
  if (in_marker) {
    out += fmt::format("    {}  'MARKER'                 'INTEND'\n",
                       field(fmt::format("MARKER{:02}", marker++)));
  }

  out += "RHS\n";
  for (const Constraint& c : rows) {
    if (c.rhs != 0.0) {
      out += fmt::format("    {}  {}  {}\n", field("RHS"), field(c.name),
                         format_number(c.rhs));
    }
  }

  out += "BOUNDS\n";
  for (const Variable& v : vars) {
    const std::string col = field(v.name);
    if (v.kind == VarKind::kBinary) {
      out += fmt::format(" BV {}  {}\n", field("BND"), col);
      continue;
    }
    if (v.lo == v.hi) {
      out += fmt::format(" FX {}  {}  {}\n", field("BND"), col, format_number(v.lo));
      continue;
    }
    if (std::isinf(v.lo) && std::isinf(v.hi)) {
      out += fmt::format(" FR {}  {}\n", field("BND"), col);
      continue;
    }
    if (std::isinf(v.lo)) {
      out += fmt::format(" MI {}  {}\n", field("BND"), col);
    } else if (v.lo != 0.0) {
      out += fmt::format(" LO {}  {}  {}\n", field("BND"), col, format_number(v.lo));
    }
    if (!std::isinf(v.hi)) {
      out += fmt::format(" UP {}  {}  {}\n", field("BND"), col, format_number(v.hi));
    }
  }
  out += "ENDATA\n";
  return out;
}

// ---------------------------------------------------------------------------

namespace {

void append_terms(std::string& out, const LinearModel& model,
                  const std::vector<Term>& terms, std::string_view prefix) {
  std::string line(prefix);
  int on_line = 0;
  for (const Term& t : terms) {
    if (on_line == 8) {
      out += line + "\n";
      line = "   ";
      on_line = 0;
    }
    line += fmt::format(" {} {} {}", t.coef < 0 ? "-" : "+",
                        format_number(std::abs(t.coef)),
                        model.variable(t.var).name);
    ++on_line;
  }
  if (terms.empty() && model.num_variables() > 0) {
    line += " 0 " + model.variables()[0].name;
  }
  out += line;
}

}  // namespace

std::string export_lp(const LinearModel& model) {
  check_names(model);
  std::string out = "\\ chsched model export\n";
  for (size_t k = 1; k < model.objectives().size(); ++k) {
    const ObjectiveLevel& level = model.objectives()[k];
    std::string text;
    append_terms(text, model, level.terms, "");
    std::replace(text.begin(), text.end(), '\n', ' ');
    out += fmt::format("\\ objective level {} (minimize):{}\n", level.priority, text);
  }
  for (const auto& [group, note] : model.group_notes()) {
    out += fmt::format("\\ group {}: {}\n", group, note);
  }

  out += "Minimize\n";
  static const std::vector<Term> kNoTerms;
  append_terms(out, model,
               model.objectives().empty() ? kNoTerms : model.objectives()[0].terms,
               " obj:");
  out += "\n";

  out += "Subject To\n";
  for (const Constraint& c : model.constraints()) {
    append_terms(out, model, c.terms, fmt::format(" {}:", c.name));
    const char* op = c.sense == Sense::kLe ? "<=" : c.sense == Sense::kGe ? ">=" : "=";
    out += fmt::format(" {} {}\n", op, format_number(c.rhs));
  }

  out += "Bounds\n";
  for (const Variable& v : model.variables()) {
    if (v.kind == VarKind::kBinary) continue;
    if (std::isinf(v.lo) && std::isinf(v.hi)) {
      out += fmt::format(" {} free\n", v.name);
    } else if (v.lo == v.hi) {
      out += fmt::format(" {} = {}\n", v.name, format_number(v.lo));
    } else if (std::isinf(v.hi)) {
      if (v.lo != 0.0) out += fmt::format(" {} >= {}\n", v.name, format_number(v.lo));
    } else {
      out += fmt::format(" {} <= {} <= {}\n",
                         std::isinf(v.lo) ? "-inf" : format_number(v.lo), v.name,
                         format_number(v.hi));
    }
  }

  bool any_binary = false;
  for (const Variable& v : model.variables()) {
    if (v.kind != VarKind::kBinary) continue;
    if (!any_binary) out += "Binary\n";
    any_binary = true;
    out += " " + v.name + "\n";
  }
  out += "End\n";
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::string_view> tokenize(std::string_view line) {
  std::vector<std::string_view> out;
  size_t k = 0;
  while (k < line.size()) {
    while (k < line.size() && (line[k] == ' ' || line[k] == '\t')) ++k;
    size_t start = k;
    while (k < line.size() && line[k] != ' ' && line[k] != '\t') ++k;
    if (k > start) out.push_back(line.substr(start, k - start));
  }
  return out;
}

class MpsReader {
 public:
  LinearModel read(std::string_view text) {
    size_t pos = 0;
    while (pos <= text.size()) {
      size_t end = text.find('\n', pos);
      if (end == std::string_view::npos) end = text.size();
      std::string_view line = text.substr(pos, end - pos);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      ++line_no_;
      handle(line);
      if (finished_) break;
      pos = end + 1;
    }
    if (!finished_) throw ParseError(where(), "missing ENDATA");
    return build();
  }

 private:
  enum class Section { kNone, kName, kRows, kColumns, kRhs, kBounds, kRanges };

  struct Row {
    std::string name;
    Sense sense;
    double rhs = 0.0;
    std::vector<std::pair<int, double>> terms;  // (column, coef)
  };
  struct Column {
    std::string name;
    bool integral = false;
    bool bv = false;
    double lo = 0.0;
    double hi = kInf;
  };

  std::string where() const { return fmt::format("line {}", line_no_); }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(where(), what);
  }

  double number(std::string_view token) const {
    double value = 0.0;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    if (!token.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
      fail("malformed number '" + std::string(token) + "'");
    }
    return value;
  }

  void handle(std::string_view line) {
    if (line.starts_with("*@")) {
      metadata(tokenize(line.substr(2)), line);
      return;
    }
    if (line.empty() || line[0] == '*') return;
    auto tokens = tokenize(line);
    if (tokens.empty()) return;

    if (line[0] != ' ' && line[0] != '\t') {
      const std::string_view head = tokens[0];
      if (head == "NAME") {
        section_ = Section::kName;
      } else if (head == "ROWS") {
        section_ = Section::kRows;
      } else if (head == "COLUMNS") {
        section_ = Section::kColumns;
      } else if (head == "RHS") {
        section_ = Section::kRhs;
      } else if (head == "BOUNDS") {
        section_ = Section::kBounds;
      } else if (head == "RANGES") {
        fail("RANGES section is not supported");
      } else if (head == "ENDATA") {
        finished_ = true;
      } else {
        fail("unknown section '" + std::string(head) + "'");
      }
      return;
    }

    switch (section_) {
      case Section::kRows:
        row(tokens);
        break;
      case Section::kColumns:
        column(tokens);
        break;
      case Section::kRhs:
        rhs(tokens);
        break;
      case Section::kBounds:
        bound(tokens);
        break;
      default:
        fail("data line outside of a section");
    }
  }

  void metadata(const std::vector<std::string_view>& t, std::string_view line) {
    if (t.empty()) return;
    if (t[0] == "LEVELS" && t.size() == 2) {
      levels_ = static_cast<int>(number(t[1]));
    } else if (t[0] == "OBJTERM" && t.size() == 4) {
      lower_terms_.push_back({static_cast<int>(number(t[1])), std::string(t[2]),
                              number(t[3])});
    } else if (t[0] == "GROUP" && t.size() == 3) {
      groups_[std::string(t[1])] = std::string(t[2]);
    } else if (t[0] == "NOTE" && t.size() >= 3) {
      // The note text is everything after the group token.
      size_t at = line.find(t[1]) + t[1].size();
      while (at < line.size() && line[at] == ' ') ++at;
      notes_[std::string(t[1])] = std::string(line.substr(at));
    } else {
      fail("malformed metadata record");
    }
  }

  void row(const std::vector<std::string_view>& t) {
    if (t.size() != 2) fail("ROWS entry needs a type and a name");
    const std::string name(t[1]);
    if (t[0] == "N") {
      if (!objective_row_.empty()) fail("only one objective row is supported");
      objective_row_ = name;
      return;
    }
    Sense sense;
    if (t[0] == "L") {
      sense = Sense::kLe;
    } else if (t[0] == "G") {
      sense = Sense::kGe;
    } else if (t[0] == "E") {
      sense = Sense::kEq;
    } else {
      fail("unknown row type '" + std::string(t[0]) + "'");
    }
    if (row_index_.contains(name) || name == objective_row_) {
      fail("duplicate row '" + name + "'");
    }
    row_index_.emplace(name, static_cast<int>(rows_.size()));
    rows_.push_back({name, sense, 0.0, {}});
  }

  int column_index(std::string_view name) {
    auto it = column_index_.find(std::string(name));
    if (it != column_index_.end()) return it->second;
    const int id = static_cast<int>(columns_.size());
    column_index_.emplace(std::string(name), id);
    columns_.push_back({std::string(name), integral_, false, 0.0, kInf});
    return id;
  }

  void column(const std::vector<std::string_view>& t) {
    if (t.size() == 3 && t[1] == "'MARKER'") {
      if (t[2] == "'INTORG'") {
        integral_ = true;
      } else if (t[2] == "'INTEND'") {
        integral_ = false;
      } else {
        fail("unknown marker");
      }
      return;
    }
    if (t.size() != 3 && t.size() != 5) fail("COLUMNS entry needs 3 or 5 fields");
    const int col = column_index(t[0]);
    for (size_t k = 1; k + 1 < t.size(); k += 2) {
      const std::string row_name(t[k]);
      const double value = number(t[k + 1]);
      if (row_name == objective_row_) {
        if (value != 0.0) objective_.emplace_back(col, value);
        continue;
      }
      auto it = row_index_.find(row_name);
      if (it == row_index_.end()) fail("column entry for unknown row '" + row_name + "'");
      if (value != 0.0) rows_[it->second].terms.emplace_back(col, value);
    }
  }

  void rhs(const std::vector<std::string_view>& t) {
    if (t.size() != 3 && t.size() != 5) fail("RHS entry needs 3 or 5 fields");
    for (size_t k = 1; k + 1 < t.size(); k += 2) {
      const std::string row_name(t[k]);
      if (row_name == objective_row_) fail("objective constants are not supported");
      auto it = row_index_.find(row_name);
      if (it == row_index_.end()) fail("RHS for unknown row '" + row_name + "'");
      rows_[it->second].rhs = number(t[k + 1]);
    }
  }

  void bound(const std::vector<std::string_view>& t) {
    if (t.size() < 3) fail("BOUNDS entry too short");
    const std::string_view type = t[0];
    auto it = column_index_.find(std::string(t[2]));
    if (it == column_index_.end()) fail("bound for unknown column '" + std::string(t[2]) + "'");
    Column& c = columns_[it->second];
    const bool needs_value = type == "UP" || type == "LO" || type == "FX";
    if (needs_value && t.size() != 4) fail("bound type needs a value");
    if (type == "UP") {
      c.hi = number(t[3]);
    } else if (type == "LO") {
      c.lo = number(t[3]);
    } else if (type == "FX") {
      c.lo = c.hi = number(t[3]);
    } else if (type == "FR") {
      c.lo = -kInf;
      c.hi = kInf;
    } else if (type == "MI") {
      c.lo = -kInf;
    } else if (type == "PL") {
      c.hi = kInf;
    } else if (type == "BV") {
      c.bv = true;
      c.integral = true;
      c.lo = 0.0;
      c.hi = 1.0;
    } else {
      fail("unsupported bound type '" + std::string(type) + "'");
    }
  }

  LinearModel build() const {
    LinearModel model;
    std::vector<VarId> ids;
    for (const Column& c : columns_) {
      if (c.integral) {
        const bool unit_box = c.bv || (c.lo == 0.0 && c.hi == 1.0);
        if (!unit_box) {
          throw ParseError("column " + c.name, "general integers are not supported");
        }
        ids.push_back(model.add_binary(c.name));
      } else {
        ids.push_back(model.add_continuous(c.name, c.lo, c.hi));
      }
    }
    for (const Row& r : rows_) {
      LinExpr expr;
      for (auto [col, coef] : r.terms) expr.add(coef, ids[col]);
      auto g = groups_.find(r.name);
      model.add_constraint(r.name, expr, r.sense, r.rhs,
                           g == groups_.end() ? "imported" : g->second);
    }
    if (levels_ >= 1 || !objective_.empty()) {
      LinExpr top;
      for (auto [col, coef] : objective_) top.add(coef, ids[col]);
      model.add_objective_level(top);
    }
    for (int level = 2; level <= levels_; ++level) {
      LinExpr expr;
      for (const auto& lt : lower_terms_) {
        if (lt.level == level) expr.add(lt.coef, model.var(lt.var));
      }
      model.add_objective_level(expr);
    }
    for (const auto& [group, note] : notes_) model.set_group_note(group, note);
    return model;
  }

  struct LowerTerm {
    int level;
    std::string var;
    double coef;
  };

  Section section_ = Section::kNone;
  int line_no_ = 0;
  bool finished_ = false;
  bool integral_ = false;
  int levels_ = 1;
  std::string objective_row_;
  std::vector<Row> rows_;
  std::map<std::string, int> row_index_;
  std::vector<Column> columns_;
  std::map<std::string, int> column_index_;
  std::vector<std::pair<int, double>> objective_;
  std::vector<LowerTerm> lower_terms_;
  std::map<std::string, std::string> groups_;
  std::map<std::string, std::string> notes_;
};

}  // namespace

LinearModel parse_mps(std::string_view text) { return MpsReader().read(text); }

}  // namespace chsched
