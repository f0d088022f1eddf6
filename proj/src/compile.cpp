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

#include "chsched/compile.hpp"

namespace chsched {

std::string_view to_string(Formulation f) {
  return f == Formulation::kLegacy ? "legacy" : "compact";
}

std::string_view to_string(WindowMode w) {
  switch (w) {
    case WindowMode::kNone:
      return "none";
    case WindowMode::kAssign:
      return "assign";
    case WindowMode::kExplicit:
      return "explicit";
  }
  return "?";
}

std::optional<Formulation> parse_formulation(std::string_view text) {
  if (text == "legacy") return Formulation::kLegacy;
  if (text == "compact") return Formulation::kCompact;
  return std::nullopt;
}

std::optional<WindowMode> parse_window_mode(std::string_view text) {
  if (text == "none") return WindowMode::kNone;
  if (text == "assign") return WindowMode::kAssign;
  if (text == "explicit") return WindowMode::kExplicit;
  return std::nullopt;
}

CompiledModel::CompiledModel(const Instance& inst, Formulation f, WindowMode w)
    : instance(inst), formulation(f), windows(w), core(build_core(instance, model)) {
  if (f == Formulation::kLegacy) {
    legacy = build_legacy(core, model);
    if (w == WindowMode::kAssign) build_event_window_blockage(core, model);
  } else {
    compact = build_compact(core, model);
    if (w == WindowMode::kExplicit) build_windows(core, *compact, model);
  }
}

std::unique_ptr<CompiledModel> compile(const Instance& instance, Formulation f,
                                       WindowMode w) {
  if (w == WindowMode::kAssign && f != Formulation::kLegacy) {
    throw Error("--windows assign pairs with the legacy formulation only");
  }
  if (w == WindowMode::kExplicit && f != Formulation::kCompact) {
    throw Error("--windows explicit pairs with the compact formulation only");
  }
  return std::make_unique<CompiledModel>(instance, f, w);
}

}  // namespace chsched
