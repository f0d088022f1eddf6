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

#ifndef CHSCHED_COMPILE_HPP_
#define CHSCHED_COMPILE_HPP_

#include <memory>
#include <optional>
#include <string_view>

#include "chsched/compact.hpp"
#include "chsched/core.hpp"
#include "chsched/legacy.hpp"

namespace chsched {

enum class Formulation { kLegacy, kCompact };

// kAssign pins event points to windows (legacy only); kExplicit places each
// changeover in a chosen window with z variables (compact only).
enum class WindowMode { kNone, kAssign, kExplicit };

std::string_view to_string(Formulation f);
std::string_view to_string(WindowMode w);
std::optional<Formulation> parse_formulation(std::string_view text);
std::optional<WindowMode> parse_window_mode(std::string_view text);

// Full Level-2 model: core skeleton plus one changeover formulation. Holds a
// copy of the instance so handles stay valid when the struct is moved.
struct CompiledModel {
  CompiledModel(const Instance& inst, Formulation f, WindowMode w);
  CompiledModel(CompiledModel&&) = delete;

  const Instance instance;
  const Formulation formulation;
  const WindowMode windows;
  LinearModel model;
  CoreBuild core;
  std::optional<LegacyVars> legacy;
  std::optional<CompactVars> compact;
};

// Throws Error for window modes that do not pair with the formulation.
std::unique_ptr<CompiledModel> compile(const Instance& instance, Formulation f,
                                       WindowMode w = WindowMode::kNone);

}  // namespace chsched

#endif  // CHSCHED_COMPILE_HPP_
