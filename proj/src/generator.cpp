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

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "chsched/instance.hpp"
#include "chsched/random.hpp"

namespace chsched {

// Family layout: every unit is a main unit with `tasks_per_unit` processing
// tasks, the first round(p1_fraction * k) of class P1. Each task turns one of
// the shared raw materials into its own final product. Only Ctime values and
// which raw material a task consumes depend on the seed.
Instance generate_family(const FamilySpec& spec) {
  if (spec.n_units < 1 || spec.tasks_per_unit < 1 || spec.n_max < 1) {
    throw Error("family parameters must be positive");
  }
  if (!(spec.p1_fraction >= 0.0 && spec.p1_fraction <= 1.0)) {
    throw Error("p1_fraction must lie in [0, 1]");
  }
  if (!(spec.changeover_density >= 0.0 && spec.changeover_density <= 1.0)) {
    throw Error("changeover_density must lie in [0, 1]");
  }

  Rng rng(spec.seed);
  Instance inst;
  inst.horizon_h = 12.0;
  inst.n_max = spec.n_max;
  inst.windows.c = {{0.0, 4.0}, {7.0, 12.0}};
  inst.windows.c1 = {{7.5, 12.0}};

  for (int r = 1; r <= spec.n_units; ++r) {
    inst.states.push_back({fmt::format("R{}", r), false, 0.0, 1000.0});
  }

  const int k = spec.tasks_per_unit;
  const int p1 = static_cast<int>(std::lround(spec.p1_fraction * k));
  for (int u = 1; u <= spec.n_units; ++u) {
    std::string unit = fmt::format("U{}", u);
    inst.units.push_back({unit, true});

    std::vector<std::string> ids;
    for (int t = 1; t <= k; ++t) {
      std::string id = fmt::format("U{}T{}", u, t);
      TaskKind kind = t <= p1 ? TaskKind::kP1 : TaskKind::kNP1;
      inst.tasks.push_back({id, unit, kind, 10.0, 10.0, 40.0});
      ids.push_back(id);

      // The first task of each class per unit carries a demand.
      const bool demanded = t == 1 || t == p1 + 1;
      std::string product = "P_" + id;
      inst.states.push_back({product, true, demanded ? 20.0 : 0.0, 0.0});
      inst.arcs.push_back({id, fmt::format("R{}", rng.uniform(1, spec.n_units)),
                           ArcDirection::kConsumes, 1.0});
      inst.arcs.push_back({id, product, ArcDirection::kProduces, 1.0});
    }

    const int np1 = k - p1;
    const bool has_c_pairs = p1 >= 2 || (np1 >= 1 && k >= 2);
    const bool has_c1_pairs = p1 >= 1 && np1 >= 1;
    if (has_c_pairs) {
      inst.tasks.push_back({fmt::format("U{}CO", u), unit, TaskKind::kChangeoverC});
    }
    if (has_c1_pairs) {
      inst.tasks.push_back({fmt::format("U{}CO1", u), unit, TaskKind::kChangeoverC1});
    }

    std::vector<std::pair<int, int>> pairs;
    for (int a = 0; a < k; ++a) {
      for (int b = 0; b < k; ++b) {
        if (a != b) pairs.emplace_back(a, b);
      }
    }
    const auto wanted = static_cast<size_t>(
        std::lround(spec.changeover_density * static_cast<double>(pairs.size())));
    rng.shuffle(pairs);
    pairs.resize(wanted);
    std::sort(pairs.begin(), pairs.end());
    for (auto [a, b] : pairs) {
      // Ctime in {0.5, 0.75, ..., 3.0}; exact binary fractions.
      double ctime = 0.25 * rng.uniform(2, 12);
      inst.changeovers.push_back({ids[a], ids[b], ctime});
    }
  }
  return inst;
}

}  // namespace chsched
