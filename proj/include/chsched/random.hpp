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

#ifndef CHSCHED_RANDOM_HPP_
#define CHSCHED_RANDOM_HPP_

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace chsched {

// std::mt19937 output is fully specified by the standard, the library
// distributions are not. These helpers keep generated instances identical
// across standard library implementations.
class Rng {
 public:
  explicit Rng(unsigned seed) : engine_(seed) {}

  // Uniform integer in [lo, hi].
  int uniform(int lo, int hi) {
    const std::uint32_t span = static_cast<std::uint32_t>(hi - lo) + 1u;
    const std::uint32_t limit = 0xFFFFFFFFu - (0xFFFFFFFFu % span);
    std::uint32_t draw;
    do {
      draw = static_cast<std::uint32_t>(engine_());
    } while (draw >= limit);
    return lo + static_cast<int>(draw % span);
  }

  bool coin() { return uniform(0, 1) == 1; }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (int k = static_cast<int>(items.size()) - 1; k > 0; --k) {
      std::swap(items[k], items[uniform(0, k)]);
    }
  }

 private:
  std::mt19937 engine_;
};

}  // namespace chsched

#endif  // CHSCHED_RANDOM_HPP_
