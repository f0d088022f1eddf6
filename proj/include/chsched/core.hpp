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

#ifndef CHSCHED_CORE_HPP_
#define CHSCHED_CORE_HPP_

#include <memory>
#include <optional>
#include <vector>

#include "chsched/instance.hpp"
#include "chsched/model.hpp"

namespace chsched {

// Handles of the event-point skeleton shared by both changeover
// formulations. Event points are 1-based in every accessor.
//
// Groups emitted by build_core():
//   core.alloc    at most one task per unit and event point
//   core.batch    b_min*wv <= B <= b_max*wv
//   core.dur      Tf - Ts = B / rate
//   core.timebox  Ts <= Tf (0 and H are variable bounds)
//   core.seq      unit-level non-overlap in event order, big-M = H
//   core.bal      stage inventory balance, ST >= 0 via bounds
//   core.sync     consumers start after producers of earlier stages finish
//   core.demand   U >= demand - terminal inventory
// Objective level 1 is total underproduction, level 2 total changeover time.
class CoreBuild {
 public:
  CoreBuild(const Instance& instance, int n_max);

  const Instance& instance() const { return *instance_; }
  const PlantIndex& index() const { return *index_; }
  int n_max() const { return n_max_; }

  VarId wv(int task, int n) const { return wv_[task][n - 1]; }
  VarId ts(int task, int n) const { return ts_[task][n - 1]; }
  VarId tf(int task, int n) const { return tf_[task][n - 1]; }
  // Only processing tasks have a batch variable.
  std::optional<VarId> batch(int task, int n) const { return batch_[task][n - 1]; }
  // Stage n in 1..n_max+1; stage n_max+1 is the terminal inventory.
  VarId stock(int state, int stage) const { return stock_[state][stage - 1]; }
  std::optional<VarId> underproduction(int state) const { return under_[state]; }

 private:
  friend CoreBuild build_core(const Instance&, LinearModel&);

  const Instance* instance_;
  std::unique_ptr<PlantIndex> index_;
  int n_max_;
  std::vector<std::vector<VarId>> wv_, ts_, tf_;
  std::vector<std::vector<std::optional<VarId>>> batch_;
  std::vector<std::vector<VarId>> stock_;
  std::vector<std::optional<VarId>> under_;
};

// Adds the skeleton to `model`. The instance must outlive the returned build.
CoreBuild build_core(const Instance& instance, LinearModel& model);

}  // namespace chsched

#endif  // CHSCHED_CORE_HPP_
