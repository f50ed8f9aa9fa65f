// Copyright 2026 The protoaudio Authors.
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

// Class-subset selection for multi-label corpora. The objective is
//
//   J(S) = #{clips c : |labels(c) ∩ S| = 1}
//
// i.e. the number of clips that become single-label once the label space is
// restricted to S.

#ifndef PROTOAUDIO_DATASETKIT_SUBSET_HPP_
#define PROTOAUDIO_DATASETKIT_SUBSET_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "protoaudio/datasetkit/manifest.hpp"

namespace protoaudio::datasetkit {

inline constexpr std::size_t kDefaultSwapBudget = 1'000'000;

struct SubsetResult {
  std::vector<std::string> classes;  // sorted
  std::size_t objective = 0;
  std::size_t greedy_objective = 0;
  std::size_t swaps_applied = 0;
  std::size_t swaps_evaluated = 0;
  bool budget_exhausted = false;
};

std::size_t SingleLabelObjective(const Manifest& m, const std::vector<std::string>& subset);

// Greedy construction (largest gain, ties to the smallest class-id) then
// first-improvement 1-for-1 swaps until none improves. The search is repeated
// from n more greedy starts, each seeded with one forced class, and the best
// local optimum is returned. `budget` caps swap evaluations over all starts.
SubsetResult SelectSingleLabelSubset(const Manifest& m, std::size_t m_classes,
                                     std::size_t budget = kDefaultSwapBudget);

// Clips with exactly one label in `subset`, relabeled to that label.
Manifest FilterToSubset(const Manifest& m, const std::vector<std::string>& subset);

}  // namespace protoaudio::datasetkit

#endif  // PROTOAUDIO_DATASETKIT_SUBSET_HPP_
