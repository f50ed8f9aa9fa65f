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

#include "protoaudio/datasetkit/subset.hpp"

#include <algorithm>
#include <set>

#include "protoaudio/error.hpp"

namespace protoaudio::datasetkit {
namespace {

// Clip/class incidence in index form. Class indices follow sorted class-id
// order, so "smallest index" is "smallest class-id".
struct Incidence {
  std::vector<std::string> ids;
  std::vector<std::vector<std::size_t>> clips_of;  // class -> clips
  std::vector<std::vector<std::size_t>> labels_of;  // clip -> classes
};

Incidence BuildIncidence(const Manifest& m) {
  Incidence inc;
  inc.ids = m.classes();
  inc.clips_of.resize(inc.ids.size());
  inc.labels_of.resize(m.size());
  for (std::size_t c = 0; c < m.size(); ++c) {
    for (const auto& label : m.entries[c].labels) {
      const std::size_t k = m.class_index.at(label);
      inc.clips_of[k].push_back(c);
      inc.labels_of[c].push_back(k);
    }
  }
  return inc;
}

// Tracks |labels(c) ∩ S| per clip so gains are local to the touched clips.
class SubsetState {
 public:
  explicit SubsetState(const Incidence& inc)
      : inc_(inc), in_(inc.ids.size(), false), count_(inc.labels_of.size(), 0) {}

  bool contains(std::size_t k) const { return in_[k]; }
  std::size_t objective() const { return objective_; }
  std::size_t size() const { return size_; }
  const std::vector<bool>& members() const { return in_; }

  long AddGain(std::size_t k) const {
    long g = 0;
    for (std::size_t c : inc_.clips_of[k]) g += count_[c] == 0 ? 1 : (count_[c] == 1 ? -1 : 0);
    return g;
  }

  long SwapGain(std::size_t out, std::size_t in) const {
    long g = 0;
    auto delta = [&](std::size_t c) {
      int next = count_[c];
      next -= in_[out] && HasLabel(c, out);
      next += HasLabel(c, in);
      return static_cast<long>(next == 1) - static_cast<long>(count_[c] == 1);
    };
    for (std::size_t c : inc_.clips_of[out]) g += delta(c);
    for (std::size_t c : inc_.clips_of[in]) {
      if (!HasLabel(c, out)) g += delta(c);
    }
    return g;
  }

  void Add(std::size_t k) {
    in_[k] = true;
    ++size_;
    for (std::size_t c : inc_.clips_of[k]) Bump(c, +1);
  }
  void Remove(std::size_t k) {
    in_[k] = false;
    --size_;
    for (std::size_t c : inc_.clips_of[k]) Bump(c, -1);
  }

 private:
  bool HasLabel(std::size_t clip, std::size_t k) const {
    const auto& l = inc_.labels_of[clip];
    return std::find(l.begin(), l.end(), k) != l.end();
  }
  void Bump(std::size_t c, int d) {
    objective_ -= count_[c] == 1;
    count_[c] += d;
    objective_ += count_[c] == 1;
  }

  const Incidence& inc_;
  std::vector<bool> in_;
  std::vector<int> count_;
  std::size_t objective_ = 0;
  std::size_t size_ = 0;
};

// Class with the largest gain, lowest index on ties.
std::size_t GreedyPick(const SubsetState& state, std::size_t n) {
  std::size_t best = n;
  long best_gain = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (state.contains(k)) continue;
    const long g = state.AddGain(k);
    if (best == n || g > best_gain) {
      best = k;
      best_gain = g;
    }
  }
  return best;
}

// First-improvement swaps, rescanning from the start after each applied swap.
void SwapSearch(SubsetState& state, std::size_t n, std::size_t budget, SubsetResult& result) {
  bool improved = true;
  while (improved && !result.budget_exhausted) {
    improved = false;
    for (std::size_t out = 0; out < n && !improved && !result.budget_exhausted; ++out) {
      if (!state.contains(out)) continue;
      for (std::size_t in = 0; in < n; ++in) {
        if (state.contains(in)) continue;
        if (result.swaps_evaluated == budget) {
          result.budget_exhausted = true;
          break;
        }
        ++result.swaps_evaluated;
        if (state.SwapGain(out, in) > 0) {
          state.Remove(out);
          state.Add(in);
          ++result.swaps_applied;
          improved = true;
          break;
        }
      }
    }
  }
}

}  // namespace

std::size_t SingleLabelObjective(const Manifest& m, const std::vector<std::string>& subset) {
  const std::set<std::string> s(subset.begin(), subset.end());
  std::size_t j = 0;
  for (const auto& e : m.entries) {
    std::size_t hits = 0;
    for (const auto& l : e.labels) hits += s.count(l);
    j += hits == 1;
  }
  return j;
}

SubsetResult SelectSingleLabelSubset(const Manifest& m, std::size_t m_classes,
                                     std::size_t budget) {
  const Incidence inc = BuildIncidence(m);
  const std::size_t n = inc.ids.size();
  if (m_classes == 0 || m_classes > n) {
    throw Error(ErrorKind::kTooFewClasses, "cannot choose " + std::to_string(m_classes) +
                                               " classes from " + std::to_string(n));
  }

  SubsetResult result;
  std::vector<bool> best_set;
  std::size_t best_objective = 0;
  // Start 0 is plain greedy; start k+1 forces class k in first. Every start is
  // refined by swap search and the best local optimum wins (earliest on ties).
  for (std::size_t start = 0; start <= n && !result.budget_exhausted; ++start) {
    if (start > 0 && m_classes == n) break;
    SubsetState state(inc);
    if (start > 0) state.Add(start - 1);
    while (state.size() < m_classes) state.Add(GreedyPick(state, n));
    if (start == 0) result.greedy_objective = state.objective();
    SwapSearch(state, n, budget, result);
    if (start == 0 || state.objective() > best_objective) {
      best_objective = state.objective();
      best_set = state.members();
    }
  }

  for (std::size_t k = 0; k < n; ++k) {
    if (best_set[k]) result.classes.push_back(inc.ids[k]);
  }
  result.objective = best_objective;
  return result;
}

Manifest FilterToSubset(const Manifest& m, const std::vector<std::string>& subset) {
  const std::set<std::string> s(subset.begin(), subset.end());
  Manifest out;
  out.base_dir = m.base_dir;
  for (const auto& e : m.entries) {
    std::vector<std::string> hits;
    for (const auto& l : e.labels) {
      if (s.count(l)) hits.push_back(l);
    }
    if (hits.size() == 1) out.entries.push_back({e.path, hits});
  }
  out.Reindex();
  return out;
}

}  // namespace protoaudio::datasetkit
