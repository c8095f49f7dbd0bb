// Copyright 2026 The ocior Authors.
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

// Depth-first enumeration of every choice sequence a run can make. Each run
// replays a prefix of choices and takes option 0 beyond it; the recorded
// (choice, options) trail then yields the next prefix in lexicographic order.

#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "ocior/netsim/adversary.hpp"

namespace ocior::netsim {

class PrefixChoices final : public ChoiceSource {
 public:
  explicit PrefixChoices(std::vector<std::size_t> prefix) : prefix_(std::move(prefix)) {}

  std::size_t choose(std::size_t options, bool) override {
    const std::size_t pos = trail_.size();
    const std::size_t c = pos < prefix_.size() ? prefix_[pos] : 0;
    trail_.push_back({c, options});
    return c < options ? c : options - 1;
  }

  /// The prefix that follows this run's trail, or false when exhausted.
  bool next(std::vector<std::size_t>& out) const {
    for (std::size_t i = trail_.size(); i-- > 0;) {
      if (trail_[i].first + 1 < trail_[i].second) {
        out.clear();
        for (std::size_t k = 0; k < i; ++k) out.push_back(trail_[k].first);
        out.push_back(trail_[i].first + 1);
        return true;
      }
    }
    return false;
  }

 private:
  std::vector<std::size_t> prefix_;
  std::vector<std::pair<std::size_t, std::size_t>> trail_;
};

struct ExploreStats {
  std::uint64_t runs = 0;
  std::uint64_t violating = 0;
};

/// Calls `run` once per distinct choice sequence; `run` returns true when
/// the execution was clean. Stops after `limit` runs (0 = no limit).
inline ExploreStats explore(const std::function<bool(ChoiceSource&)>& run, std::uint64_t limit = 0) {
  ExploreStats stats;
  std::vector<std::size_t> prefix;
  for (;;) {
    PrefixChoices choices(prefix);
    if (!run(choices)) ++stats.violating;
    ++stats.runs;
    if (limit != 0 && stats.runs >= limit) break;
    if (!choices.next(prefix)) break;
  }
  return stats;
}

}  // namespace ocior::netsim
