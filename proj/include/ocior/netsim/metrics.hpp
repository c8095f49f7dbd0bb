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

#pragma once

#include <algorithm>
#include <string>

#include "ocior/netsim/trace.hpp"

namespace ocior::netsim {

/// Communication is counted at the sender, honest senders only, whether or
/// not the envelope is ever delivered.
inline Metrics compute_metrics(const Trace& tr) {
  Metrics m;
  for (NodeId i : tr.honest_nodes()) m.bits_by_node[i] = 0;
  for (const auto& e : tr.envelopes) {
    if (e.adv || !tr.honest(e.from)) continue;
    m.total_bits += e.bits;
    m.bits_by_node[e.from] += e.bits;
    m.bits_by_tag[std::string(tag_name(e.msg.tag))] += e.bits;
  }
  m.envelopes = tr.envelopes.size();
  for (const auto& [i, b] : m.bits_by_node) m.max_node_bits = std::max(m.max_node_bits, b);
  if (!m.bits_by_node.empty()) m.mean_node_bits = static_cast<double>(m.total_bits) / m.bits_by_node.size();
  if (is_async(tr.scenario.protocol)) {
    auto it = m.bits_by_node.find(tr.scenario.leader);
    if (it != m.bits_by_node.end()) m.leader_bits = it->second;
  }
  for (const auto& [i, o] : tr.outputs) {
    if (!tr.honest(i)) continue;
    if (is_async(tr.scenario.protocol)) {
      m.depth = std::max(m.depth, o.at);
    } else {
      m.rounds = std::max(m.rounds, o.at);
    }
  }
  return m;
}

}  // namespace ocior::netsim
