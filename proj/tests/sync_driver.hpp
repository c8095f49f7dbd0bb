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

// Lock-step driver for unit tests: runs a set of honest SyncNodes and lets
// the test script the corrupt nodes' traffic round by round.

#pragma once

#include <functional>
#include <map>
#include <memory>
#include <vector>

#include "ocior/wire.hpp"

namespace ocior::test {

struct Sent {
  NodeId from;
  Outgoing out;
};

/// Called once per round with the honest messages of that round; returns the
/// corrupt messages of the same round.
using RoundScript = std::function<std::vector<Sent>(std::uint32_t round, const std::vector<Sent>& honest)>;

struct DriveResult {
  std::map<NodeId, NodeReport> reports;
  std::map<NodeId, std::uint32_t> finished_at;
  std::uint32_t rounds = 0;
};

inline DriveResult drive(std::map<NodeId, std::unique_ptr<SyncNode>>& nodes, const RoundScript& script,
                         std::uint32_t cap = 1000) {
  DriveResult res;
  std::map<NodeId, std::vector<Outgoing>> outbox;
  for (auto& [i, node] : nodes) outbox[i] = node->start();
  for (std::uint32_t r = 1; r <= cap; ++r) {
    std::vector<Sent> honest;
    for (auto& [i, msgs] : outbox) {
      for (auto& m : msgs) honest.push_back({i, std::move(m)});
      msgs.clear();
    }
    auto all = honest;
    if (script) {
      for (auto& s : script(r, honest)) all.push_back(std::move(s));
    }
    std::map<NodeId, std::vector<Delivery>> inbox;
    for (const auto& s : all) inbox[s.out.to].push_back({s.from, s.out.msg});
    bool done = true;
    for (auto& [i, node] : nodes) {
      if (node->terminated()) continue;
      outbox[i] = node->end_round(r, inbox[i]);
      if (node->terminated()) res.finished_at[i] = r;
      done &= node->terminated();
    }
    res.rounds = r;
    if (done) break;
  }
  for (auto& [i, node] : nodes) res.reports[i] = node->report();
  return res;
}

/// Messages addressed to every node in `to` (1-based ids).
inline std::vector<Sent> send_each(NodeId from, const std::vector<NodeId>& to, Tag tag, std::uint32_t phase,
                                   const std::function<Bytes(NodeId)>& payload) {
  std::vector<Sent> out;
  for (NodeId j : to) out.push_back({from, {j, Message{tag, phase, payload(j)}}});
  return out;
}

}  // namespace ocior::test
