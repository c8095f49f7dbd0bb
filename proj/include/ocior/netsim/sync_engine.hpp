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

// Lock-step engine with a rushing adversary: in each round the honest
// messages are fixed first, then the adversary picks the corrupt messages
// with all of them in view, then everything sent in the round is delivered.

#pragma once

#include <map>
#include <memory>
#include <vector>

#include "ocior/netsim/adversary.hpp"
#include "ocior/netsim/metrics.hpp"
#include "ocior/netsim/trace.hpp"

namespace ocior::netsim {

class EnvelopeLog {
 public:
  EnvelopeLog(Trace& tr, const CodeParams& p) : tr_(tr), p_(p) {}

  EnvelopeRecord& add(NodeId from, Outgoing out, bool adv) {
    EnvelopeRecord e;
    e.seq = tr_.envelopes.size();
    e.from = from;
    e.to = out.to;
    e.msg = std::move(out.msg);
    e.adv = adv;
    e.emit_index = emitted_[from]++;
    e.bits = adv ? 0 : content_bits(p_, e.msg);
    tr_.envelopes.push_back(std::move(e));
    return tr_.envelopes.back();
  }

 private:
  Trace& tr_;
  const CodeParams& p_;
  std::map<NodeId, std::uint64_t> emitted_;
};

inline Trace new_trace(const Scenario& sc, const Setup& setup) {
  Trace tr;
  tr.scenario = sc;
  tr.corrupt = setup.corrupt;
  tr.inputs = setup.inputs;
  return tr;
}

/// Runs one synchronous execution. `adversary` defaults to the scenario's
/// strategy; replay passes a recorded one.
inline Trace run_sync(const Scenario& sc, SyncAdversary* adversary = nullptr, ChoiceSource* choices = nullptr) {
  sc.validate();
  const Setup setup = make_setup(sc);
  const CodeParams p = sc.code_params();
  Trace tr = new_trace(sc, setup);
  EnvelopeLog log(tr, p);

  std::unique_ptr<Byzantine> own;
  if (adversary == nullptr) {
    own = std::make_unique<Byzantine>(sc, setup, p, choices);
    adversary = own.get();
  }

  std::map<NodeId, std::unique_ptr<SyncNode>> nodes;
  std::map<NodeId, std::vector<Outgoing>> outbox;
  for (NodeId i : tr.honest_nodes()) {
    nodes[i] = make_sync_node(sc.protocol, i, p, setup.inputs.at(i));
    outbox[i] = nodes[i]->start();
  }

  const std::uint32_t cap = sc.effective_round_cap();
  std::uint32_t round = 1;
  for (; round <= cap; ++round) {
    const std::size_t first = tr.envelopes.size();
    for (auto& [i, msgs] : outbox) {
      for (auto& m : msgs) {
        auto& e = log.add(i, std::move(m), false);
        e.round = round;
        e.depth = round;
      }
      msgs.clear();
    }
    const std::vector<EnvelopeRecord> honest_round(tr.envelopes.begin() + static_cast<std::ptrdiff_t>(first),
                                                   tr.envelopes.end());
    for (auto& [from, m] : adversary->emit(round, honest_round)) {
      auto& e = log.add(from, std::move(m), true);
      e.round = round;
      e.depth = round;
    }

    std::map<NodeId, std::vector<Delivery>> inbox;
    for (std::size_t k = first; k < tr.envelopes.size(); ++k) {
      auto& e = tr.envelopes[k];
      if (e.to < 1 || e.to > sc.n) continue;
      e.delivered = round;
      inbox[e.to].push_back({e.from, e.msg});
    }
    for (auto& [i, node] : nodes) {
      if (node->terminated()) continue;
      outbox[i] = node->end_round(round, inbox[i]);
      if (node->terminated()) tr.outputs[i] = {i, node->report().output.value_or(Value::bottom()), round, round};
    }
    for (NodeId c : setup.corrupt) adversary->deliver(round, c, inbox[c]);

    bool all_done = true;
    for (const auto& [i, node] : nodes) all_done &= node->terminated();
    if (all_done) break;
  }
  tr.steps = std::min(round, cap);
  tr.cap_hit = round > cap;
  for (const auto& [i, node] : nodes) tr.reports[i] = node->report();
  tr.metrics = compute_metrics(tr);
  return tr;
}

}  // namespace ocior::netsim
