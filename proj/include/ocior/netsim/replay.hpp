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

// Checked execution and trace replay.
//
// Replay re-runs the honest nodes from the recorded configuration while the
// corrupt nodes' envelopes and the delivery order are taken from the trace.
// The replayed trace is then serialized and compared byte for byte with the
// recorded one.

#pragma once

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ocior/netsim/async_engine.hpp"
#include "ocior/netsim/checker.hpp"
#include "ocior/netsim/sync_engine.hpp"
#include "ocior/netsim/trace.hpp"

namespace ocior::netsim {

class ReplayDivergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Runs a scenario and attaches the checker's findings.
inline Trace run_checked(const Scenario& sc, ChoiceSource* choices = nullptr) {
  Trace tr = run_scenario(sc, choices);
  tr.violations = check_invariants(tr);
  return tr;
}

class TraceAdversary final : public SyncAdversary, public AsyncAdversary {
 public:
  explicit TraceAdversary(const Trace& rec) {
    for (const auto& e : rec.envelopes) {
      if (!e.adv) continue;
      Outgoing out{e.to, e.msg};
      if (is_async(rec.scenario.protocol)) {
        by_step_[e.emitted_at].emplace_back(e.from, out);
      } else {
        by_step_[e.round].emplace_back(e.from, out);
      }
    }
  }

  std::vector<Emission> emit(std::uint32_t round, const std::vector<EnvelopeRecord>&) override { return take(round); }
  void deliver(std::uint32_t, NodeId, const std::vector<Delivery>&) override {}

  std::vector<Emission> start() override { return take(0); }
  std::vector<Outgoing> deliver(std::uint64_t step, NodeId node, const Delivery&) override {
    std::vector<Outgoing> out;
    for (auto& [from, m] : take(step)) {
      if (from != node) throw ReplayDivergence("recorded corrupt envelope from an idle node at step " + std::to_string(step));
      out.push_back(std::move(m));
    }
    return out;
  }

 private:
  std::vector<Emission> take(std::uint64_t key) {
    auto it = by_step_.find(key);
    if (it == by_step_.end()) return {};
    auto out = std::move(it->second);
    by_step_.erase(it);
    return out;
  }

  std::map<std::uint64_t, std::vector<Emission>> by_step_;
};

class TraceScheduler final : public Scheduler {
 public:
  explicit TraceScheduler(const Trace& rec) {
    for (const auto& e : rec.envelopes) {
      if (e.delivered) order_[*e.delivered] = e.seq;
    }
  }

  std::uint64_t pick(std::uint64_t step, const Pending& pending, std::optional<std::uint64_t>) override {
    auto it = order_.find(step);
    if (it == order_.end()) throw ReplayDivergence("no recorded delivery for step " + std::to_string(step));
    if (!pending.by_seq().contains(it->second)) {
      throw ReplayDivergence("recorded delivery " + std::to_string(it->second) + " is not pending at step " +
                             std::to_string(step));
    }
    return it->second;
  }

 private:
  std::map<std::uint64_t, std::uint64_t> order_;
};

struct ReplayResult {
  bool identical = false;
  std::string detail;  // first divergence, if any
  Trace replayed;
};

inline ReplayResult replay(const Trace& recorded) {
  ReplayResult r;
  TraceAdversary adversary(recorded);
  try {
    if (is_async(recorded.scenario.protocol)) {
      TraceScheduler scheduler(recorded);
      r.replayed = run_async(recorded.scenario, AsyncHooks{&adversary, &scheduler, nullptr});
    } else {
      r.replayed = run_sync(recorded.scenario, &adversary);
    }
  } catch (const ReplayDivergence& e) {
    r.detail = e.what();
    return r;
  }
  r.replayed.violations = check_invariants(r.replayed);

  const std::string a = trace_to_string(recorded);
  const std::string b = trace_to_string(r.replayed);
  r.identical = a == b;
  if (!r.identical) {
    std::istringstream sa(a), sb(b);
    std::string la, lb;
    for (std::size_t line = 1;; ++line) {
      const bool ga = static_cast<bool>(std::getline(sa, la));
      const bool gb = static_cast<bool>(std::getline(sb, lb));
      if (!ga || !gb || la != lb) {
        r.detail = "first difference at record " + std::to_string(line) + "\n  recorded: " + (ga ? la : "<eof>") +
                   "\n  replayed: " + (gb ? lb : "<eof>");
        break;
      }
    }
  }
  return r;
}

}  // namespace ocior::netsim
