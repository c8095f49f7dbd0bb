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

// Trace-level invariant checker. It knows the corrupt set and evaluates every
// property that applies to the trace's protocol; an empty result is a pass.
//
// Property names (stable, used in reports and mutation tests):
//   envelope-range, containment, internal-fault, liveness
//   consistency, validity, termination, totality                (BA / RBC)
//   bua-unique-agreement, bua-majority-unique, bua-validity,
//   link-symmetry, eta2, honest-support                         (BUA / COOL)
//   bba-agreement, bba-validity, bba-persistence                (BBA / COOL)
//   ready-uniqueness, vout-agreement, fairness                  (RBC)

#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ocior/netsim/async_engine.hpp"
#include "ocior/netsim/trace.hpp"

namespace ocior::netsim {

namespace detail {

class Findings {
 public:
  void add(std::string property, std::string detail) { out_.push_back({std::move(property), std::move(detail)}); }
  std::vector<Violation> take() { return std::move(out_); }

 private:
  std::vector<Violation> out_;
};

inline std::string node_str(NodeId i) { return "node " + std::to_string(i); }

inline std::optional<Value> unanimous(const std::vector<Value>& values) {
  if (values.empty()) return std::nullopt;
  for (const auto& v : values) {
    if (v != values.front()) return std::nullopt;
  }
  return values.front();
}

inline void check_envelopes(const Trace& tr, Findings& f) {
  const auto n = tr.scenario.n;
  for (const auto& e : tr.envelopes) {
    if (e.from < 1 || e.from > n || e.to < 1 || e.to > n) {
      f.add("envelope-range", "envelope " + std::to_string(e.seq) + " has an endpoint outside [1, n]");
    }
    if (tr.honest(e.from) && e.adv) {
      f.add("containment", "envelope " + std::to_string(e.seq) + " from honest " + node_str(e.from) +
                               " carries adversary content");
    }
  }
}

inline void check_faults_and_caps(const Trace& tr, Findings& f) {
  for (const auto& [i, r] : tr.reports) {
    for (const auto& msg : r.faults) f.add("internal-fault", node_str(i) + ": " + msg);
  }
  if (tr.cap_hit) f.add("liveness", "execution hit its round/step cap after " + std::to_string(tr.steps));
}

inline void check_agreement(const Trace& tr, Findings& f) {
  std::optional<std::pair<NodeId, Value>> first;
  for (const auto& [i, o] : tr.outputs) {
    if (!tr.honest(i)) continue;
    if (!first) {
      first = {i, o.value};
    } else if (o.value != first->second) {
      f.add("consistency", node_str(first->first) + " output " + value_to_string(first->second) + " but " +
                               node_str(i) + " output " + value_to_string(o.value));
    }
  }
}

inline std::vector<Value> honest_inputs(const Trace& tr) {
  std::vector<Value> v;
  for (NodeId i : tr.honest_nodes()) v.push_back(tr.inputs.at(i));
  return v;
}

inline int bba_input(const Trace& tr, NodeId i) {
  if (tr.scenario.protocol == Protocol::kBba) return tr.inputs.at(i).bytes().at(0) & 1;
  return tr.reports.at(i).vote.value_or(-1);
}

inline void check_bba(const Trace& tr, Findings& f) {
  const auto honest = tr.honest_nodes();
  std::optional<int> decision;
  for (NodeId i : honest) {
    const auto& d = tr.reports.at(i).bba_decision;
    if (!d) continue;
    if (decision && *d != *decision) f.add("bba-agreement", "honest decisions differ (" + node_str(i) + ")");
    decision = d;
  }
  std::set<int> votes;
  for (NodeId i : honest) votes.insert(bba_input(tr, i));
  if (votes.size() == 1 && decision && *decision != *votes.begin()) {
    f.add("bba-validity", "unanimous vote " + std::to_string(*votes.begin()) + " but decision " +
                              std::to_string(*decision));
  }
  // Once all honest estimates agree at a phase boundary they stay fixed.
  std::size_t phases = 0;
  for (NodeId i : honest) phases = std::max(phases, tr.reports.at(i).bba_estimates.size());
  std::optional<int> locked;
  for (std::size_t ph = 0; ph < phases; ++ph) {
    std::set<int> at;
    for (NodeId i : honest) {
      const auto& est = tr.reports.at(i).bba_estimates;
      if (ph < est.size()) at.insert(est[ph]);
    }
    if (locked && (at.size() != 1 || *at.begin() != *locked)) {
      f.add("bba-persistence", "estimates left " + std::to_string(*locked) + " at phase boundary " +
                                   std::to_string(ph));
      break;
    }
    if (!locked && at.size() == 1) locked = *at.begin();
  }
}

inline void check_bua(const Trace& tr, Findings& f) {
  const auto honest = tr.honest_nodes();
  const auto t = tr.scenario.t;

  std::optional<std::pair<NodeId, Value>> agreed;
  std::map<Value, std::size_t> s_one;
  for (NodeId i : honest) {
    const auto& r = tr.reports.at(i);
    if (r.s2 != std::optional<int>(1) || !r.bua_value) continue;
    ++s_one[*r.bua_value];
    if (!agreed) {
      agreed = {i, *r.bua_value};
    } else if (agreed->second != *r.bua_value) {
      f.add("bua-unique-agreement", node_str(agreed->first) + " and " + node_str(i) + " hold s=1 with different values");
    }
  }
  for (NodeId i : honest) {
    const auto& r = tr.reports.at(i);
    if (r.s2 != std::optional<int>(1) || r.vote != std::optional<int>(1) || !r.bua_value) continue;
    if (s_one[*r.bua_value] < t + 1) {
      f.add("bua-majority-unique", node_str(i) + " output (w,1,1) but only " +
                                       std::to_string(s_one[*r.bua_value]) + " honest nodes hold (w,1,*)");
    }
  }
  if (auto w = unanimous(honest_inputs(tr))) {
    for (NodeId i : honest) {
      const auto& r = tr.reports.at(i);
      if (r.s2 != std::optional<int>(1) || r.vote != std::optional<int>(1) || r.bua_value != w) {
        f.add("bua-validity", node_str(i) + " did not output (w,1,1) on unanimous input");
      }
    }
  }

  for (NodeId i : honest) {
    for (NodeId j : honest) {
      if (j <= i) continue;
      const auto& li = tr.reports.at(i).links;
      const auto& lj = tr.reports.at(j).links;
      if (li.size() < j || lj.size() < i) continue;
      if (li[j - 1] != lj[i - 1]) {
        f.add("link-symmetry", "u_" + std::to_string(i) + "(" + std::to_string(j) + ") != u_" + std::to_string(j) +
                                   "(" + std::to_string(i) + ")");
      }
    }
  }

  std::set<Value> classes;
  for (NodeId i : honest) {
    if (tr.reports.at(i).s2 == std::optional<int>(1)) classes.insert(tr.inputs.at(i));
  }
  if (classes.size() > 1) f.add("eta2", std::to_string(classes.size()) + " input classes among honest s=1 nodes");
}

inline void check_cool(const Trace& tr, Findings& f) {
  const auto honest = tr.honest_nodes();
  const auto t = tr.scenario.t;
  const std::uint64_t deadline = 4 + 3 * (t + 1);
  for (NodeId i : honest) {
    auto it = tr.outputs.find(i);
    if (it == tr.outputs.end()) {
      f.add("termination", node_str(i) + " produced no output");
    } else if (it->second.at > deadline) {
      f.add("termination", node_str(i) + " output in round " + std::to_string(it->second.at));
    }
  }
  if (auto w = unanimous(honest_inputs(tr))) {
    for (const auto& [i, o] : tr.outputs) {
      if (tr.honest(i) && o.value != *w) f.add("validity", node_str(i) + " output differs from the unanimous input");
    }
  }
  std::optional<int> decision;
  for (NodeId i : honest) {
    if (tr.reports.at(i).bba_decision) decision = tr.reports.at(i).bba_decision;
  }
  if (decision == 1) {
    std::size_t ones = 0;
    for (NodeId i : honest) ones += tr.reports.at(i).s2 == std::optional<int>(1) ? 1 : 0;
    if (ones < t + 1) f.add("honest-support", "BBA decided 1 with only " + std::to_string(ones) + " honest s=1 nodes");
  }
}

inline void check_rbc(const Trace& tr, Findings& f) {
  const auto& sc = tr.scenario;
  const auto honest = tr.honest_nodes();
  std::size_t outputs = 0;
  for (NodeId i : honest) outputs += tr.outputs.contains(i) ? 1 : 0;

  if (outputs > 0 && outputs < honest.size()) {
    f.add("totality", std::to_string(outputs) + " of " + std::to_string(honest.size()) + " honest nodes output");
  }
  if (tr.honest(sc.leader)) {
    const Value& w = tr.inputs.at(sc.leader);
    for (NodeId i : honest) {
      auto it = tr.outputs.find(i);
      if (it == tr.outputs.end()) {
        f.add("validity", node_str(i) + " never output under an honest leader");
      } else if (it->second.value != w) {
        f.add("validity", node_str(i) + " output differs from the honest leader's input");
      }
    }
  }

  std::optional<int> ready, vout;
  std::set<Value> classes;
  for (NodeId i : honest) {
    const auto& r = tr.reports.at(i);
    if (r.ready_bit) {
      if (ready && *ready != *r.ready_bit) f.add("ready-uniqueness", "honest READY bits differ (" + node_str(i) + ")");
      ready = r.ready_bit;
    }
    if (r.v_out) {
      if (vout && *vout != *r.v_out) f.add("vout-agreement", "honest v_out differ (" + node_str(i) + ")");
      vout = r.v_out;
    }
    if (r.s2 == std::optional<int>(1) && r.input) classes.insert(*r.input);
  }
  if (classes.size() > 1) f.add("eta2", std::to_string(classes.size()) + " phase-1 values among honest s2=1 nodes");

  // Overtakes of each honest-to-honest envelope, at delivery or at the end.
  std::vector<const EnvelopeRecord*> order;
  for (const auto& e : tr.envelopes) {
    if (e.delivered) order.push_back(&e);
  }
  std::sort(order.begin(), order.end(), [](auto* a, auto* b) { return *a->delivered < *b->delivered; });
  Fenwick seen;
  std::uint64_t count = 0;
  for (const auto* e : order) {
    if (!e->adv && tr.honest(e->to) && count - seen.prefix(e->seq) > sc.fairness) {
      f.add("fairness", "envelope " + std::to_string(e->seq) + " overtaken " +
                            std::to_string(count - seen.prefix(e->seq)) + " times");
    }
    seen.add(e->seq);
    ++count;
  }
  for (const auto& e : tr.envelopes) {
    if (e.delivered || e.adv || !tr.honest(e.to)) continue;
    if (count - seen.prefix(e.seq) > sc.fairness) {
      f.add("fairness", "undelivered envelope " + std::to_string(e.seq) + " overtaken " +
                            std::to_string(count - seen.prefix(e.seq)) + " times");
    }
  }
}

}  // namespace detail

/// Evaluates every applicable property. Requires the trace's corrupt set.
inline std::vector<Violation> check_invariants(const Trace& tr) {
  detail::Findings f;
  detail::check_envelopes(tr, f);
  detail::check_faults_and_caps(tr, f);
  switch (tr.scenario.protocol) {
    case Protocol::kCool:
      detail::check_agreement(tr, f);
      detail::check_cool(tr, f);
      detail::check_bua(tr, f);
      detail::check_bba(tr, f);
      break;
    case Protocol::kBua:
      detail::check_bua(tr, f);
      break;
    case Protocol::kBba:
      detail::check_agreement(tr, f);
      detail::check_bba(tr, f);
      break;
    case Protocol::kRbcBalanced:
    case Protocol::kRbcUnbalanced:
      detail::check_agreement(tr, f);
      detail::check_rbc(tr, f);
      break;
  }
  return f.take();
}

/// One-word summary for reports.
inline std::string outcome(const Trace& tr) {
  bool liveness = false;
  for (const auto& v : tr.violations) liveness |= v.property == "liveness" || v.property == "termination";
  if (liveness) return "liveness-failure";
  if (!tr.violations.empty()) return "violation";
  if (is_async(tr.scenario.protocol) && tr.outputs.empty()) return "no-output";
  return "ok";
}

}  // namespace ocior::netsim
