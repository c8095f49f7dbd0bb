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

// Synchronous Byzantine agreement: BUA (rounds 1-3), phase-king binary BA on
// the BUA votes (rounds 4 .. 3 + 3(t+1)), then one calibration round.
//
// BBA decides 0: output bottom at the end of the last BBA round.
// BBA decides 1: in round 4 + 3(t+1) nodes with s = 0 replace y_i^(i) by the
// strict plurality of {y_i^(j) : j in S1}, send it as CORRECT-SYMBOL to S0,
// and decode [y_1^(1) .. y_n^(n)] with the corrected entries. Nodes with
// s = 1 output their value at the end of that round.

#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "ocior/binary_ba.hpp"
#include "ocior/bua.hpp"
#include "ocior/rs.hpp"
#include "ocior/wire.hpp"

namespace ocior {

/// Strict plurality; a tie for the top count (or no candidates) is an
/// invariant violation.
inline CodedSymbol majority_symbol(const std::vector<CodedSymbol>& candidates) {
  std::map<CodedSymbol, std::size_t> counts;
  for (const auto& c : candidates) ++counts[c];
  const CodedSymbol* best = nullptr;
  std::size_t best_count = 0;
  bool tie = false;
  for (const auto& [sym, count] : counts) {
    if (count > best_count) {
      best = &sym;
      best_count = count;
      tie = false;
    } else if (count == best_count) {
      tie = true;
    }
  }
  if (best == nullptr) throw InvariantViolation("majority over an empty multiset");
  if (tie) throw InvariantViolation("majority tie");
  return *best;
}

class CoolNode final : public SyncNode {
 public:
  CoolNode(NodeId self, CodeParams params, Value input)
      : self_(self), p_(params), bua_(self, std::move(params), std::move(input)) {
    report_.input = bua_.input();
  }

  static std::uint32_t total_rounds(std::size_t t) { return 4 + PhaseKing::total_rounds(t); }
  std::uint32_t phase3_round() const { return total_rounds(p_.t); }
  std::uint32_t last_bba_round() const { return 3 + PhaseKing::total_rounds(p_.t); }

  std::vector<Outgoing> start() override { return bua_.start(); }

  std::vector<Outgoing> end_round(std::uint32_t round, const std::vector<Delivery>& inbox) override {
    if (done_) return {};
    if (round == 1) {
      auto out = bua_.close_round1(inbox);
      report_.s1 = bua_.phase1_indicator();
      report_.links = bua_.links();
      return out;
    }
    if (round == 2) return bua_.close_round2(inbox);
    if (round == 3) {
      const auto& o = bua_.close_round3(inbox);
      report_.s2 = o.s;
      report_.vote = o.v;
      report_.bua_value = o.w;
      bba_.emplace(self_, p_.n, p_.t, o.v);
      return bba_->start();
    }
    if (round <= last_bba_round()) {
      auto out = bba_->step(round - 3, inbox);
      if (round < last_bba_round()) return out;
      report_.bba_decision = bba_->decision();
      report_.bba_estimates = bba_->estimates();
      if (bba_->decision() == std::optional<int>(0)) {
        finish(Value::bottom());
        return {};
      }
      return calibrate();
    }
    if (round == phase3_round()) finalize(inbox);
    return {};
  }

  bool terminated() const override { return done_; }
  const NodeReport& report() const override { return report_; }

 private:
  std::vector<Outgoing> calibrate() {
    const auto& o = bua_.output();
    if (o.s == 1) return {};
    std::vector<CodedSymbol> candidates;
    for (NodeId j : o.s1) {
      auto it = o.column.find(j);
      if (it != o.column.end()) candidates.push_back(it->second);
    }
    try {
      corrected_ = majority_symbol(candidates);
    } catch (const InvariantViolation& e) {
      report_.faults.push_back(e.what());
      return {};
    }
    std::vector<Outgoing> out;
    for (NodeId j : o.s0) {
      out.push_back({j, Message{Tag::kCorrectSymbolCool, 0, encode_symbol(*corrected_, p_.c)}});
    }
    return out;
  }

  void finalize(const std::vector<Delivery>& inbox) {
    const auto& o = bua_.output();
    if (o.s == 1) {
      finish(o.w);
      return;
    }
    SymbolSet diag = o.diag;
    if (corrected_) diag[self_] = *corrected_;
    std::set<NodeId> seen;
    for (const auto& d : inbox) {
      if (d.msg.tag != Tag::kCorrectSymbolCool || !o.s0.contains(d.from)) continue;
      if (!seen.insert(d.from).second) continue;
      if (auto sym = decode_symbol(p_, d.msg.payload)) diag[d.from] = *sym;
    }
    try {
      if (diag.size() < p_.k) throw InvariantViolation("phase-3 decode: too few symbols");
      const std::size_t max_errors = std::min(p_.t, (diag.size() - p_.k) / 2);
      auto data = rs_decode(p_, diag, max_errors);
      if (!data) throw InvariantViolation("phase-3 decode failure");
      auto value = unpack_message(*data, p_);
      if (!value) throw InvariantViolation("phase-3 decode produced an invalid frame");
      finish(*value);
    } catch (const InvariantViolation& e) {
      report_.faults.push_back(e.what());
      finish(Value::bottom());
    }
  }

  void finish(Value v) {
    report_.output = std::move(v);
    done_ = true;
  }

  NodeId self_;
  CodeParams p_;
  Bua bua_;
  std::optional<PhaseKing> bba_;
  std::optional<CodedSymbol> corrected_;
  NodeReport report_;
  bool done_ = false;
};

}  // namespace ocior
