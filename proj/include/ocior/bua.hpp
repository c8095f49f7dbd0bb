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

// Byzantine unique agreement in two synchronous phases.
//
// Round 1 (SYMBOL): node i sends (y_j^(i), y_i^(i)) to every j and sets
//   u_i(j) = 1 when the pair from j equals its own (y_i^(i), y_j^(i)).
// Round 2 (SI-PH1): s_i = 1 iff at least n - t links match; the indicator is
//   broadcast and S1/S0 are built from what arrives. Silence counts as 0.
// Round 3 (SI-PH2): a node with s_i = 1 clears u_i(j) for j in S0 and, if
//   fewer than n - t links remain, demotes itself and broadcasts SI-PH2(0).
// The vote is 1 iff |S1| >= 2t + 1 after applying the demotions.

#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "ocior/rs.hpp"
#include "ocior/wire.hpp"

namespace ocior {

struct BuaOutput {
  Value w;  // w^(i): the input, or bottom after a demotion
  int s = 0;
  int v = 0;
  std::set<NodeId> s0, s1;
  SymbolSet diag;    // j -> y_j^(j) as received
  SymbolSet column;  // j -> y_i^(j) as received
};

class Bua {
 public:
  Bua(NodeId self, CodeParams params, Value input)
      : self_(self), p_(std::move(params)), input_(std::move(input)) {
    if (input_.is_empty()) throw std::invalid_argument("BUA input must be non-empty");
    codeword_ = encode_value(p_, input_);
    out_.w = input_;
    links_.assign(p_.n, 0);
  }

  const CodeParams& params() const { return p_; }
  const Value& input() const { return input_; }
  const std::vector<CodedSymbol>& codeword() const { return codeword_; }
  const std::vector<std::uint8_t>& links() const { return links_; }
  int phase1_indicator() const { return s1_; }
  const BuaOutput& output() const { return out_; }

  /// Round 1 messages.
  std::vector<Outgoing> start() const {
    std::vector<Outgoing> out;
    out.reserve(p_.n);
    for (NodeId j = 1; j <= p_.n; ++j) {
      out.push_back({j, Message{Tag::kSymbol, 0, encode_pair(codeword_[j - 1], codeword_[self_ - 1], p_.c)}});
    }
    return out;
  }

  /// Consumes round-1 SYMBOL messages; returns the SI-PH1 broadcast.
  std::vector<Outgoing> close_round1(const std::vector<Delivery>& inbox) {
    for (const auto& d : inbox) {
      if (d.msg.tag != Tag::kSymbol || d.from < 1 || d.from > p_.n) continue;
      if (!seen_symbol_.insert(d.from).second) continue;
      const auto pair = decode_pair(p_, d.msg.payload);
      if (!pair) continue;
      out_.column.emplace(d.from, pair->first);
      out_.diag.emplace(d.from, pair->second);
      if (pair->first == codeword_[self_ - 1] && pair->second == codeword_[d.from - 1]) {
        links_[d.from - 1] = 1;
      }
    }
    std::size_t matched = 0;
    for (auto u : links_) matched += u;
    s1_ = matched >= p_.n - p_.t ? 1 : 0;
    out_.s = s1_;
    if (s1_ == 0) out_.w = Value::bottom();
    return to_all(p_.n, Message{Tag::kSiPh1, 0, encode_bit(s1_)});
  }

  /// Consumes SI-PH1 messages, masks links to S0, and returns SI-PH2(0) on
  /// demotion (nothing otherwise).
  std::vector<Outgoing> close_round2(const std::vector<Delivery>& inbox) {
    std::map<NodeId, int> indicator;
    for (const auto& d : inbox) {
      if (d.msg.tag != Tag::kSiPh1 || d.from < 1 || d.from > p_.n) continue;
      if (indicator.contains(d.from)) continue;
      if (auto bit = decode_bit(d.msg.payload)) indicator.emplace(d.from, *bit);
    }
    for (NodeId j = 1; j <= p_.n; ++j) {
      auto it = indicator.find(j);
      if (it != indicator.end() && it->second == 1) {
        out_.s1.insert(j);
      } else {
        out_.s0.insert(j);
      }
    }
    if (out_.s != 1) return {};
    std::size_t matched = 0;
    for (NodeId j = 1; j <= p_.n; ++j) {
      if (links_[j - 1] && !out_.s0.contains(j)) ++matched;
    }
    if (matched >= p_.n - p_.t) return {};
    out_.s = 0;
    out_.w = Value::bottom();
    return to_all(p_.n, Message{Tag::kSiPh2, 0, encode_bit(0)});
  }

  /// Consumes SI-PH2 messages and fixes the vote.
  const BuaOutput& close_round3(const std::vector<Delivery>& inbox) {
    std::set<NodeId> seen;
    for (const auto& d : inbox) {
      if (d.msg.tag != Tag::kSiPh2 || !seen.insert(d.from).second) continue;
      if (!out_.s1.contains(d.from)) continue;
      if (decode_bit(d.msg.payload) == std::optional<int>(0)) {
        out_.s1.erase(d.from);
        out_.s0.insert(d.from);
      }
    }
    out_.v = out_.s1.size() >= 2 * p_.t + 1 ? 1 : 0;
    return out_;
  }

 private:
  NodeId self_;
  CodeParams p_;
  Value input_;
  std::vector<CodedSymbol> codeword_;
  std::vector<std::uint8_t> links_;
  std::set<NodeId> seen_symbol_;
  int s1_ = 0;
  BuaOutput out_;
};

/// Standalone BUA: three rounds, output w^(i).
class BuaNode final : public SyncNode {
 public:
  BuaNode(NodeId self, CodeParams params, Value input) : bua_(self, std::move(params), std::move(input)) {
    report_.input = bua_.input();
  }

  std::vector<Outgoing> start() override { return bua_.start(); }

  std::vector<Outgoing> end_round(std::uint32_t round, const std::vector<Delivery>& inbox) override {
    switch (round) {
      case 1: {
        auto out = bua_.close_round1(inbox);
        report_.s1 = bua_.phase1_indicator();
        report_.links = bua_.links();
        return out;
      }
      case 2:
        return bua_.close_round2(inbox);
      case 3: {
        const auto& o = bua_.close_round3(inbox);
        report_.s2 = o.s;
        report_.vote = o.v;
        report_.bua_value = o.w;
        report_.output = o.w;
        done_ = true;
        return {};
      }
      default:
        return {};
    }
  }

  bool terminated() const override { return done_; }
  const NodeReport& report() const override { return report_; }

 private:
  Bua bua_;
  NodeReport report_;
  bool done_ = false;
};

}  // namespace ocior
