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

// Synchronous binary Byzantine agreement by phase king, t + 1 phases of three
// rounds each. Kings are nodes 1..t+1 in order.
//
// Per phase p:
//   round 1  broadcast BBA-V1(b). A node that sees some bit x from at least
//            n - t senders proposes x, otherwise proposes nothing.
//   round 2  broadcast BBA-V2(proposal). A bit proposed by at least t + 1
//            senders is adopted; C is the number of proposals for it.
//   round 3  the king broadcasts BBA-KING(b). Nodes with C < n - t take the
//            king's bit; a missing or malformed king message keeps b.
// The decision is b after phase t + 1.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include "ocior/wire.hpp"

namespace ocior {

class PhaseKing {
 public:
  PhaseKing(NodeId self, std::size_t n, std::size_t t, int vote)
      : self_(self), n_(n), t_(t), estimate_(vote != 0 ? 1 : 0) {}

  static std::uint32_t total_rounds(std::size_t t) { return static_cast<std::uint32_t>(3 * (t + 1)); }
  std::uint32_t total_rounds() const { return total_rounds(t_); }

  std::vector<Outgoing> start() {
    estimates_.push_back(estimate_);
    return broadcast(Tag::kBbaV1, 1, encode_bit(estimate_));
  }

  /// Consumes the messages of local round `r` (1-based) and returns the
  /// messages for round r + 1. Messages not belonging to round r are ignored.
  std::vector<Outgoing> step(std::uint32_t r, const std::vector<Delivery>& inbox) {
    if (decision_) return {};
    const std::uint32_t phase = (r - 1) / 3 + 1;
    switch ((r - 1) % 3) {
      case 0: {
        const auto counts = tally(inbox, Tag::kBbaV1, phase, 1);
        std::uint8_t proposal = kNoProposal;
        for (std::uint8_t b = 0; b < 2; ++b) {
          if (counts[b] >= n_ - t_) proposal = b;
        }
        return broadcast(Tag::kBbaV2, phase, Bytes{proposal});
      }
      case 1: {
        const auto counts = tally(inbox, Tag::kBbaV2, phase, kNoProposal);
        support_ = 0;
        for (int b = 0; b < 2; ++b) {
          if (counts[b] >= t_ + 1 && counts[b] > support_) {
            estimate_ = b;
            support_ = counts[b];
          }
        }
        if (self_ == phase) return broadcast(Tag::kBbaKing, phase, encode_bit(estimate_));
        return {};
      }
      default: {
        if (support_ < n_ - t_) {
          for (const auto& d : inbox) {
            if (d.from != phase || d.msg.tag != Tag::kBbaKing || d.msg.phase != phase) continue;
            if (auto bit = decode_bit(d.msg.payload)) estimate_ = *bit;
            break;
          }
        }
        estimates_.push_back(estimate_);
        if (phase == t_ + 1) {
          decision_ = estimate_;
          return {};
        }
        return broadcast(Tag::kBbaV1, phase + 1, encode_bit(estimate_));
      }
    }
  }

  int estimate() const { return estimate_; }
  std::optional<int> decision() const { return decision_; }
  const std::vector<int>& estimates() const { return estimates_; }

 private:
  std::vector<Outgoing> broadcast(Tag tag, std::uint32_t phase, Bytes payload) const {
    return to_all(n_, Message{tag, phase, std::move(payload)});
  }

  // First well-formed message per sender; index 0/1 are bit counts.
  std::array<std::size_t, 3> tally(const std::vector<Delivery>& inbox, Tag tag, std::uint32_t phase,
                                   std::uint8_t max_value) const {
    std::array<std::size_t, 3> counts{};
    std::set<NodeId> seen;
    for (const auto& d : inbox) {
      if (d.msg.tag != tag || d.msg.phase != phase || d.msg.payload.size() != 1) continue;
      const std::uint8_t v = d.msg.payload[0];
      if (v > max_value || !seen.insert(d.from).second) continue;
      ++counts[v];
    }
    return counts;
  }

  NodeId self_;
  std::size_t n_, t_;
  int estimate_;
  std::size_t support_ = 0;
  std::vector<int> estimates_;
  std::optional<int> decision_;
};

/// Standalone binary BA node: input bit in, decision bit out.
class BbaNode final : public SyncNode {
 public:
  BbaNode(NodeId self, std::size_t n, std::size_t t, int vote) : core_(self, n, t, vote) {
    report_.input = Value::of(Bytes{static_cast<std::uint8_t>(vote != 0)});
  }

  std::vector<Outgoing> start() override { return core_.start(); }

  std::vector<Outgoing> end_round(std::uint32_t round, const std::vector<Delivery>& inbox) override {
    auto out = core_.step(round, inbox);
    if (auto d = core_.decision()) {
      report_.bba_decision = *d;
      report_.bba_estimates = core_.estimates();
      report_.output = Value::of(Bytes{static_cast<std::uint8_t>(*d)});
    }
    return out;
  }

  bool terminated() const override { return core_.decision().has_value(); }
  const NodeReport& report() const override { return report_; }

 private:
  PhaseKing core_;
  NodeReport report_;
};

}  // namespace ocior
