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

#include <catch_amalgamated.hpp>

#include "ocior/cool.hpp"
#include "ocior/netsim/replay.hpp"
#include "sync_driver.hpp"

using namespace ocior;
using test::drive;
using test::Sent;

namespace {

const Value kW = Value::of(Bytes{'c', 'o', 'o', 'l', '-', 'w'});
const Value kW2 = Value::of(Bytes{'o', 't', 'h', 'e', 'r', '!'});

std::map<NodeId, std::unique_ptr<SyncNode>> cool_nodes(const CodeParams& p, const std::map<NodeId, Value>& inputs) {
  std::map<NodeId, std::unique_ptr<SyncNode>> nodes;
  for (const auto& [i, w] : inputs) nodes[i] = std::make_unique<CoolNode>(i, p, w);
  return nodes;
}

CodedSymbol garbage(const CodeParams& p, NodeId index, Rng& rng) {
  CodedSymbol s{static_cast<std::uint16_t>(index), Lanes(p.lane_count)};
  for (auto& e : s.lanes) e = static_cast<Element>(rng.uniform(p.field().size()));
  return s;
}

}  // namespace

TEST_CASE("majority_symbol is a strict plurality", "[cool]") {
  const auto p = CodeParams::make(7, 2, 64);
  const auto cw = encode_value(p, kW);
  Rng rng(3);
  SECTION("unanimity") { CHECK(majority_symbol({cw[0], cw[0], cw[0]}) == cw[0]); }
  SECTION("t + 1 agreeing beat t distinct garbage symbols") {
    CHECK(majority_symbol({garbage(p, 1, rng), cw[0], cw[0], garbage(p, 1, rng), cw[0]}) == cw[0]);
  }
  SECTION("a tie or an empty multiset is an invariant violation") {
    const auto g = garbage(p, 1, rng);
    CHECK_THROWS_AS(majority_symbol({cw[0], g, cw[0], g}), InvariantViolation);
    CHECK_THROWS_AS(majority_symbol({}), InvariantViolation);
  }
}

TEST_CASE("fault-free unanimous COOL takes exactly 4 + 3(t + 1) rounds", "[cool]") {
  for (std::size_t n : {4U, 7U, 10U, 13U}) {
    const std::size_t t = (n - 1) / 3;
    const auto p = CodeParams::make(n, t, 128);
    std::map<NodeId, Value> in;
    for (NodeId i = 1; i <= n; ++i) in[i] = kW;
    auto nodes = cool_nodes(p, in);
    auto r = drive(nodes, nullptr);
    INFO("n = " << n);
    CHECK(r.rounds == 4 + 3 * (t + 1));
    CHECK(CoolNode::total_rounds(t) == 4 + 3 * (t + 1));
    for (const auto& [i, rep] : r.reports) {
      CHECK(rep.output == kW);
      CHECK(rep.bba_decision == 1);
      CHECK(rep.faults.empty());
    }
  }
}

TEST_CASE("all-distinct honest inputs: votes 0, output bottom after the BBA", "[cool]") {
  const auto p = CodeParams::make(7, 2, 64);
  std::map<NodeId, Value> in;
  for (NodeId i = 1; i <= 5; ++i) in[i] = Value::of(Bytes{static_cast<std::uint8_t>(i), 1, 2});
  auto nodes = cool_nodes(p, in);
  auto r = drive(nodes, [&](std::uint32_t round, const std::vector<Sent>&) {
    std::vector<Sent> out;
    if (round == 2) {
      for (NodeId c : {6U, 7U}) {
        for (NodeId j = 1; j <= 5; ++j) out.push_back({c, {j, Message{Tag::kSiPh1, 0, encode_bit(1)}}});
      }
    }
    return out;
  });
  for (const auto& [i, rep] : r.reports) {
    CHECK(rep.s1 == 0);
    CHECK(rep.vote == 0);
    CHECK(rep.output == Value::bottom());
    CHECK(r.finished_at[i] == 3 + 3 * 3);
  }
}

TEST_CASE("phase 3 calibrates an s = 0 node despite garbage CORRECT-SYMBOLs", "[cool]") {
  // Honest 1..4 hold w, honest 5 holds w2; corrupt 6 and 7 play along with
  // 1..4, announce SI-PH1 = 0 to node 5 and then feed it garbage.
  const auto p = CodeParams::make(7, 2, 64);
  std::map<NodeId, Value> in;
  for (NodeId i = 1; i <= 4; ++i) in[i] = kW;
  in[5] = kW2;
  auto nodes = cool_nodes(p, in);
  const auto cw = encode_value(p, kW);
  Rng rng(11);
  auto r = drive(nodes, [&](std::uint32_t round, const std::vector<Sent>&) {
    std::vector<Sent> out;
    for (NodeId c : {6U, 7U}) {
      for (NodeId j = 1; j <= 5; ++j) {
        if (round == 1) {
          const auto column = j == 5 ? garbage(p, 5, rng) : cw[j - 1];
          out.push_back({c, {j, Message{Tag::kSymbol, 0, encode_pair(column, cw[c - 1], p.c)}}});
        } else if (round == 2) {
          out.push_back({c, {j, Message{Tag::kSiPh1, 0, encode_bit(j == 5 ? 0 : 1)}}});
        } else if (round == CoolNode::total_rounds(2) && j == 5) {
          out.push_back({c, {j, Message{Tag::kCorrectSymbolCool, 0, encode_symbol(garbage(p, c, rng), p.c)}}});
        } else if (round >= 4 && round < CoolNode::total_rounds(2)) {
          const std::uint32_t phase = (round - 4) / 3 + 1;
          const std::uint32_t slot = (round - 4) % 3;
          const Tag tag = slot == 0 ? Tag::kBbaV1 : slot == 1 ? Tag::kBbaV2 : Tag::kBbaKing;
          out.push_back({c, {j, Message{tag, phase, Bytes{1}}}});
        }
      }
    }
    return out;
  });
  CHECK(r.reports[5].s1 == 0);
  for (const auto& [i, rep] : r.reports) {
    INFO("node " << i);
    CHECK(rep.bba_decision == 1);
    CHECK(rep.output == kW);
    CHECK(rep.faults.empty());
  }
}

TEST_CASE("COOL adversary sweep through the simulator", "[cool][netsim]") {
  using namespace ocior::netsim;
  for (auto adv : {Strategy::kSilent, Strategy::kRandomBytes, Strategy::kEquivocateSymbols, Strategy::kTwoGroupSplit,
                   Strategy::kSiFlip, Strategy::kScriptedRushing}) {
    for (auto inputs : {InputPattern::kUnanimous, InputPattern::kSplit, InputPattern::kDistinct}) {
      for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        Scenario sc;
        sc.protocol = Protocol::kCool;
        sc.n = 7;
        sc.t = 2;
        sc.l_bits = 96;
        sc.adversary = adv;
        sc.inputs = inputs;
        sc.seed = seed;
        const auto tr = run_checked(sc);
        INFO(to_string(adv) << " " << to_string(inputs) << " seed " << seed);
        for (const auto& v : tr.violations) UNSCOPED_INFO(v.property << ": " << v.detail);
        CHECK(tr.violations.empty());
        CHECK(tr.outputs.size() == 5);
      }
    }
  }
}
