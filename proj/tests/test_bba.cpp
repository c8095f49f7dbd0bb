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

#include "ocior/binary_ba.hpp"
#include "sync_driver.hpp"

using namespace ocior;
using test::drive;
using test::Sent;

namespace {

std::map<NodeId, std::unique_ptr<SyncNode>> bba_nodes(std::size_t n, std::size_t t, const std::vector<NodeId>& honest,
                                                      const std::function<int(NodeId)>& vote) {
  std::map<NodeId, std::unique_ptr<SyncNode>> nodes;
  for (NodeId i : honest) nodes[i] = std::make_unique<BbaNode>(i, n, t, vote(i));
  return nodes;
}

std::vector<NodeId> range(NodeId lo, NodeId hi) {
  std::vector<NodeId> v;
  for (NodeId i = lo; i <= hi; ++i) v.push_back(i);
  return v;
}

std::set<int> decisions(const test::DriveResult& r) {
  std::set<int> out;
  for (const auto& [i, rep] : r.reports) out.insert(rep.bba_decision.value_or(-1));
  return out;
}

// Corrupt traffic for one phase-king round, indexed by the round's position
// in the phase and by honest recipient: 0/1 = that bit, 2 = no proposal
// (V2 only), 3 = silent.
struct PhaseChoice {
  std::array<int, 3> v1{}, v2{}, king{};
};

std::vector<Sent> scripted_round(NodeId corrupt, std::uint32_t round, std::uint32_t target_phase,
                                 const PhaseChoice& c, const std::vector<NodeId>& honest, Rng& rng) {
  const std::uint32_t phase = (round - 1) / 3 + 1;
  const std::uint32_t slot = (round - 1) % 3;
  std::vector<Sent> out;
  for (std::size_t h = 0; h < honest.size(); ++h) {
    int choice = 0;
    if (phase == target_phase) {
      choice = slot == 0 ? c.v1[h] : slot == 1 ? c.v2[h] : c.king[h];
    } else {
      choice = static_cast<int>(rng.uniform(slot == 1 ? 4 : 3));
      if (slot != 1 && choice == 2) choice = 3;
    }
    if (choice == 3) continue;
    if (slot == 2 && corrupt != phase) continue;
    const Tag tag = slot == 0 ? Tag::kBbaV1 : slot == 1 ? Tag::kBbaV2 : Tag::kBbaKing;
    out.push_back({corrupt, {honest[h], Message{tag, phase, Bytes{static_cast<std::uint8_t>(choice)}}}});
  }
  return out;
}

}  // namespace

TEST_CASE("unanimous votes decide that bit in exactly 3(t+1) rounds", "[bba]") {
  for (std::size_t n : {1U, 4U, 7U, 10U, 13U}) {
    const std::size_t t = (n - 1) / 3;
    for (int b : {0, 1}) {
      auto nodes = bba_nodes(n, t, range(1, static_cast<NodeId>(n)), [&](NodeId) { return b; });
      auto r = drive(nodes, nullptr);
      INFO("n=" << n << " b=" << b);
      CHECK(decisions(r) == std::set<int>{b});
      CHECK(r.rounds == PhaseKing::total_rounds(t));
      for (const auto& [i, at] : r.finished_at) CHECK(at == 3 * (t + 1));
    }
  }
}

TEST_CASE("all-0 honest votes against every phase-1 message choice of a corrupt king", "[bba][exhaustive]") {
  // n = 4, t = 1. The corrupt node is the phase-1 king (node 1) or the
  // phase-2 king (node 2); every combination of its V1, V2 and KING messages
  // in the phase it rules is tried, the other phase is randomized.
  for (NodeId corrupt : {1U, 2U}) {
    std::vector<NodeId> honest;
    for (NodeId i = 1; i <= 4; ++i) {
      if (i != corrupt) honest.push_back(i);
    }
    const std::uint32_t target_phase = corrupt;
    std::size_t runs = 0;
    for (int a = 0; a < 27; ++a) {
      for (int b = 0; b < 64; ++b) {
        for (int k = 0; k < 27; ++k) {
          PhaseChoice c;
          for (int h = 0, x = a, y = b, z = k; h < 3; ++h, x /= 3, y /= 4, z /= 3) {
            c.v1[h] = x % 3 == 2 ? 3 : x % 3;
            c.v2[h] = y % 4;
            c.king[h] = z % 3 == 2 ? 3 : z % 3;
          }
          Rng rng(static_cast<std::uint64_t>(a * 10007 + b * 101 + k));
          auto nodes = bba_nodes(4, 1, honest, [](NodeId) { return 0; });
          auto r = drive(nodes, [&](std::uint32_t round, const std::vector<Sent>&) {
            return scripted_round(corrupt, round, target_phase, c, honest, rng);
          });
          if (decisions(r) != std::set<int>{0}) {
            FAIL("corrupt=" << corrupt << " a=" << a << " b=" << b << " k=" << k);
          }
          ++runs;
        }
      }
    }
    CHECK(runs == 27 * 64 * 27);
  }
}

TEST_CASE("mixed votes with equivocating corrupt kings still agree", "[bba]") {
  for (std::uint64_t seed = 1; seed <= 300; ++seed) {
    const std::size_t n = 7, t = 2;
    Rng rng(seed);
    std::vector<NodeId> honest = range(3, 7);  // nodes 1 and 2 are corrupt kings
    std::map<NodeId, int> votes;
    for (NodeId i : honest) votes[i] = static_cast<int>(rng.coin());
    auto nodes = bba_nodes(n, t, honest, [&](NodeId i) { return votes[i]; });
    auto r = drive(nodes, [&](std::uint32_t round, const std::vector<Sent>&) {
      std::vector<Sent> out;
      const std::uint32_t phase = (round - 1) / 3 + 1;
      const std::uint32_t slot = (round - 1) % 3;
      for (NodeId c : {1U, 2U}) {
        for (NodeId j = 1; j <= n; ++j) {
          const Tag tag = slot == 0 ? Tag::kBbaV1 : slot == 1 ? Tag::kBbaV2 : Tag::kBbaKing;
          if (slot == 2 && c != phase) continue;
          const auto v = static_cast<std::uint8_t>(rng.uniform(slot == 1 ? 3 : 2));
          out.push_back({c, {j, Message{tag, phase, Bytes{v}}}});
        }
      }
      return out;
    });
    INFO("seed " << seed);
    REQUIRE(decisions(r).size() == 1);
    std::set<int> vs;
    for (auto& [i, v] : votes) vs.insert(v);
    if (vs.size() == 1) CHECK(decisions(r) == vs);
  }
}

TEST_CASE("estimates persist once the honest nodes agree", "[bba]") {
  const std::size_t n = 7, t = 2;
  auto honest = range(3, 7);
  auto nodes = bba_nodes(n, t, honest, [](NodeId) { return 1; });
  Rng rng(5);
  auto r = drive(nodes, [&](std::uint32_t round, const std::vector<Sent>&) {
    std::vector<Sent> out;
    const std::uint32_t phase = (round - 1) / 3 + 1;
    const std::uint32_t slot = (round - 1) % 3;
    for (NodeId c : {1U, 2U}) {
      if (slot == 2 && c != phase) continue;
      const Tag tag = slot == 0 ? Tag::kBbaV1 : slot == 1 ? Tag::kBbaV2 : Tag::kBbaKing;
      for (NodeId j : honest) out.push_back({c, {j, Message{tag, phase, Bytes{0}}}});
    }
    return out;
  });
  for (const auto& [i, rep] : r.reports) {
    REQUIRE(rep.bba_estimates.size() == t + 2);
    for (int e : rep.bba_estimates) CHECK(e == 1);
  }
}

TEST_CASE("phase-king local rules", "[bba]") {
  SECTION("n - t matching V1 messages produce a proposal, fewer do not") {
    PhaseKing pk(4, 4, 1, 0);
    pk.start();
    std::vector<Delivery> in;
    for (NodeId j = 1; j <= 3; ++j) in.push_back({j, Message{Tag::kBbaV1, 1, encode_bit(1)}});
    auto out = pk.step(1, in);
    REQUIRE(out.size() == 4);
    CHECK(out[0].msg.tag == Tag::kBbaV2);
    CHECK(out[0].msg.payload == Bytes{1});

    PhaseKing pk2(4, 4, 1, 0);
    pk2.start();
    in.pop_back();
    CHECK(pk2.step(1, in)[0].msg.payload == Bytes{kNoProposal});
  }
  SECTION("duplicates, wrong phase and malformed payloads are ignored") {
    PhaseKing pk(4, 4, 1, 0);
    pk.start();
    std::vector<Delivery> in;
    for (int k = 0; k < 3; ++k) in.push_back({1, Message{Tag::kBbaV1, 1, encode_bit(1)}});
    in.push_back({2, Message{Tag::kBbaV1, 2, encode_bit(1)}});
    in.push_back({3, Message{Tag::kBbaV1, 1, Bytes{1, 1}}});
    CHECK(pk.step(1, in)[0].msg.payload == Bytes{kNoProposal});
  }
  SECTION("a missing king message keeps the node's own estimate") {
    PhaseKing pk(4, 4, 1, 1);
    pk.start();
    pk.step(1, {});
    pk.step(2, {});
    pk.step(3, {});
    CHECK(pk.estimate() == 1);
  }
  SECTION("the king's bit is taken when support is below n - t") {
    PhaseKing pk(4, 4, 1, 1);
    pk.start();
    pk.step(1, {});
    pk.step(2, {});
    pk.step(3, {{1, Message{Tag::kBbaKing, 1, encode_bit(0)}}});
    CHECK(pk.estimate() == 0);
  }
  SECTION("strong support ignores the king") {
    PhaseKing pk(4, 4, 1, 1);
    pk.start();
    pk.step(1, {});
    std::vector<Delivery> v2;
    for (NodeId j = 1; j <= 3; ++j) v2.push_back({j, Message{Tag::kBbaV2, 1, Bytes{1}}});
    pk.step(2, v2);
    pk.step(3, {{1, Message{Tag::kBbaKing, 1, encode_bit(0)}}});
    CHECK(pk.estimate() == 1);
  }
}
