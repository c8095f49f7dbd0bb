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

#include "ocior/netsim/explorer.hpp"
#include "ocior/netsim/replay.hpp"

using namespace ocior;
using namespace ocior::netsim;

namespace {

Scenario make(Protocol protocol, std::size_t n, Strategy adv = Strategy::kNone, std::uint64_t seed = 1) {
  Scenario sc;
  sc.protocol = protocol;
  sc.n = n;
  sc.t = (n - 1) / 3;
  sc.l_bits = 256;
  sc.adversary = adv;
  sc.seed = seed;
  return sc;
}

// Largest number of later-sent envelopes delivered before an honest-to-honest
// envelope, recomputed naively.
std::uint64_t max_overtakes(const Trace& tr) {
  std::vector<const EnvelopeRecord*> order;
  for (const auto& e : tr.envelopes) {
    if (e.delivered) order.push_back(&e);
  }
  std::sort(order.begin(), order.end(), [](auto* a, auto* b) { return *a->delivered < *b->delivered; });
  std::uint64_t worst = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& e = *order[i];
    if (e.adv || !tr.honest(e.to)) continue;
    std::uint64_t overtakes = 0;
    for (std::size_t j = 0; j < i; ++j) overtakes += order[j]->seq > e.seq;
    worst = std::max(worst, overtakes);
  }
  return worst;
}

}  // namespace

TEST_CASE("setup derivation", "[netsim]") {
  SECTION("corrupt set size and leader placement") {
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
      auto sc = make(Protocol::kRbcBalanced, 10, Strategy::kSilent, seed);
      sc.leader = 4;
      auto s = make_setup(sc);
      CHECK(s.corrupt.size() == 3);
      CHECK_FALSE(s.corrupt.contains(4));
      sc.leader_mode = LeaderMode::kTwoFace;
      s = make_setup(sc);
      CHECK(s.corrupt.size() == 3);
      CHECK(s.corrupt.contains(4));
    }
  }
  SECTION("input patterns") {
    auto sc = make(Protocol::kCool, 7);
    auto s = make_setup(sc);
    std::set<Value> values;
    for (const auto& [i, v] : s.inputs) values.insert(v);
    CHECK(values.size() == 1);
    sc.inputs = InputPattern::kDistinct;
    s = make_setup(sc);
    values.clear();
    for (const auto& [i, v] : s.inputs) values.insert(v);
    CHECK(values.size() == 7);
    sc.inputs = InputPattern::kSplit;
    s = make_setup(sc);
    values.clear();
    for (const auto& [i, v] : s.inputs) values.insert(v);
    CHECK(values.size() == 2);
  }
  SECTION("fault count defaults") {
    auto sc = make(Protocol::kCool, 7);
    CHECK(sc.fault_count() == 0);
    sc.adversary = Strategy::kSilent;
    CHECK(sc.fault_count() == 2);
    sc.faults = 1;
    CHECK(sc.fault_count() == 1);
    sc.faults = 3;
    CHECK_THROWS_AS(sc.validate(), ConfigError);
  }
  SECTION("validation") {
    auto sc = make(Protocol::kCool, 6);
    sc.t = 2;
    CHECK_THROWS_AS(sc.validate(), ConfigError);
    sc.allow_subresilient = true;
    CHECK_NOTHROW(sc.validate());
    sc = make(Protocol::kCool, 4);
    sc.leader_mode = LeaderMode::kTwoFace;
    CHECK_THROWS_AS(sc.validate(), ConfigError);
    sc = make(Protocol::kRbcBalanced, 4);
    sc.leader = 5;
    CHECK_THROWS_AS(sc.validate(), ConfigError);
  }
}

TEST_CASE("executions are deterministic in the seed", "[netsim]") {
  for (auto protocol : {Protocol::kCool, Protocol::kRbcBalanced, Protocol::kRbcUnbalanced, Protocol::kBua, Protocol::kBba}) {
    for (auto adv : {Strategy::kRandomBytes, Strategy::kTwoGroupSplit}) {
      auto sc = make(protocol, 7, adv, 9);
      sc.inputs = InputPattern::kSplit;
      if (is_async(protocol)) sc.scheduler = Policy::kSeededRandom;
      const auto a = trace_to_string(run_checked(sc));
      const auto b = trace_to_string(run_checked(sc));
      CHECK(a == b);
      sc.seed = 10;
      CHECK(trace_to_string(run_checked(sc)) != a);
    }
  }
}

TEST_CASE("sync engine: rounds, rushing and metrics", "[netsim][sync]") {
  auto sc = make(Protocol::kCool, 4);
  const auto tr = run_checked(sc);
  CHECK(tr.violations.empty());
  CHECK(tr.metrics.rounds == 10);
  CHECK(tr.steps == 10);
  for (const auto& [i, o] : tr.outputs) CHECK(o.at == 10);

  std::uint64_t sum = 0;
  for (const auto& [i, b] : tr.metrics.bits_by_node) sum += b;
  CHECK(sum == tr.metrics.total_bits);
  std::uint64_t by_tag = 0;
  for (const auto& [tag, b] : tr.metrics.bits_by_tag) by_tag += b;
  CHECK(by_tag == tr.metrics.total_bits);
  CHECK(tr.metrics.envelopes == tr.envelopes.size());
  for (const auto& e : tr.envelopes) {
    CHECK(e.delivered == std::optional<std::uint64_t>(e.round));
    CHECK(e.bits == content_bits(sc.code_params(), e.msg));
  }

  SECTION("corrupt traffic carries no bits and silent adversaries send nothing") {
    auto sc2 = make(Protocol::kCool, 7, Strategy::kRandomBytes, 3);
    const auto tr2 = run_checked(sc2);
    bool any_adv = false;
    for (const auto& e : tr2.envelopes) {
      if (!e.adv) continue;
      any_adv = true;
      CHECK(e.bits == 0);
      CHECK(tr2.corrupt.contains(e.from));
    }
    CHECK(any_adv);
    for (NodeId c : tr2.corrupt) CHECK_FALSE(tr2.metrics.bits_by_node.contains(c));
    sc2.adversary = Strategy::kSilent;
    const auto tr3 = run_checked(sc2);
    CHECK(std::none_of(tr3.envelopes.begin(), tr3.envelopes.end(), [](const auto& e) { return e.adv; }));
    CHECK(tr3.violations.empty());
  }
  SECTION("round cap is a liveness failure") {
    auto sc2 = make(Protocol::kCool, 4);
    sc2.round_cap = 5;
    const auto tr2 = run_checked(sc2);
    CHECK(tr2.cap_hit);
    CHECK(outcome(tr2) == "liveness-failure");
  }
}

TEST_CASE("async engine: causal depth and delivery", "[netsim][async]") {
  for (auto [protocol, depth] : {std::pair{Protocol::kRbcBalanced, 6ULL}, std::pair{Protocol::kRbcUnbalanced, 5ULL}}) {
    for (std::size_t n : {4U, 7U, 10U}) {
      auto sc = make(protocol, n);
      const auto tr = run_checked(sc);
      INFO(to_string(protocol) << " n = " << n);
      CHECK(tr.violations.empty());
      CHECK(tr.outputs.size() == n);
      CHECK(tr.metrics.depth == depth);
      CHECK(tr.metrics.leader_bits == tr.metrics.bits_by_node.at(1));
    }
  }
  SECTION("fifo delivers in send order") {
    const auto tr = run_checked(make(Protocol::kRbcBalanced, 7));
    std::uint64_t last = 0;
    std::vector<const EnvelopeRecord*> order;
    for (const auto& e : tr.envelopes) {
      if (e.delivered) order.push_back(&e);
    }
    std::sort(order.begin(), order.end(), [](auto* a, auto* b) { return *a->delivered < *b->delivered; });
    for (std::size_t i = 1; i < order.size(); ++i) CHECK(order[i - 1]->seq < order[i]->seq);
    for (const auto* e : order) last = std::max(last, *e->delivered);
    CHECK(last == tr.steps);
  }
  SECTION("step cap is a liveness failure") {
    auto sc = make(Protocol::kRbcBalanced, 7);
    sc.step_cap = 20;
    const auto tr = run_checked(sc);
    CHECK(tr.cap_hit);
    CHECK(outcome(tr) == "liveness-failure");
  }
}

TEST_CASE("fairness bound holds under every scheduler", "[netsim][async]") {
  for (auto policy : {Policy::kSeededRandom, Policy::kAdversarialDelay}) {
    for (std::uint64_t b : {1ULL, 2ULL, 8ULL, 64ULL}) {
      for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        auto sc = make(Protocol::kRbcBalanced, 7, Strategy::kDelayTargets, seed);
        sc.scheduler = policy;
        sc.fairness = b;
        const auto tr = run_checked(sc);
        INFO(to_string(policy) << " B = " << b << " seed " << seed);
        CHECK(max_overtakes(tr) <= b);
        CHECK(tr.violations.empty());
        CHECK(tr.outputs.size() == tr.honest_nodes().size());
      }
    }
  }
}

TEST_CASE("the adversarial-delay scheduler actually reorders", "[netsim][async]") {
  auto sc = make(Protocol::kRbcBalanced, 7, Strategy::kDelayTargets);
  sc.scheduler = Policy::kAdversarialDelay;
  sc.fairness = 64;
  const auto tr = run_checked(sc);
  CHECK(max_overtakes(tr) > 8);
  CHECK(tr.violations.empty());
}

TEST_CASE("Fenwick prefix counts", "[netsim]") {
  Fenwick f;
  Rng rng(5);
  std::set<std::size_t> marked;
  for (int i = 0; i < 500; ++i) {
    const auto x = static_cast<std::size_t>(rng.uniform(3000));
    if (marked.insert(x).second) f.add(x);
    const auto q = static_cast<std::size_t>(rng.uniform(3500));
    const auto expected = static_cast<std::uint64_t>(std::distance(marked.begin(), marked.upper_bound(q)));
    REQUIRE(f.prefix(q) == expected);
  }
}

TEST_CASE("PrefixChoices enumerates every choice sequence once", "[netsim][explorer]") {
  std::set<std::vector<std::size_t>> seen;
  const auto stats = explore([&](ChoiceSource& c) {
    std::vector<std::size_t> path;
    path.push_back(c.choose(3, false));
    if (path[0] == 1) path.push_back(c.choose(2, true));
    path.push_back(c.choose(2, false));
    CHECK(seen.insert(path).second);
    return path[0] != 2;
  });
  CHECK(stats.runs == 8);
  CHECK(seen.size() == 8);
  CHECK(stats.violating == 2);
  CHECK(explore([](ChoiceSource& c) { return c.choose(4, true) < 4; }, 3).runs == 3);
}

TEST_CASE("exhaustive-small scheduler explores distinct interleavings", "[netsim][explorer]") {
  auto sc = make(Protocol::kRbcUnbalanced, 4);
  sc.l_bits = 64;
  sc.scheduler = Policy::kExhaustiveSmall;
  std::set<std::string> traces;
  const auto stats = explore(
      [&](ChoiceSource& c) {
        const auto tr = run_checked(sc, &c);
        traces.insert(trace_to_string(tr));
        return tr.violations.empty();
      },
      10'000);
  CHECK(stats.runs > 1);
  CHECK(stats.runs < 10'000);
  CHECK(stats.violating == 0);
  CHECK(traces.size() == stats.runs);
}

TEST_CASE("every adversary strategy runs clean on every protocol", "[netsim]") {
  for (auto protocol : {Protocol::kCool, Protocol::kBua, Protocol::kBba, Protocol::kRbcBalanced,
                        Protocol::kRbcUnbalanced}) {
    for (auto adv : {Strategy::kNone, Strategy::kSilent, Strategy::kRandomBytes, Strategy::kEquivocateSymbols,
                     Strategy::kTwoGroupSplit, Strategy::kSiFlip, Strategy::kScriptedRushing, Strategy::kReadySpam,
                     Strategy::kDelayTargets, Strategy::kScripted}) {
      for (std::size_t n : {4U, 10U}) {
        auto sc = make(protocol, n, adv, n);
        sc.inputs = InputPattern::kSplit;
        const auto tr = run_checked(sc);
        INFO(to_string(protocol) << " " << to_string(adv) << " n = " << n);
        for (const auto& v : tr.violations) UNSCOPED_INFO(v.property << ": " << v.detail);
        CHECK(tr.violations.empty());
      }
    }
  }
}
