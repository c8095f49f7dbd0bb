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

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ocior/common.hpp"
#include "ocior/rs.hpp"

namespace ocior::netsim {

enum class Protocol { kCool, kRbcBalanced, kRbcUnbalanced, kBua, kBba };
enum class InputPattern { kUnanimous, kSplit, kDistinct };
enum class Strategy {
  kNone,
  kSilent,
  kRandomBytes,
  kEquivocateSymbols,
  kTwoGroupSplit,
  kSiFlip,
  kScriptedRushing,
  kReadySpam,
  kDelayTargets,
  kScripted,
};
enum class LeaderMode { kHonest, kTwoFace, kSilentAfterHalf };
enum class Policy { kFifo, kSeededRandom, kAdversarialDelay, kExhaustiveSmall };

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

template <typename E, std::size_t N>
struct NameTable {
  std::pair<E, std::string_view> entries[N];

  std::string_view name(E e) const {
    for (const auto& [k, v] : entries) {
      if (k == e) return v;
    }
    return "?";
  }
  E parse(std::string_view s, std::string_view what) const {
    for (const auto& [k, v] : entries) {
      if (v == s) return k;
    }
    throw ConfigError("unknown " + std::string(what) + " '" + std::string(s) + "'");
  }
};

inline constexpr NameTable<Protocol, 5> kProtocols{{
    {Protocol::kCool, "cool"},
    {Protocol::kRbcBalanced, "rbc-balanced"},
    {Protocol::kRbcUnbalanced, "rbc-unbalanced"},
    {Protocol::kBua, "bua"},
    {Protocol::kBba, "bba"},
}};
inline constexpr NameTable<InputPattern, 3> kInputs{{
    {InputPattern::kUnanimous, "unanimous"},
    {InputPattern::kSplit, "split"},
    {InputPattern::kDistinct, "distinct"},
}};
inline constexpr NameTable<Strategy, 10> kStrategies{{
    {Strategy::kNone, "none"},
    {Strategy::kSilent, "silent"},
    {Strategy::kRandomBytes, "random-bytes"},
    {Strategy::kEquivocateSymbols, "equivocate-symbols"},
    {Strategy::kTwoGroupSplit, "two-group-split"},
    {Strategy::kSiFlip, "si-flip"},
    {Strategy::kScriptedRushing, "scripted-rushing"},
    {Strategy::kReadySpam, "ready-spam"},
    {Strategy::kDelayTargets, "delay-targets"},
    {Strategy::kScripted, "scripted"},
}};
inline constexpr NameTable<LeaderMode, 3> kLeaderModes{{
    {LeaderMode::kHonest, "honest"},
    {LeaderMode::kTwoFace, "two-face"},
    {LeaderMode::kSilentAfterHalf, "silent-after-half"},
}};
inline constexpr NameTable<Policy, 4> kPolicies{{
    {Policy::kFifo, "fifo"},
    {Policy::kSeededRandom, "seeded-random"},
    {Policy::kAdversarialDelay, "adversarial-delay"},
    {Policy::kExhaustiveSmall, "exhaustive-small"},
}};

}  // namespace detail

inline std::string_view to_string(Protocol p) { return detail::kProtocols.name(p); }
inline std::string_view to_string(InputPattern p) { return detail::kInputs.name(p); }
inline std::string_view to_string(Strategy s) { return detail::kStrategies.name(s); }
inline std::string_view to_string(LeaderMode m) { return detail::kLeaderModes.name(m); }
inline std::string_view to_string(Policy p) { return detail::kPolicies.name(p); }

inline Protocol parse_protocol(std::string_view s) { return detail::kProtocols.parse(s, "protocol"); }
inline InputPattern parse_inputs(std::string_view s) { return detail::kInputs.parse(s, "input pattern"); }
inline Strategy parse_strategy(std::string_view s) { return detail::kStrategies.parse(s, "adversary"); }
inline LeaderMode parse_leader_mode(std::string_view s) { return detail::kLeaderModes.parse(s, "leader mode"); }
inline Policy parse_policy(std::string_view s) { return detail::kPolicies.parse(s, "scheduler"); }

inline bool is_async(Protocol p) { return p == Protocol::kRbcBalanced || p == Protocol::kRbcUnbalanced; }

/// One fully specified execution.
struct Scenario {
  std::string name = "scenario";
  Protocol protocol = Protocol::kCool;
  std::size_t n = 4;
  std::size_t t = 1;
  std::size_t l_bits = 64;  // maximum framed message size in bits
  InputPattern inputs = InputPattern::kUnanimous;
  Strategy adversary = Strategy::kNone;
  std::optional<std::size_t> faults;  // |F|; defaults to t when adversary != none
  LeaderMode leader_mode = LeaderMode::kHonest;
  NodeId leader = 1;
  Policy scheduler = Policy::kFifo;
  std::uint64_t fairness = 8;
  std::uint64_t seed = 1;
  bool allow_subresilient = false;
  std::uint32_t round_cap = 0;  // 0: 10 * (4 + 3(t + 1))
  std::uint64_t step_cap = 1'000'000;
  bool calibrate_from_si2_senders = true;
  bool ready_zero_from_si2_zero = true;

  std::size_t fault_count() const {
    if (faults) return *faults;
    return adversary == Strategy::kNone && leader_mode == LeaderMode::kHonest ? 0 : t;
  }

  std::uint32_t effective_round_cap() const {
    return round_cap != 0 ? round_cap : static_cast<std::uint32_t>(10 * (4 + 3 * (t + 1)));
  }

  void validate() const {
    if (n < 1 || n > 65535) throw ConfigError("n out of range");
    if (l_bits < 1) throw ConfigError("l must be at least 1");
    if (!allow_subresilient && n < 3 * t + 1) {
      throw ConfigError("n = " + std::to_string(n) + " < 3t + 1 = " + std::to_string(3 * t + 1) +
                        " (use --allow-subresilient)");
    }
    if (fault_count() > t) throw ConfigError("|F| exceeds t");
    if (leader < 1 || leader > n) throw ConfigError("leader out of range");
    if (leader_mode != LeaderMode::kHonest && !is_async(protocol)) {
      throw ConfigError("leader modes apply to rbc only");
    }
    if (leader_mode != LeaderMode::kHonest && fault_count() == 0) {
      throw ConfigError("a faulty leader needs |F| >= 1");
    }
  }

  std::size_t message_bits() const { return std::max<std::size_t>(l_bits, framed_bits(1)); }

  CodeParams code_params() const { return CodeParams::make(n, t, message_bits()); }
};

/// Largest payload length whose frame fits in `bits`.
inline std::size_t payload_len_for(std::size_t bits) {
  std::size_t len = bits / 8;
  while (len > 1 && framed_bits(len) > bits) --len;
  return std::max<std::size_t>(len, 1);
}

inline Value random_value(Rng& rng, std::size_t len) {
  Bytes b = rng.bytes(len);
  return Value::of(std::move(b));
}

/// Derived randomness for one execution: corrupt set, inputs, group split.
struct Setup {
  std::set<NodeId> corrupt;
  std::map<NodeId, Value> inputs;  // per node (sync) or the leader's (async)
  std::set<NodeId> group_a, group_b;  // partition of honest nodes
  Value alt;  // a second value for equivocating faces
};

inline Setup make_setup(const Scenario& sc) {
  Rng rng(sc.seed * 0x9E3779B97F4A7C15ULL + 0x5EED);
  Setup s;
  const std::size_t f = sc.fault_count();
  std::vector<NodeId> pool;
  for (NodeId i = 1; i <= sc.n; ++i) pool.push_back(i);
  if (is_async(sc.protocol)) {
    pool.erase(std::remove(pool.begin(), pool.end(), sc.leader), pool.end());
    if (sc.leader_mode != LeaderMode::kHonest) s.corrupt.insert(sc.leader);
  }
  while (s.corrupt.size() < f && !pool.empty()) {
    const auto pick = rng.uniform(pool.size());
    s.corrupt.insert(pool[pick]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
  }

  const std::size_t len = payload_len_for(sc.message_bits());
  auto fresh = [&] {
    Bytes b = rng.bytes(len);
    if (sc.protocol == Protocol::kBba) b = Bytes{static_cast<std::uint8_t>(rng.coin())};
    return Value::of(std::move(b));
  };
  const Value w0 = fresh();
  Value w1 = fresh();
  if (w1 == w0) {
    Bytes b = w1.bytes();
    b[0] ^= sc.protocol == Protocol::kBba ? 1 : 0xFF;
    w1 = Value::of(std::move(b));
  }
  s.alt = w1;
  if (is_async(sc.protocol)) {
    s.inputs[sc.leader] = w0;
  } else {
    for (NodeId i = 1; i <= sc.n; ++i) {
      switch (sc.inputs) {
        case InputPattern::kUnanimous:
          s.inputs[i] = w0;
          break;
        case InputPattern::kSplit:
          s.inputs[i] = i <= (sc.n + 1) / 2 ? w0 : w1;
          break;
        case InputPattern::kDistinct:
          s.inputs[i] = fresh();
          break;
      }
    }
  }
  std::vector<NodeId> honest;
  for (NodeId i = 1; i <= sc.n; ++i) {
    if (!s.corrupt.contains(i)) honest.push_back(i);
  }
  for (std::size_t idx = 0; idx < honest.size(); ++idx) {
    (idx < (honest.size() + 1) / 2 ? s.group_a : s.group_b).insert(honest[idx]);
  }
  return s;
}

}  // namespace ocior::netsim
