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

// Message tags, payload codecs and the node-facing interfaces shared by every
// protocol state machine.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ocior/common.hpp"
#include "ocior/rs.hpp"

namespace ocior {

enum class Tag : std::uint8_t {
  kSymbol,
  kSiPh1,
  kSiPh2,
  kBbaV1,
  kBbaV2,
  kBbaKing,
  kCorrectSymbolCool,
  kLeader,
  kLeaderFull,
  kInitial,
  kSi1,
  kSi2,
  kReady,
  kCorrectSymbol,
};

inline constexpr std::array<std::pair<Tag, std::string_view>, 14> kTagNames{{
    {Tag::kSymbol, "SYMBOL"},
    {Tag::kSiPh1, "SI-PH1"},
    {Tag::kSiPh2, "SI-PH2"},
    {Tag::kBbaV1, "BBA-V1"},
    {Tag::kBbaV2, "BBA-V2"},
    {Tag::kBbaKing, "BBA-KING"},
    {Tag::kCorrectSymbolCool, "CORRECT-SYMBOL"},
    {Tag::kLeader, "LEADER"},
    {Tag::kLeaderFull, "LEADER-FULL"},
    {Tag::kInitial, "INITIAL"},
    {Tag::kSi1, "SI1"},
    {Tag::kSi2, "SI2"},
    {Tag::kReady, "READY"},
    {Tag::kCorrectSymbol, "CORRECTSYMBOL"},
}};

inline std::string_view tag_name(Tag tag) {
  for (const auto& [t, name] : kTagNames) {
    if (t == tag) return name;
  }
  return "?";
}

inline std::optional<Tag> tag_from_name(std::string_view name) {
  for (const auto& [t, n] : kTagNames) {
    if (n == name) return t;
  }
  return std::nullopt;
}

/// True for tags whose payload is a single indicator bit.
inline bool is_bit_tag(Tag tag) {
  switch (tag) {
    case Tag::kSiPh1:
    case Tag::kSiPh2:
    case Tag::kBbaV1:
    case Tag::kBbaKing:
    case Tag::kSi1:
    case Tag::kSi2:
    case Tag::kReady:
      return true;
    default:
      return false;
  }
}

/// True for tags whose payload is one or two coded symbols.
inline bool is_symbol_tag(Tag tag) {
  switch (tag) {
    case Tag::kSymbol:
    case Tag::kCorrectSymbolCool:
    case Tag::kLeader:
    case Tag::kInitial:
    case Tag::kCorrectSymbol:
      return true;
    default:
      return false;
  }
}

struct Message {
  Tag tag = Tag::kSymbol;
  std::uint32_t phase = 0;  // phase-king phase; zero elsewhere
  Bytes payload;

  friend bool operator==(const Message&, const Message&) = default;
};

struct Outgoing {
  NodeId to = 0;
  Message msg;
};

struct Delivery {
  NodeId from = 0;
  Message msg;
};

inline std::vector<Outgoing> to_all(std::size_t n, const Message& msg) {
  std::vector<Outgoing> out;
  out.reserve(n);
  for (NodeId j = 1; j <= n; ++j) out.push_back({j, msg});
  return out;
}

// ---------------------------------------------------------------------------
// Payload codecs. Decoders return nullopt on any malformed input.

inline Bytes encode_bit(int bit) { return Bytes{static_cast<std::uint8_t>(bit != 0)}; }

inline std::optional<int> decode_bit(const Bytes& payload) {
  if (payload.size() != 1 || payload[0] > 1) return std::nullopt;
  return payload[0];
}

// Phase-king second-round proposal: 0, 1, or no proposal.
inline constexpr std::uint8_t kNoProposal = 2;

inline std::optional<std::uint8_t> decode_proposal(const Bytes& payload) {
  if (payload.size() != 1 || payload[0] > kNoProposal) return std::nullopt;
  return payload[0];
}

inline Bytes encode_symbol(const CodedSymbol& s, unsigned c) { return serialize_symbol(s, c); }

inline std::optional<CodedSymbol> decode_symbol(const CodeParams& p, const Bytes& payload) {
  auto s = parse_symbol(payload, p.c);
  if (!s || !well_formed(p, *s)) return std::nullopt;
  return s;
}

/// SYMBOL payload sent by i to j: (y_j^(i), y_i^(i)).
inline Bytes encode_pair(const CodedSymbol& column, const CodedSymbol& diag, unsigned c) {
  Bytes out;
  serialize_symbol(out, column, c);
  serialize_symbol(out, diag, c);
  return out;
}

inline std::optional<std::pair<CodedSymbol, CodedSymbol>> decode_pair(const CodeParams& p,
                                                                      const Bytes& payload) {
  std::size_t pos = 0;
  auto a = parse_symbol(payload, pos, p.c);
  if (!a) return std::nullopt;
  auto b = parse_symbol(payload, pos, p.c);
  if (!b || pos != payload.size()) return std::nullopt;
  if (!well_formed(p, *a) || !well_formed(p, *b)) return std::nullopt;
  return std::make_pair(std::move(*a), std::move(*b));
}

inline std::optional<Value> decode_full(const Bytes& payload) {
  if (payload.size() == 1 && payload[0] == 0) return Value::bottom();
  std::size_t pos = 0;
  auto len = get_varint(payload, pos);
  if (!len || *len == 0 || payload.size() - pos != *len - 1) return std::nullopt;
  return Value::of(Bytes(payload.begin() + static_cast<std::ptrdiff_t>(pos), payload.end()));
}

/// Protocol content bits carried by an honest message: one coded symbol is
/// lane_count * c bits, an indicator is one bit, a phase-king proposal two.
inline std::uint64_t content_bits(const CodeParams& p, const Message& m) {
  const std::uint64_t sym = p.wire_symbol_bits();
  switch (m.tag) {
    case Tag::kSymbol:
      return 2 * sym;
    case Tag::kCorrectSymbolCool:
    case Tag::kLeader:
    case Tag::kInitial:
    case Tag::kCorrectSymbol:
      return sym;
    case Tag::kBbaV2:
      return 2;
    case Tag::kLeaderFull:
      return 8 * static_cast<std::uint64_t>(m.payload.size());
    default:
      return 1;
  }
}

// ---------------------------------------------------------------------------
// Observable per-node facts the invariant checker consumes.

struct NodeReport {
  std::optional<Value> input;  // initial value (COOL input or RBC phase-1 value)
  std::optional<Value> output;

  std::optional<int> s1, s2, vote;  // success indicators and BUA vote
  std::optional<Value> bua_value;   // w^(i) after phase 2
  std::vector<std::uint8_t> links;  // u_i(1..n) after phase 1

  std::optional<int> bba_decision;
  std::vector<int> bba_estimates;  // estimate entering each phase, then final

  std::optional<int> ready_bit, v_out;
  std::size_t oec_trials = 0, oec_final_trials = 0;

  std::vector<std::string> faults;  // invariant violations raised internally
};

/// Lock-step node. `end_round(r, inbox)` consumes every message sent in
/// round r and returns the node's messages for round r + 1.
class SyncNode {
 public:
  virtual ~SyncNode() = default;
  virtual std::vector<Outgoing> start() = 0;
  virtual std::vector<Outgoing> end_round(std::uint32_t round, const std::vector<Delivery>& inbox) = 0;
  virtual bool terminated() const = 0;
  virtual const NodeReport& report() const = 0;
};

/// Event-driven node for the asynchronous engine.
class AsyncNode {
 public:
  virtual ~AsyncNode() = default;
  virtual std::vector<Outgoing> start() = 0;
  virtual std::vector<Outgoing> receive(const Delivery& d) = 0;
  virtual bool terminated() const = 0;
  virtual const NodeReport& report() const = 0;
};

}  // namespace ocior
