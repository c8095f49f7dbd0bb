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

// Byzantine behaviour library.
//
// Every corrupt node runs one or two shadow copies of the honest protocol
// ("faces"). Face 0 holds the node's own input; face 1 holds a second value so
// that equivocating strategies can show each honest group a self-consistent
// but different story. A strategy turns the faces' outboxes into the
// messages actually sent. Honest nodes are split into groups A and B; group
// A (and every corrupt node) is shown face 0.

#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "ocior/binary_ba.hpp"
#include "ocior/bua.hpp"
#include "ocior/cool.hpp"
#include "ocior/netsim/scenario.hpp"
#include "ocior/netsim/trace.hpp"
#include "ocior/rbc.hpp"

namespace ocior::netsim {

using Emission = std::pair<NodeId, Outgoing>;  // (sender, message)

/// Source of nondeterministic choices for exhaustive exploration. `schedule`
/// distinguishes delivery-order choices from adversary message choices.
class ChoiceSource {
 public:
  virtual ~ChoiceSource() = default;
  virtual std::size_t choose(std::size_t options, bool schedule) = 0;
};

class SyncAdversary {
 public:
  virtual ~SyncAdversary() = default;
  /// Corrupt nodes' round-r messages, chosen after seeing all honest
  /// round-r traffic (rushing).
  virtual std::vector<Emission> emit(std::uint32_t round, const std::vector<EnvelopeRecord>& honest_round) = 0;
  virtual void deliver(std::uint32_t round, NodeId node, const std::vector<Delivery>& inbox) = 0;
};

class AsyncAdversary {
 public:
  virtual ~AsyncAdversary() = default;
  virtual std::vector<Emission> start() = 0;
  virtual std::vector<Outgoing> deliver(std::uint64_t step, NodeId node, const Delivery& d) = 0;
};

inline std::unique_ptr<SyncNode> make_sync_node(Protocol protocol, NodeId id, const CodeParams& p,
                                                const Value& input) {
  switch (protocol) {
    case Protocol::kCool:
      return std::make_unique<CoolNode>(id, p, input);
    case Protocol::kBua:
      return std::make_unique<BuaNode>(id, p, input);
    case Protocol::kBba:
      return std::make_unique<BbaNode>(id, p.n, p.t, input.bytes().at(0) & 1);
    default:
      throw std::logic_error("not a synchronous protocol");
  }
}

inline RbcOptions rbc_options(const Scenario& sc) {
  RbcOptions o;
  o.variant = sc.protocol == Protocol::kRbcUnbalanced ? RbcVariant::kUnbalanced : RbcVariant::kBalanced;
  o.calibrate_from_si2_senders = sc.calibrate_from_si2_senders;
  o.ready_zero_from_si2_zero = sc.ready_zero_from_si2_zero;
  return o;
}

class Byzantine final : public SyncAdversary, public AsyncAdversary {
 public:
  Byzantine(const Scenario& sc, const Setup& setup, CodeParams p, ChoiceSource* choices = nullptr)
      : sc_(sc), setup_(setup), p_(std::move(p)), rng_(sc.seed ^ 0xAD5E5A11ULL), choices_(choices) {
    const std::size_t nfaces = two_faced() ? 2 : 1;
    for (NodeId c : setup_.corrupt) {
      Corrupt& cn = nodes_[c];
      for (std::size_t f = 0; f < nfaces; ++f) {
        if (is_async(sc_.protocol)) {
          RbcOptions o = rbc_options(sc_);
          std::optional<Value> leader_input;
          if (c == sc_.leader) leader_input = f == 0 ? setup_.inputs.at(sc_.leader) : setup_.alt;
          if (f == 1) o.value_override = setup_.alt;
          cn.async_faces.push_back(std::make_unique<RbcNode>(c, sc_.leader, p_, o, leader_input));
        } else {
          cn.sync_faces.push_back(make_sync_node(sc_.protocol, c, p_, face_input(c, f)));
        }
      }
    }
  }

  // -- synchronous ----------------------------------------------------------

  std::vector<Emission> emit(std::uint32_t round, const std::vector<EnvelopeRecord>& honest_round) override {
    std::vector<Emission> out;
    for (auto& [c, cn] : nodes_) {
      std::vector<std::vector<Outgoing>> faces;
      for (std::size_t f = 0; f < cn.sync_faces.size(); ++f) {
        if (round == 1) {
          faces.push_back(cn.sync_faces[f]->start());
        } else {
          faces.push_back(std::move(cn.next[f]));
        }
      }
      for (auto& m : transform(c, cn, std::move(faces), &honest_round, round)) out.emplace_back(c, std::move(m));
    }
    return out;
  }

  void deliver(std::uint32_t round, NodeId node, const std::vector<Delivery>& inbox) override {
    auto& cn = nodes_.at(node);
    cn.next.resize(cn.sync_faces.size());
    for (std::size_t f = 0; f < cn.sync_faces.size(); ++f) {
      cn.next[f] = cn.sync_faces[f]->terminated() ? std::vector<Outgoing>{}
                                                  : cn.sync_faces[f]->end_round(round, inbox);
    }
  }

  // -- asynchronous ---------------------------------------------------------

  std::vector<Emission> start() override {
    std::vector<Emission> out;
    for (auto& [c, cn] : nodes_) {
      std::vector<std::vector<Outgoing>> faces;
      for (auto& face : cn.async_faces) faces.push_back(face->start());
      for (auto& m : transform(c, cn, std::move(faces), nullptr, 0)) out.emplace_back(c, std::move(m));
      cn.started = true;
    }
    return out;
  }

  std::vector<Outgoing> deliver(std::uint64_t, NodeId node, const Delivery& d) override {
    auto& cn = nodes_.at(node);
    std::vector<std::vector<Outgoing>> faces;
    for (auto& face : cn.async_faces) faces.push_back(face->receive(d));
    return transform(node, cn, std::move(faces), nullptr, 0);
  }

 private:
  struct Corrupt {
    std::vector<std::unique_ptr<SyncNode>> sync_faces;
    std::vector<std::unique_ptr<RbcNode>> async_faces;
    std::vector<std::vector<Outgoing>> next;
    bool started = false;
    bool crashed = false;
    bool spammed = false;
    std::map<Tag, std::size_t> script;
  };

  bool two_faced() const {
    switch (sc_.adversary) {
      case Strategy::kEquivocateSymbols:
      case Strategy::kTwoGroupSplit:
      case Strategy::kScriptedRushing:
      case Strategy::kScripted:
        return true;
      default:
        return sc_.leader_mode == LeaderMode::kTwoFace;
    }
  }

  // Face 0 shows group A the value most of group A holds; face 1 shows group
  // B its own majority value (or the alternative if the groups agree).
  Value face_input(NodeId c, std::size_t face) const {
    if (face == 0) {
      if (sc_.adversary == Strategy::kNone || sc_.adversary == Strategy::kSilent) return setup_.inputs.at(c);
      return group_value(setup_.group_a).value_or(setup_.inputs.at(c));
    }
    auto a = group_value(setup_.group_a);
    auto b = group_value(setup_.group_b);
    if (b && b != a) return *b;
    if (sc_.protocol == Protocol::kBba) {
      const auto base = a.value_or(setup_.inputs.at(c));
      return Value::of(Bytes{static_cast<std::uint8_t>(base.bytes()[0] ^ 1)});
    }
    return setup_.alt;
  }

  std::optional<Value> group_value(const std::set<NodeId>& group) const {
    std::map<Value, std::size_t> counts;
    for (NodeId i : group) ++counts[setup_.inputs.at(i)];
    std::optional<Value> best;
    std::size_t best_count = 0;
    for (const auto& [v, k] : counts) {
      if (k > best_count) {
        best = v;
        best_count = k;
      }
    }
    return best;
  }

  bool in_b(NodeId j) const { return setup_.group_b.contains(j); }

  std::vector<Outgoing> by_group(const std::vector<std::vector<Outgoing>>& faces, bool (*filter)(Tag)) const {
    std::vector<Outgoing> out;
    for (std::size_t f = 0; f < faces.size(); ++f) {
      for (const auto& m : faces[f]) {
        const bool want_face = filter == nullptr || filter(m.msg.tag) ? (in_b(m.to) ? 1U : 0U) == f : f == 0;
        if (want_face) out.push_back(m);
      }
    }
    return out;
  }

  static Message flipped(const Message& m) {
    Message r = m;
    if (is_bit_tag(m.tag) && r.payload.size() == 1) r.payload[0] ^= 1;
    if (m.tag == Tag::kBbaV2 && r.payload.size() == 1) r.payload[0] = r.payload[0] == 0 ? 1 : 0;
    return r;
  }

  Bytes garbage_symbol(NodeId index) {
    CodedSymbol s{static_cast<std::uint16_t>(index), Lanes(p_.lane_count)};
    for (auto& e : s.lanes) e = static_cast<Element>(rng_.uniform(p_.field().size()));
    return encode_symbol(s, p_.c);
  }

  std::vector<Outgoing> transform(NodeId c, Corrupt& cn, std::vector<std::vector<Outgoing>> faces,
                                  const std::vector<EnvelopeRecord>* view, std::uint32_t round) {
    std::vector<Outgoing> out;
    if (cn.crashed) return out;

    // Leader dispersal follows the leader mode.
    if (c == sc_.leader && sc_.leader_mode != LeaderMode::kHonest) {
      for (std::size_t f = 0; f < faces.size(); ++f) {
        auto& msgs = faces[f];
        for (auto it = msgs.begin(); it != msgs.end();) {
          if (it->msg.tag != Tag::kLeader && it->msg.tag != Tag::kLeaderFull) {
            ++it;
            continue;
          }
          bool keep = false;
          if (sc_.leader_mode == LeaderMode::kTwoFace) {
            keep = (in_b(it->to) ? 1U : 0U) == f;
          } else {
            keep = f == 0 && it->to <= (sc_.n + 1) / 2;
          }
          if (keep) out.push_back(*it);
          it = msgs.erase(it);
        }
      }
      if (sc_.leader_mode == LeaderMode::kSilentAfterHalf && !out.empty()) {
        cn.crashed = true;
        return out;
      }
    }

    auto& f0 = faces[0];
    switch (sc_.adversary) {
      case Strategy::kNone:
      case Strategy::kDelayTargets:
        out.insert(out.end(), f0.begin(), f0.end());
        break;
      case Strategy::kSilent:
        break;
      case Strategy::kRandomBytes:
        for (auto m : f0) {
          m.msg.payload = rng_.bytes(std::max<std::size_t>(1, m.msg.payload.size()));
          out.push_back(std::move(m));
        }
        break;
      case Strategy::kEquivocateSymbols: {
        auto msgs = by_group(faces, &is_symbol_tag);
        out.insert(out.end(), msgs.begin(), msgs.end());
        break;
      }
      case Strategy::kTwoGroupSplit: {
        auto msgs = by_group(faces, nullptr);
        out.insert(out.end(), msgs.begin(), msgs.end());
        break;
      }
      case Strategy::kSiFlip:
        for (const auto& m : f0) {
          const bool flip = (is_bit_tag(m.msg.tag) || m.msg.tag == Tag::kBbaV2) && rng_.coin();
          out.push_back({m.to, flip ? flipped(m.msg) : m.msg});
        }
        if (round == 3 && (sc_.protocol == Protocol::kCool || sc_.protocol == Protocol::kBua)) {
          for (NodeId j = 1; j <= sc_.n; ++j) {
            if (rng_.coin()) out.push_back({j, Message{Tag::kSiPh2, 0, encode_bit(0)}});
          }
        }
        break;
      case Strategy::kScriptedRushing:
        scripted_rushing(faces, view, round, out);
        break;
      case Strategy::kReadySpam:
        for (const auto& m : f0) {
          if (m.msg.tag == Tag::kReady) continue;
          if (m.msg.tag == Tag::kBbaV1 || m.msg.tag == Tag::kBbaKing) {
            out.push_back({m.to, Message{m.msg.tag, m.msg.phase, encode_bit(in_b(m.to) ? 0 : 1)}});
            continue;
          }
          out.push_back(m);
        }
        if (is_async(sc_.protocol) && !cn.spammed) {
          cn.spammed = true;
          for (int pass = 0; pass < 2; ++pass) {
            for (NodeId j = 1; j <= sc_.n; ++j) {
              const int bit = (in_b(j) ? 0 : 1) ^ pass;
              out.push_back({j, Message{Tag::kReady, 0, encode_bit(bit)}});
            }
          }
        }
        break;
      case Strategy::kScripted:
        scripted(cn, faces, out);
        break;
    }
    return out;
  }

  // Group split plus rushing: claims success everywhere, demotes itself to
  // half the honest nodes, and feeds opposite BBA bits to the two groups,
  // each group getting the bit its honest peers are least sending.
  void scripted_rushing(const std::vector<std::vector<Outgoing>>& faces, const std::vector<EnvelopeRecord>* view,
                        std::uint32_t round, std::vector<Outgoing>& out) {
    std::size_t ones = 0, zeros = 0;
    if (view != nullptr) {
      for (const auto& e : *view) {
        if (e.msg.tag != Tag::kBbaV1) continue;
        (decode_bit(e.msg.payload) == std::optional<int>(1) ? ones : zeros)++;
      }
    }
    const int minority = ones <= zeros ? 1 : 0;
    for (const auto& m : by_group(faces, nullptr)) {
      const int a_bit = in_b(m.to) ? 0 : 1;
      switch (m.msg.tag) {
        case Tag::kSiPh1:
          out.push_back({m.to, Message{m.msg.tag, 0, encode_bit(1)}});
          break;
        case Tag::kSiPh2:
          break;
        case Tag::kBbaV1:
          out.push_back({m.to, Message{m.msg.tag, m.msg.phase, encode_bit(in_b(m.to) ? 1 - minority : minority)}});
          break;
        case Tag::kBbaV2:
          out.push_back({m.to, Message{m.msg.tag, m.msg.phase, Bytes{static_cast<std::uint8_t>(in_b(m.to) ? 1 - minority : minority)}}});
          break;
        case Tag::kBbaKing:
        case Tag::kSi1:
        case Tag::kSi2:
        case Tag::kReady:
          out.push_back({m.to, Message{m.msg.tag, m.msg.phase, encode_bit(a_bit)}});
          break;
        case Tag::kCorrectSymbolCool:
        case Tag::kCorrectSymbol:
          out.push_back({m.to, Message{m.msg.tag, 0, garbage_symbol(m.to)}});
          break;
        default:
          out.push_back(m);
          break;
      }
    }
    if (round == 3 && !is_async(sc_.protocol)) {
      for (NodeId j : setup_.group_b) out.push_back({j, Message{Tag::kSiPh2, 0, encode_bit(0)}});
    }
  }

  // Exhaustive alphabet, one choice per tag: 0 honest, 1 equivocate (group B
  // sees face 1 or the flipped bit), 2 withhold.
  void scripted(Corrupt& cn, const std::vector<std::vector<Outgoing>>& faces, std::vector<Outgoing>& out) {
    auto choice_for = [&](Tag tag) {
      auto it = cn.script.find(tag);
      if (it != cn.script.end()) return it->second;
      const std::size_t c = choices_ != nullptr ? choices_->choose(3, false) : rng_.uniform(3);
      cn.script.emplace(tag, c);
      return c;
    };
    for (const auto& m : faces[0]) {
      const std::size_t c = choice_for(m.msg.tag);
      if (c == 2) continue;
      if (c == 0 || !in_b(m.to)) {
        out.push_back(m);
        continue;
      }
      if (is_bit_tag(m.msg.tag) || m.msg.tag == Tag::kBbaV2) {
        out.push_back({m.to, flipped(m.msg)});
        continue;
      }
      if (faces.size() > 1) {
        for (const auto& alt : faces[1]) {
          if (alt.to == m.to && alt.msg.tag == m.msg.tag) {
            out.push_back(alt);
            break;
          }
        }
      }
    }
  }

  const Scenario& sc_;
  const Setup& setup_;
  CodeParams p_;
  Rng rng_;
  ChoiceSource* choices_;
  std::map<NodeId, Corrupt> nodes_;
};

}  // namespace ocior::netsim
