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
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "ocior/rs.hpp"
#include "ocior/wire.hpp"

namespace ocior {

enum class RbcVariant { kBalanced, kUnbalanced };

struct RbcOptions {
  RbcVariant variant = RbcVariant::kBalanced;
  // Phase-3 calibration counts SYMBOL senders that announced SI2(1), not only
  // those already classified into S1^[2].
  bool calibrate_from_si2_senders = true;
  // READY(0) needs n - t SI2(0) announcements. When false, n - t members of
  // S0^[2] suffice, which also counts SI2(1) senders whose SYMBOL mismatched.
  bool ready_zero_from_si2_zero = true;
  // Shadow instances run by the adversary may pin their phase-1 value.
  std::optional<Value> value_override = std::nullopt;
};

/// Asynchronous reliable broadcast node. Every "upon" rule is a guarded
/// action re-evaluated after each delivery until nothing more fires.
class RbcNode final : public AsyncNode {
 public:
  RbcNode(NodeId self, NodeId leader, CodeParams params, RbcOptions options = {},
          std::optional<Value> leader_input = std::nullopt)
      : self_(self),
        leader_(leader),
        p_(std::move(params)),
        opt_(std::move(options)),
        leader_input_(std::move(leader_input)),
        initial_(p_, true),
        final_(p_, false) {
    if (leader_input_ && self_ != leader_) throw std::invalid_argument("only the leader takes an input");
    if (leader_input_ && leader_input_->is_empty()) throw std::invalid_argument("leader input must be non-empty");
  }

  std::vector<Outgoing> start() override {
    if (!leader_input_) return {};
    if (opt_.variant == RbcVariant::kUnbalanced) {
      out_ = to_all(p_.n, Message{Tag::kLeaderFull, 0, frame_value(*leader_input_)});
    } else {
      const auto z = encode_value(p_, *leader_input_);
      for (NodeId j = 1; j <= p_.n; ++j) {
        out_.push_back({j, Message{Tag::kLeader, 0, encode_symbol(z[j - 1], p_.c)}});
      }
    }
    return take();
  }

  std::vector<Outgoing> receive(const Delivery& d) override {
    if (done_ || d.from < 1 || d.from > p_.n) return {};
    switch (d.msg.tag) {
      case Tag::kLeader:
        on_leader(d);
        break;
      case Tag::kLeaderFull:
        on_leader_full(d);
        break;
      case Tag::kInitial:
        on_initial(d);
        break;
      case Tag::kSymbol:
        on_symbol(d);
        break;
      case Tag::kSi1:
        on_indicator(d, si1_);
        break;
      case Tag::kSi2:
        on_indicator(d, si2_);
        break;
      case Tag::kReady:
        on_ready(d);
        break;
      case Tag::kCorrectSymbol:
        on_correct_symbol(d);
        break;
      default:
        break;
    }
    settle();
    return take();
  }

  bool terminated() const override { return done_; }
  const NodeReport& report() const override { return report_; }

  const std::set<NodeId>& l1() const { return l1_; }
  const std::set<NodeId>& l0() const { return l0_; }
  const std::set<NodeId>& s1(int phase) const { return phase == 1 ? si1_.s1 : si2_.s1; }
  const std::set<NodeId>& s0(int phase) const { return phase == 1 ? si1_.s0 : si2_.s0; }
  bool si_ph2() const { return si_ph2_; }
  bool phase3() const { return ph3_; }

 private:
  struct IndicatorSets {
    std::map<NodeId, int> received;
    std::set<NodeId> waiting;  // announced 1, no SYMBOL classified yet
    std::set<NodeId> s1, s0;
  };

  std::vector<Outgoing> take() {
    std::vector<Outgoing> out;
    out.swap(out_);
    return out;
  }

  void broadcast(Tag tag, Bytes payload) {
    auto msgs = to_all(p_.n, Message{tag, 0, std::move(payload)});
    out_.insert(out_.end(), msgs.begin(), msgs.end());
  }

  // -- initial phase --------------------------------------------------------

  void on_leader(const Delivery& d) {
    if (opt_.variant != RbcVariant::kBalanced || d.from != leader_ || got_leader_) return;
    got_leader_ = true;
    if (!decode_symbol(p_, d.msg.payload)) return;
    broadcast(Tag::kInitial, d.msg.payload);
  }

  void on_leader_full(const Delivery& d) {
    if (opt_.variant != RbcVariant::kUnbalanced || d.from != leader_ || got_leader_) return;
    got_leader_ = true;
    auto w = decode_full(d.msg.payload);
    if (!w || w->is_empty()) return;
    adopt(*w);
  }

  void on_initial(const Delivery& d) {
    if (opt_.variant != RbcVariant::kBalanced || oec_done_ || initial_.contains(d.from)) return;
    auto sym = decode_symbol(p_, d.msg.payload);
    auto w = initial_.add(d.from, sym ? *sym : CodedSymbol{static_cast<std::uint16_t>(d.from), {}});
    report_.oec_trials = initial_.trials();
    if (w) adopt(*w);
  }

  void adopt(const Value& w) {
    const Value chosen = opt_.value_override.value_or(w);
    try {
      codeword_ = encode_value(p_, chosen);
    } catch (const MessageTooLarge&) {
      return;
    }
    w_i_ = chosen;
    oec_done_ = true;
    report_.input = chosen;
  }

  // -- phase 1 --------------------------------------------------------------

  void on_symbol(const Delivery& d) {
    if (symbols_.contains(d.from)) return;
    symbols_.emplace(d.from, decode_pair(p_, d.msg.payload));
    if (ecc_enc_done_) classify_link(d.from);
  }

  void classify_link(NodeId j) {
    const auto& pair = symbols_.at(j);
    if (pair && pair->first == codeword_[self_ - 1] && pair->second == codeword_[j - 1]) {
      l1_.insert(j);
    } else {
      l0_.insert(j);
    }
  }

  void on_indicator(const Delivery& d, IndicatorSets& sets) {
    if (sets.received.contains(d.from)) return;
    auto bit = decode_bit(d.msg.payload);
    if (!bit) return;
    sets.received.emplace(d.from, *bit);
    if (*bit == 0) {
      sets.s0.insert(d.from);
    } else {
      sets.waiting.insert(d.from);
    }
  }

  // A waiting sender is placed once its SYMBOL has been classified. The
  // escape conditions on |S1| and |S0| release the wait without placing j.
  bool classify_waiting(IndicatorSets& sets) {
    bool changed = false;
    for (auto it = sets.waiting.begin(); it != sets.waiting.end();) {
      if (l1_.contains(*it)) {
        sets.s1.insert(*it);
      } else if (l0_.contains(*it)) {
        sets.s0.insert(*it);
      } else {
        ++it;
        continue;
      }
      it = sets.waiting.erase(it);
      changed = true;
    }
    return changed;
  }

  // -- readiness ------------------------------------------------------------

  void on_ready(const Delivery& d) {
    auto bit = decode_bit(d.msg.payload);
    if (!bit || ready_senders_.contains(d.from)) return;
    ready_senders_.insert(d.from);
    ready_from_[*bit].insert(d.from);
  }

  std::size_t zero_support() const {
    if (!opt_.ready_zero_from_si2_zero) return si2_.s0.size();
    return static_cast<std::size_t>(
        std::count_if(si2_.received.begin(), si2_.received.end(), [](const auto& e) { return e.second == 0; }));
  }

  void send_ready(int v) {
    ready_sent_ = true;
    report_.ready_bit = v;
    broadcast(Tag::kReady, encode_bit(v));
  }

  // -- phase 3 --------------------------------------------------------------

  void on_correct_symbol(const Delivery& d) {
    if (oec_final_ || final_.contains(d.from) || correct_seen_.contains(d.from)) return;
    correct_seen_.insert(d.from);
    auto sym = decode_symbol(p_, d.msg.payload);
    add_final(d.from, sym ? *sym : CodedSymbol{static_cast<std::uint16_t>(d.from), {}});
  }

  void add_final(NodeId j, CodedSymbol sym) {
    auto w = final_.add(j, std::move(sym));
    report_.oec_final_trials = final_.trials();
    if (w) {
      w_final_ = *w;
      oec_final_ = true;
    }
  }

  std::optional<CodedSymbol> calibrated_symbol() const {
    std::map<CodedSymbol, std::size_t> counts;
    for (const auto& [j, pair] : symbols_) {
      if (!pair) continue;
      const bool eligible = si2_.s1.contains(j) ||
                            (opt_.calibrate_from_si2_senders && si2_.received.contains(j) &&
                             si2_.received.at(j) == 1);
      if (!eligible) continue;
      if (++counts[pair->first] >= p_.t + 1) return pair->first;
    }
    return std::nullopt;
  }

  void finish(Value v) {
    report_.output = std::move(v);
    done_ = true;
  }

  void settle() {
    const std::size_t n = p_.n, t = p_.t;
    bool changed = true;
    while (changed && !done_) {
      changed = false;

      if (oec_done_ && !ecc_enc_done_) {
        for (NodeId j = 1; j <= n; ++j) {
          out_.push_back({j, Message{Tag::kSymbol, 0, encode_pair(codeword_[j - 1], codeword_[self_ - 1], p_.c)}});
        }
        ecc_enc_done_ = true;
        for (const auto& [j, pair] : symbols_) classify_link(j);
        changed = true;
      }
      if (ecc_enc_done_) {
        for (const auto& [j, pair] : symbols_) {
          if (!l1_.contains(j) && !l0_.contains(j)) classify_link(j);
        }
      }

      if (!si1_sent_ && l1_.size() >= n - t) {
        si1_sent_ = true;
        s1_ = 1;
        report_.s1 = 1;
        broadcast(Tag::kSi1, encode_bit(1));
        changed = true;
      } else if (!si1_sent_ && l0_.size() >= t + 1) {
        si1_sent_ = true;
        s1_ = 0;
        report_.s1 = 0;
        broadcast(Tag::kSi1, encode_bit(0));
        changed = true;
      }

      changed |= classify_waiting(si1_);
      changed |= classify_waiting(si2_);

      if (!si2_sent_) {
        int bit = -1;
        if (si1_sent_ && s1_ == 0) {
          bit = 0;
        } else if (si1_sent_ && s1_ == 1 && si1_.s1.size() >= n - t) {
          bit = 1;
        } else if (si1_.s0.size() >= t + 1) {
          bit = 0;
        }
        if (bit >= 0) {
          si2_sent_ = true;
          si_ph2_ = bit == 1;
          report_.s2 = bit;
          broadcast(Tag::kSi2, encode_bit(bit));
          changed = true;
        }
      }

      if (!ready_sent_) {
        for (int v : {1, 0}) {
          const std::size_t support = v == 1 ? si2_.s1.size() : zero_support();
          if (support >= n - t || ready_from_[v].size() >= t + 1) {
            send_ready(v);
            changed = true;
            break;
          }
        }
      }

      if (!v_out_) {
        for (int v : {1, 0}) {
          if (ready_from_[v].size() < 2 * t + 1) continue;
          if (!ready_sent_) send_ready(v);
          v_out_ = v;
          report_.v_out = v;
          changed = true;
          if (v == 0) {
            finish(Value::bottom());
            return;
          }
          ph3_ = true;
          ph3_fast_ = si_ph2_;
          break;
        }
      }

      if (!oec_final_) {
        for (const auto& [j, bit] : si2_.received) {
          if (bit != 1 || final_.contains(j)) continue;
          auto it = symbols_.find(j);
          if (it == symbols_.end()) continue;
          const auto& pair = it->second;
          add_final(j, pair ? pair->second : CodedSymbol{static_cast<std::uint16_t>(j), {}});
          changed = true;
          if (oec_final_) break;
        }
      }

      if (ph3_ && ph3_fast_) {
        finish(w_i_);
        return;
      }
      if (ph3_ && !correct_sent_) {
        if (auto y = calibrated_symbol()) {
          correct_sent_ = true;
          broadcast(Tag::kCorrectSymbol, encode_symbol(*y, p_.c));
          changed = true;
        }
      }
      if (ph3_ && correct_sent_ && oec_final_) {
        finish(w_final_);
        return;
      }
    }
  }

  NodeId self_, leader_;
  CodeParams p_;
  RbcOptions opt_;
  std::optional<Value> leader_input_;

  bool got_leader_ = false;
  OnlineDecoder initial_;
  bool oec_done_ = false;
  Value w_i_, w_final_;

  std::vector<CodedSymbol> codeword_;
  bool ecc_enc_done_ = false;
  std::map<NodeId, std::optional<std::pair<CodedSymbol, CodedSymbol>>> symbols_;
  std::set<NodeId> l1_, l0_;

  bool si1_sent_ = false;
  int s1_ = 0;
  IndicatorSets si1_, si2_;
  bool si2_sent_ = false, si_ph2_ = false;

  std::set<NodeId> ready_senders_;
  std::set<NodeId> ready_from_[2];
  bool ready_sent_ = false;
  std::optional<int> v_out_;

  bool ph3_ = false, ph3_fast_ = false, correct_sent_ = false;
  std::set<NodeId> correct_seen_;
  OnlineDecoder final_;
  bool oec_final_ = false;

  std::vector<Outgoing> out_;
  NodeReport report_;
  bool done_ = false;
};

}  // namespace ocior
