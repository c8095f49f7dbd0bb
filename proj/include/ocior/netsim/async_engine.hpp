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

// Event-driven engine. One envelope is delivered per step; the scheduler
// picks which. Fairness bound B: an honest-to-honest envelope is overtaken
// (a later-sent envelope delivered first) at most B times. Whenever the
// oldest pending honest-to-honest envelope reaches B overtakes it is
// delivered next, which bounds every other one as well.
//
// Causal depth: an envelope's depth is one more than its sender's clock; a
// node's clock is the largest depth among the honest-origin envelopes it has
// received. A run's depth is the largest clock at which an honest node
// output.

#pragma once

#include <map>
#include <memory>
#include <set>
#include <unordered_map>
#include <vector>

#include "ocior/netsim/adversary.hpp"
#include "ocior/netsim/metrics.hpp"
#include "ocior/netsim/sync_engine.hpp"
#include "ocior/netsim/trace.hpp"

namespace ocior::netsim {

/// Prefix counts over sequence numbers, grown on demand.
class Fenwick {
 public:
  void add(std::size_t i) {
    if (i >= flags_.size()) grow(i + 1);
    flags_[i] = 1;
    for (std::size_t x = i + 1; x <= tree_.size(); x += x & (~x + 1)) ++tree_[x - 1];
  }
  /// Number of marked indices <= i.
  std::uint64_t prefix(std::size_t i) const {
    std::uint64_t s = 0;
    for (std::size_t x = std::min(i + 1, tree_.size()); x > 0; x -= x & (~x + 1)) s += tree_[x - 1];
    return s;
  }

 private:
  void grow(std::size_t need) {
    std::size_t size = std::max<std::size_t>(64, tree_.size());
    while (size < need) size *= 2;
    flags_.resize(size, 0);
    tree_.assign(size, 0);
    for (std::size_t i = 0; i < size; ++i) {
      tree_[i] += flags_[i];
      const std::size_t parent = (i + 1) + ((i + 1) & (~(i + 1) + 1));
      if (parent <= size) tree_[parent - 1] += tree_[i];
    }
  }

  std::vector<std::uint8_t> flags_;
  std::vector<std::uint64_t> tree_;
};

/// Undelivered envelopes, indexed every way the schedulers need.
class Pending {
 public:
  explicit Pending(const Trace& tr, std::set<NodeId> targets) : tr_(tr), targets_(std::move(targets)) {}

  void insert(std::uint64_t seq) {
    const auto& e = tr_.envelopes[seq];
    all_.insert(seq);
    pos_[seq] = bag_.size();
    bag_.push_back(seq);
    if (e.adv) corrupt_origin_.insert(seq);
    if (!targets_.contains(e.to)) non_target_.insert(seq);
    if (!e.adv && tr_.honest(e.to)) honest_honest_.insert(seq);
  }

  void erase(std::uint64_t seq) {
    all_.erase(seq);
    const std::size_t p = pos_.at(seq);
    bag_[p] = bag_.back();
    pos_[bag_[p]] = p;
    bag_.pop_back();
    pos_.erase(seq);
    corrupt_origin_.erase(seq);
    non_target_.erase(seq);
    honest_honest_.erase(seq);
  }

  bool empty() const { return all_.empty(); }
  std::size_t size() const { return all_.size(); }
  const std::set<std::uint64_t>& by_seq() const { return all_; }
  const std::vector<std::uint64_t>& bag() const { return bag_; }
  const std::set<std::uint64_t>& corrupt_origin() const { return corrupt_origin_; }
  const std::set<std::uint64_t>& non_target() const { return non_target_; }
  const std::set<std::uint64_t>& honest_honest() const { return honest_honest_; }

 private:
  const Trace& tr_;
  std::set<NodeId> targets_;
  std::set<std::uint64_t> all_, corrupt_origin_, non_target_, honest_honest_;
  std::vector<std::uint64_t> bag_;
  std::unordered_map<std::uint64_t, std::size_t> pos_;
};

class Scheduler {
 public:
  virtual ~Scheduler() = default;
  /// Picks the next envelope. `forced` is set when the fairness bound
  /// requires a particular delivery.
  virtual std::uint64_t pick(std::uint64_t step, const Pending& pending, std::optional<std::uint64_t> forced) = 0;
};

class FifoScheduler final : public Scheduler {
 public:
  std::uint64_t pick(std::uint64_t, const Pending& pending, std::optional<std::uint64_t> forced) override {
    return forced.value_or(*pending.by_seq().begin());
  }
};

class RandomScheduler final : public Scheduler {
 public:
  explicit RandomScheduler(std::uint64_t seed) : rng_(seed) {}
  std::uint64_t pick(std::uint64_t, const Pending& pending, std::optional<std::uint64_t> forced) override {
    if (forced) return *forced;
    return pending.bag()[rng_.uniform(pending.bag().size())];
  }

 private:
  Rng rng_;
};

/// Delivers corrupt traffic as early as possible and holds back everything
/// addressed to the target nodes (newest first otherwise).
class DelayScheduler final : public Scheduler {
 public:
  std::uint64_t pick(std::uint64_t, const Pending& pending, std::optional<std::uint64_t> forced) override {
    if (forced) return *forced;
    if (!pending.corrupt_origin().empty()) return *pending.corrupt_origin().begin();
    if (!pending.non_target().empty()) return *pending.non_target().rbegin();
    return *pending.by_seq().rbegin();
  }
};

/// Bounded interleavings: FIFO except that up to `budget` times one of the
/// first `window` pending envelopes may be chosen instead.
class ExhaustiveScheduler final : public Scheduler {
 public:
  ExhaustiveScheduler(ChoiceSource* choices, std::size_t window, std::size_t budget, std::uint64_t horizon)
      : choices_(choices), window_(window), budget_(budget), horizon_(horizon) {}

  std::uint64_t pick(std::uint64_t step, const Pending& pending, std::optional<std::uint64_t> forced) override {
    if (forced) return *forced;
    auto it = pending.by_seq().begin();
    const std::size_t options = std::min(window_, pending.size());
    if (choices_ == nullptr || used_ >= budget_ || options < 2 || step > horizon_) return *it;
    const std::size_t c = choices_->choose(options, true);
    if (c != 0) ++used_;
    std::advance(it, static_cast<std::ptrdiff_t>(c));
    return *it;
  }

 private:
  ChoiceSource* choices_;
  std::size_t window_, budget_;
  std::uint64_t horizon_;
  std::size_t used_ = 0;
};

/// Honest nodes the adversarial schedulers slow down.
inline std::set<NodeId> delay_targets(const Scenario& sc, const Setup& setup) {
  if (sc.adversary == Strategy::kDelayTargets) return setup.group_b;
  if (setup.group_b.empty()) return {};
  return {*setup.group_b.begin()};
}

inline std::unique_ptr<Scheduler> make_scheduler(const Scenario& sc, ChoiceSource* choices) {
  switch (sc.scheduler) {
    case Policy::kFifo:
      return std::make_unique<FifoScheduler>();
    case Policy::kSeededRandom:
      return std::make_unique<RandomScheduler>(sc.seed ^ 0x5C4ED11EULL);
    case Policy::kAdversarialDelay:
      return std::make_unique<DelayScheduler>();
    case Policy::kExhaustiveSmall:
      return std::make_unique<ExhaustiveScheduler>(choices, 3, 1, UINT64_MAX);
  }
  return nullptr;
}

struct AsyncHooks {
  AsyncAdversary* adversary = nullptr;
  Scheduler* scheduler = nullptr;
  ChoiceSource* choices = nullptr;
};

inline Trace run_async(const Scenario& sc, AsyncHooks hooks = {}) {
  sc.validate();
  const Setup setup = make_setup(sc);
  const CodeParams p = sc.code_params();
  Trace tr = new_trace(sc, setup);
  EnvelopeLog log(tr, p);

  std::unique_ptr<Byzantine> own_adv;
  if (hooks.adversary == nullptr) {
    own_adv = std::make_unique<Byzantine>(sc, setup, p, hooks.choices);
    hooks.adversary = own_adv.get();
  }
  std::unique_ptr<Scheduler> own_sched;
  if (hooks.scheduler == nullptr) {
    own_sched = make_scheduler(sc, hooks.choices);
    hooks.scheduler = own_sched.get();
  }

  const RbcOptions opts = rbc_options(sc);
  std::map<NodeId, std::unique_ptr<RbcNode>> nodes;
  for (NodeId i : tr.honest_nodes()) {
    std::optional<Value> input;
    if (i == sc.leader) input = setup.inputs.at(sc.leader);
    nodes[i] = std::make_unique<RbcNode>(i, sc.leader, p, opts, input);
  }

  Pending pending(tr, delay_targets(sc, setup));
  Fenwick delivered;
  std::uint64_t delivered_count = 0;
  std::map<NodeId, std::uint64_t> clock;

  auto emit = [&](NodeId from, std::vector<Outgoing> msgs, bool adv, std::uint64_t step) {
    for (auto& m : msgs) {
      if (m.to < 1 || m.to > sc.n) continue;
      auto& e = log.add(from, std::move(m), adv);
      e.emitted_at = step;
      e.depth = clock[from] + 1;
      pending.insert(e.seq);
    }
  };
  auto record_output = [&](NodeId i, std::uint64_t step) {
    tr.outputs[i] = {i, nodes[i]->report().output.value_or(Value::bottom()), clock[i], step};
  };

  for (auto& [i, node] : nodes) {
    emit(i, node->start(), false, 0);
    if (node->terminated()) record_output(i, 0);
  }
  for (auto& [from, m] : hooks.adversary->start()) emit(from, {std::move(m)}, true, 0);

  auto all_done = [&] {
    for (const auto& [i, node] : nodes) {
      if (!node->terminated()) return false;
    }
    return true;
  };

  std::uint64_t step = 0;
  while (!all_done() && !pending.empty()) {
    if (step >= sc.step_cap) {
      tr.cap_hit = true;
      break;
    }
    ++step;
    std::optional<std::uint64_t> forced;
    if (!pending.honest_honest().empty()) {
      const std::uint64_t oldest = *pending.honest_honest().begin();
      if (delivered_count - delivered.prefix(oldest) >= sc.fairness) forced = oldest;
    }
    const std::uint64_t seq = hooks.scheduler->pick(step, pending, forced);
    pending.erase(seq);
    delivered.add(seq);
    ++delivered_count;

    auto& e = tr.envelopes[seq];
    e.delivered = step;
    const NodeId to = e.to;
    const Delivery d{e.from, e.msg};
    if (!e.adv) clock[to] = std::max(clock[to], e.depth);
    if (tr.honest(to)) {
      auto& node = nodes.at(to);
      if (node->terminated()) continue;
      emit(to, node->receive(d), false, step);
      if (node->terminated()) record_output(to, step);
    } else {
      emit(to, hooks.adversary->deliver(step, to, d), true, step);
    }
  }
  tr.steps = step;
  for (const auto& [i, node] : nodes) tr.reports[i] = node->report();
  tr.metrics = compute_metrics(tr);
  return tr;
}

inline Trace run_scenario(const Scenario& sc, ChoiceSource* choices = nullptr) {
  if (is_async(sc.protocol)) {
    AsyncHooks hooks;
    hooks.choices = choices;
    return run_async(sc, hooks);
  }
  return run_sync(sc, nullptr, choices);
}

}  // namespace ocior::netsim
