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

// Execution traces and their line-delimited JSON encoding.
//
// Record types, one JSON object per line, in this order:
//   header    format "ocior-trace", version 1, scenario echo, corrupt set, inputs
//   envelope  one per send, in send (seq) order
//   output    one per honest node that produced an output
//   snapshot  one per honest node: the NodeReport observables
//   violation zero or more checker findings
//   metric    one aggregate record
//   end       record count, so truncation is detectable

#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ocior/netsim/scenario.hpp"
#include "ocior/wire.hpp"

namespace ocior::netsim {

using nlohmann::json;

inline constexpr int kTraceVersion = 1;

struct EnvelopeRecord {
  std::uint64_t seq = 0;
  NodeId from = 0, to = 0;
  Message msg;
  std::uint32_t round = 0;       // sync send round
  std::uint64_t emitted_at = 0;  // async step during which it was emitted (0 = start)
  std::uint64_t depth = 0;       // causal depth (async) or send round (sync)
  std::optional<std::uint64_t> delivered;  // delivery round (sync) or step (async)
  bool adv = false;              // produced by a corrupt sender
  std::uint64_t emit_index = 0;  // per-sender emission counter
  std::uint64_t bits = 0;        // content bits, honest senders only

  friend bool operator==(const EnvelopeRecord&, const EnvelopeRecord&) = default;
};

struct OutputRecord {
  NodeId node = 0;
  Value value;
  std::uint64_t at = 0;    // round (sync) or causal depth (async)
  std::uint64_t step = 0;  // async delivery step; equals `at` for sync

  friend bool operator==(const OutputRecord&, const OutputRecord&) = default;
};

struct Violation {
  std::string property;
  std::string detail;

  friend bool operator==(const Violation&, const Violation&) = default;
};

struct Metrics {
  std::uint64_t total_bits = 0;
  std::uint64_t max_node_bits = 0;
  std::uint64_t leader_bits = 0;
  double mean_node_bits = 0;
  std::uint64_t rounds = 0;  // sync rounds used
  std::uint64_t depth = 0;   // async causal depth
  std::uint64_t envelopes = 0;
  std::map<std::string, std::uint64_t> bits_by_tag;
  std::map<NodeId, std::uint64_t> bits_by_node;

  friend bool operator==(const Metrics&, const Metrics&) = default;
};

struct Trace {
  Scenario scenario;
  std::set<NodeId> corrupt;
  std::map<NodeId, Value> inputs;
  std::vector<EnvelopeRecord> envelopes;
  std::map<NodeId, OutputRecord> outputs;
  std::map<NodeId, NodeReport> reports;
  std::vector<Violation> violations;
  Metrics metrics;
  bool cap_hit = false;
  std::uint64_t steps = 0;  // rounds executed (sync) or deliveries (async)

  bool honest(NodeId i) const { return !corrupt.contains(i); }
  std::vector<NodeId> honest_nodes() const {
    std::vector<NodeId> out;
    for (NodeId i = 1; i <= scenario.n; ++i) {
      if (honest(i)) out.push_back(i);
    }
    return out;
  }
};

class TraceFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// JSON conversion.

inline json value_json(const Value& v) { return v.is_bottom() ? json(nullptr) : json(to_hex(v.bytes())); }

inline Value value_from_json(const json& j) {
  if (j.is_null()) return Value::bottom();
  return Value::of(from_hex(j.get<std::string>()));
}

inline json scenario_json(const Scenario& s) {
  json j;
  j["name"] = s.name;
  j["protocol"] = to_string(s.protocol);
  j["n"] = s.n;
  j["t"] = s.t;
  j["l"] = s.l_bits;
  j["inputs"] = to_string(s.inputs);
  j["adversary"] = to_string(s.adversary);
  if (s.faults) j["faults"] = *s.faults;
  j["leader_mode"] = to_string(s.leader_mode);
  j["leader"] = s.leader;
  j["scheduler"] = to_string(s.scheduler);
  j["fairness"] = s.fairness;
  j["seed"] = s.seed;
  j["allow_subresilient"] = s.allow_subresilient;
  j["round_cap"] = s.round_cap;
  j["step_cap"] = s.step_cap;
  j["calibrate_from_si2_senders"] = s.calibrate_from_si2_senders;
  j["ready_zero_from_si2_zero"] = s.ready_zero_from_si2_zero;
  return j;
}

inline Scenario scenario_from_json(const json& j) {
  Scenario s;
  s.name = j.at("name").get<std::string>();
  s.protocol = parse_protocol(j.at("protocol").get<std::string>());
  s.n = j.at("n").get<std::size_t>();
  s.t = j.at("t").get<std::size_t>();
  s.l_bits = j.at("l").get<std::size_t>();
  s.inputs = parse_inputs(j.at("inputs").get<std::string>());
  s.adversary = parse_strategy(j.at("adversary").get<std::string>());
  if (j.contains("faults")) s.faults = j.at("faults").get<std::size_t>();
  s.leader_mode = parse_leader_mode(j.at("leader_mode").get<std::string>());
  s.leader = j.at("leader").get<NodeId>();
  s.scheduler = parse_policy(j.at("scheduler").get<std::string>());
  s.fairness = j.at("fairness").get<std::uint64_t>();
  s.seed = j.at("seed").get<std::uint64_t>();
  s.allow_subresilient = j.at("allow_subresilient").get<bool>();
  s.round_cap = j.at("round_cap").get<std::uint32_t>();
  s.step_cap = j.at("step_cap").get<std::uint64_t>();
  s.calibrate_from_si2_senders = j.at("calibrate_from_si2_senders").get<bool>();
  s.ready_zero_from_si2_zero = j.at("ready_zero_from_si2_zero").get<bool>();
  return s;
}

/// Protocol instance identifier carried by every envelope: ID for the
/// synchronous protocols, the pair (ID, leader) for broadcast.
inline std::string protocol_id(const Scenario& s) {
  const std::string id = std::string(to_string(s.protocol)) + "/" + std::to_string(s.seed);
  return is_async(s.protocol) ? "<" + id + "," + std::to_string(s.leader) + ">" : id;
}

inline json envelope_json(const EnvelopeRecord& e, const std::string& pid) {
  json j;
  j["type"] = "envelope";
  j["seq"] = e.seq;
  j["from"] = e.from;
  j["to"] = e.to;
  j["tag"] = tag_name(e.msg.tag);
  j["pid"] = pid;
  j["phase"] = e.msg.phase;
  j["round"] = e.round;
  j["emitted_at"] = e.emitted_at;
  j["depth"] = e.depth;
  j["delivered"] = e.delivered ? json(*e.delivered) : json(nullptr);
  j["adv"] = e.adv;
  j["emit_index"] = e.emit_index;
  j["bits"] = e.bits;
  j["payload"] = to_hex(e.msg.payload);
  return j;
}

inline EnvelopeRecord envelope_from_json(const json& j) {
  EnvelopeRecord e;
  e.seq = j.at("seq").get<std::uint64_t>();
  e.from = j.at("from").get<NodeId>();
  e.to = j.at("to").get<NodeId>();
  auto tag = tag_from_name(j.at("tag").get<std::string>());
  if (!tag) throw TraceFormatError("unknown tag " + j.at("tag").get<std::string>());
  e.msg.tag = *tag;
  e.msg.phase = j.at("phase").get<std::uint32_t>();
  e.round = j.at("round").get<std::uint32_t>();
  e.emitted_at = j.at("emitted_at").get<std::uint64_t>();
  e.depth = j.at("depth").get<std::uint64_t>();
  if (!j.at("delivered").is_null()) e.delivered = j.at("delivered").get<std::uint64_t>();
  e.adv = j.at("adv").get<bool>();
  e.emit_index = j.at("emit_index").get<std::uint64_t>();
  e.bits = j.at("bits").get<std::uint64_t>();
  e.msg.payload = from_hex(j.at("payload").get<std::string>());
  return e;
}

template <typename T>
void put_opt(json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

inline json report_json(NodeId node, const NodeReport& r) {
  json j;
  j["type"] = "snapshot";
  j["node"] = node;
  if (r.input) j["input"] = value_json(*r.input);
  if (r.output) j["output"] = value_json(*r.output);
  put_opt(j, "s1", r.s1);
  put_opt(j, "s2", r.s2);
  put_opt(j, "vote", r.vote);
  if (r.bua_value) j["bua_value"] = value_json(*r.bua_value);
  if (!r.links.empty()) {
    std::string bits;
    for (auto u : r.links) bits.push_back(u ? '1' : '0');
    j["links"] = bits;
  }
  put_opt(j, "bba_decision", r.bba_decision);
  if (!r.bba_estimates.empty()) j["bba_estimates"] = r.bba_estimates;
  put_opt(j, "ready_bit", r.ready_bit);
  put_opt(j, "v_out", r.v_out);
  j["oec_trials"] = r.oec_trials;
  j["oec_final_trials"] = r.oec_final_trials;
  if (!r.faults.empty()) j["faults"] = r.faults;
  return j;
}

template <typename T>
void get_opt(const json& j, const char* key, std::optional<T>& v) {
  if (j.contains(key)) v = j.at(key).get<T>();
}

inline NodeReport report_from_json(const json& j) {
  NodeReport r;
  if (j.contains("input")) r.input = value_from_json(j.at("input"));
  if (j.contains("output")) r.output = value_from_json(j.at("output"));
  get_opt(j, "s1", r.s1);
  get_opt(j, "s2", r.s2);
  get_opt(j, "vote", r.vote);
  if (j.contains("bua_value")) r.bua_value = value_from_json(j.at("bua_value"));
  if (j.contains("links")) {
    for (char c : j.at("links").get<std::string>()) r.links.push_back(c == '1' ? 1 : 0);
  }
  get_opt(j, "bba_decision", r.bba_decision);
  if (j.contains("bba_estimates")) r.bba_estimates = j.at("bba_estimates").get<std::vector<int>>();
  get_opt(j, "ready_bit", r.ready_bit);
  get_opt(j, "v_out", r.v_out);
  r.oec_trials = j.at("oec_trials").get<std::size_t>();
  r.oec_final_trials = j.at("oec_final_trials").get<std::size_t>();
  if (j.contains("faults")) r.faults = j.at("faults").get<std::vector<std::string>>();
  return r;
}

inline json metrics_json(const Metrics& m) {
  json j;
  j["type"] = "metric";
  j["total_bits"] = m.total_bits;
  j["max_node_bits"] = m.max_node_bits;
  j["leader_bits"] = m.leader_bits;
  j["mean_node_bits"] = m.mean_node_bits;
  j["rounds"] = m.rounds;
  j["depth"] = m.depth;
  j["envelopes"] = m.envelopes;
  j["bits_by_tag"] = m.bits_by_tag;
  json by_node = json::object();
  for (const auto& [k, v] : m.bits_by_node) by_node[std::to_string(k)] = v;
  j["bits_by_node"] = by_node;
  return j;
}

inline Metrics metrics_from_json(const json& j) {
  Metrics m;
  m.total_bits = j.at("total_bits").get<std::uint64_t>();
  m.max_node_bits = j.at("max_node_bits").get<std::uint64_t>();
  m.leader_bits = j.at("leader_bits").get<std::uint64_t>();
  m.mean_node_bits = j.at("mean_node_bits").get<double>();
  m.rounds = j.at("rounds").get<std::uint64_t>();
  m.depth = j.at("depth").get<std::uint64_t>();
  m.envelopes = j.at("envelopes").get<std::uint64_t>();
  m.bits_by_tag = j.at("bits_by_tag").get<std::map<std::string, std::uint64_t>>();
  for (const auto& [k, v] : j.at("bits_by_node").items()) {
    m.bits_by_node[static_cast<NodeId>(std::stoul(k))] = v.get<std::uint64_t>();
  }
  return m;
}

// ---------------------------------------------------------------------------
// JSONL writer / reader.

inline void write_trace(std::ostream& out, const Trace& tr) {
  std::size_t records = 0;
  auto line = [&](const json& j) {
    out << j.dump() << '\n';
    ++records;
  };
  json h;
  h["type"] = "header";
  h["format"] = "ocior-trace";
  h["version"] = kTraceVersion;
  h["config"] = scenario_json(tr.scenario);
  h["corrupt"] = tr.corrupt;
  json inputs = json::object();
  for (const auto& [k, v] : tr.inputs) inputs[std::to_string(k)] = value_json(v);
  h["inputs"] = inputs;
  h["cap_hit"] = tr.cap_hit;
  h["steps"] = tr.steps;
  line(h);
  const std::string pid = protocol_id(tr.scenario);
  for (const auto& e : tr.envelopes) line(envelope_json(e, pid));
  for (const auto& [node, o] : tr.outputs) {
    line(json{{"type", "output"}, {"node", node}, {"value", value_json(o.value)}, {"at", o.at}, {"step", o.step}});
  }
  for (const auto& [node, r] : tr.reports) line(report_json(node, r));
  for (const auto& v : tr.violations) {
    line(json{{"type", "violation"}, {"property", v.property}, {"detail", v.detail}});
  }
  line(metrics_json(tr.metrics));
  out << json{{"type", "end"}, {"records", records}}.dump() << '\n';
}

inline std::string trace_to_string(const Trace& tr) {
  std::ostringstream os;
  write_trace(os, tr);
  return os.str();
}

inline Trace read_trace(std::istream& in) {
  Trace tr;
  std::string text;
  std::size_t records = 0;
  bool header = false, ended = false;
  while (std::getline(in, text)) {
    if (text.empty()) continue;
    if (ended) throw TraceFormatError("records after end");
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw TraceFormatError(std::string("bad JSON line: ") + e.what());
    }
    try {
      const auto type = j.at("type").get<std::string>();
      if (!header && type != "header") throw TraceFormatError("first record must be the header");
      if (type == "header") {
        if (header) throw TraceFormatError("duplicate header");
        if (j.at("format") != "ocior-trace") throw TraceFormatError("not an ocior trace");
        if (j.at("version") != kTraceVersion) throw TraceFormatError("unsupported trace version");
        tr.scenario = scenario_from_json(j.at("config"));
        tr.corrupt = j.at("corrupt").get<std::set<NodeId>>();
        for (const auto& [k, v] : j.at("inputs").items()) {
          tr.inputs[static_cast<NodeId>(std::stoul(k))] = value_from_json(v);
        }
        tr.cap_hit = j.at("cap_hit").get<bool>();
        tr.steps = j.at("steps").get<std::uint64_t>();
        header = true;
      } else if (type == "envelope") {
        if (j.at("pid").get<std::string>() != protocol_id(tr.scenario)) {
          throw TraceFormatError("envelope protocol id does not match the header");
        }
        tr.envelopes.push_back(envelope_from_json(j));
      } else if (type == "output") {
        OutputRecord o;
        o.node = j.at("node").get<NodeId>();
        o.value = value_from_json(j.at("value"));
        o.at = j.at("at").get<std::uint64_t>();
        o.step = j.at("step").get<std::uint64_t>();
        tr.outputs[o.node] = o;
      } else if (type == "snapshot") {
        tr.reports[j.at("node").get<NodeId>()] = report_from_json(j);
      } else if (type == "violation") {
        tr.violations.push_back({j.at("property").get<std::string>(), j.at("detail").get<std::string>()});
      } else if (type == "metric") {
        tr.metrics = metrics_from_json(j);
      } else if (type == "end") {
        if (j.at("records").get<std::size_t>() != records) throw TraceFormatError("record count mismatch");
        ended = true;
        continue;
      } else {
        throw TraceFormatError("unknown record type " + type);
      }
    } catch (const json::exception& e) {
      throw TraceFormatError(std::string("malformed record: ") + e.what());
    } catch (const ConfigError& e) {
      throw TraceFormatError(std::string("bad config echo: ") + e.what());
    } catch (const std::invalid_argument& e) {
      throw TraceFormatError(std::string("bad field: ") + e.what());
    }
    ++records;
  }
  if (!header) throw TraceFormatError("empty trace");
  if (!ended) throw TraceFormatError("truncated trace (no end record)");
  return tr;
}

}  // namespace ocior::netsim
