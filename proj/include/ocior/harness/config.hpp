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

// Scenario configuration files.
//
// INI syntax. Every section except [output] is a scenario matrix; any key may
// hold a comma-separated list and the section expands to the cartesian
// product of its lists, times its seeds:
//
//   [cool-sweep]
//   protocol  = cool
//   n         = 4, 7, 10
//   t         = auto            ; floor((n - 1) / 3)
//   l         = 256
//   inputs    = unanimous, split
//   adversary = silent, si-flip
//   seeds     = 1-20
//
//   [output]
//   csv        = results.csv
//   violations = violations.json

#pragma once

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cstdint>
#include <fstream>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ocior/netsim/scenario.hpp"

namespace ocior::harness {

using netsim::ConfigError;
using netsim::Scenario;

struct OutputPaths {
  std::optional<std::string> csv, violations, trace_dir;
};

struct Config {
  std::vector<Scenario> cells;  // fully expanded, in file order
  OutputPaths output;
};

inline std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  boost::split(parts, text, boost::is_any_of(","));
  for (auto& p : parts) boost::trim(p);
  std::erase_if(parts, [](const std::string& p) { return p.empty(); });
  return parts;
}

inline std::uint64_t parse_uint(const std::string& s, const std::string& key) {
  std::size_t used = 0;
  std::uint64_t v = 0;
  try {
    if (!s.empty() && s[0] == '-') throw std::invalid_argument("negative");
    v = std::stoull(s, &used, 0);
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected a non-negative integer, got '" + s + "'");
  }
  if (used != s.size()) throw ConfigError("key '" + key + "': trailing characters in '" + s + "'");
  return v;
}

inline bool parse_bool(const std::string& s, const std::string& key) {
  const auto v = boost::to_lower_copy(s);
  if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
  if (v == "false" || v == "no" || v == "0" || v == "off") return false;
  throw ConfigError("key '" + key + "': expected a boolean, got '" + s + "'");
}

/// "1-5, 9, 12-13" -> {1,2,3,4,5,9,12,13}, in order, duplicates dropped.
inline std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::set<std::uint64_t> seen;
  for (const auto& part : split_list(text)) {
    const auto dash = part.find('-', 1);
    std::uint64_t lo = 0, hi = 0;
    if (dash == std::string::npos) {
      lo = hi = parse_uint(part, "seeds");
    } else {
      lo = parse_uint(boost::trim_copy(part.substr(0, dash)), "seeds");
      hi = parse_uint(boost::trim_copy(part.substr(dash + 1)), "seeds");
    }
    if (hi < lo) throw ConfigError("seeds: empty range '" + part + "'");
    if (hi - lo > 10'000'000) throw ConfigError("seeds: range too large '" + part + "'");
    for (std::uint64_t s = lo; s <= hi; ++s) {
      if (seen.insert(s).second) out.push_back(s);
    }
  }
  if (out.empty()) throw ConfigError("seeds: no seeds given");
  return out;
}

namespace detail {

using Setter = std::function<void(Scenario&, const std::string&)>;

inline const std::vector<std::pair<std::string, Setter>>& setters() {
  static const std::vector<std::pair<std::string, Setter>> table = {
      {"protocol", [](Scenario& s, const std::string& v) { s.protocol = netsim::parse_protocol(v); }},
      {"n", [](Scenario& s, const std::string& v) { s.n = parse_uint(v, "n"); }},
      {"l", [](Scenario& s, const std::string& v) { s.l_bits = parse_uint(v, "l"); }},
      {"inputs", [](Scenario& s, const std::string& v) { s.inputs = netsim::parse_inputs(v); }},
      {"adversary", [](Scenario& s, const std::string& v) { s.adversary = netsim::parse_strategy(v); }},
      {"faults", [](Scenario& s, const std::string& v) { s.faults = parse_uint(v, "faults"); }},
      {"leader_mode", [](Scenario& s, const std::string& v) { s.leader_mode = netsim::parse_leader_mode(v); }},
      {"leader", [](Scenario& s, const std::string& v) { s.leader = static_cast<NodeId>(parse_uint(v, "leader")); }},
      {"scheduler", [](Scenario& s, const std::string& v) { s.scheduler = netsim::parse_policy(v); }},
      {"fairness", [](Scenario& s, const std::string& v) { s.fairness = parse_uint(v, "fairness"); }},
      {"round_cap", [](Scenario& s, const std::string& v) { s.round_cap = static_cast<std::uint32_t>(parse_uint(v, "round_cap")); }},
      {"step_cap", [](Scenario& s, const std::string& v) { s.step_cap = parse_uint(v, "step_cap"); }},
      {"allow_subresilient", [](Scenario& s, const std::string& v) { s.allow_subresilient = parse_bool(v, "allow_subresilient"); }},
      {"calibrate_from_si2_senders",
       [](Scenario& s, const std::string& v) { s.calibrate_from_si2_senders = parse_bool(v, "calibrate_from_si2_senders"); }},
      {"ready_zero_from_si2_zero",
       [](Scenario& s, const std::string& v) { s.ready_zero_from_si2_zero = parse_bool(v, "ready_zero_from_si2_zero"); }},
  };
  return table;
}

// `t` is applied after `n` so that "auto" can see it.
inline void set_t(Scenario& s, const std::string& v) {
  s.t = v == "auto" ? (s.n >= 1 ? (s.n - 1) / 3 : 0) : parse_uint(v, "t");
}

}  // namespace detail

inline std::vector<Scenario> expand_section(const std::string& name, const boost::property_tree::ptree& section,
                                            bool allow_subresilient) {
  std::vector<std::pair<std::string, std::vector<std::string>>> axes;
  std::optional<std::vector<std::uint64_t>> seeds;
  std::vector<std::string> t_values{"auto"};
  for (const auto& [key, node] : section) {
    const auto value = node.get_value<std::string>();
    if (key == "seeds") {
      seeds = parse_seeds(value);
      continue;
    }
    auto list = split_list(value);
    if (list.empty()) throw ConfigError("[" + name + "] key '" + key + "' is empty");
    if (key == "t") {
      t_values = list;
      continue;
    }
    const auto& table = detail::setters();
    const bool known = std::any_of(table.begin(), table.end(), [&](const auto& e) { return e.first == key; });
    if (!known) throw ConfigError("[" + name + "] unknown key '" + key + "'");
    axes.emplace_back(key, std::move(list));
  }
  if (!seeds) throw ConfigError("[" + name + "] missing 'seeds' (seeds must be explicit)");
  axes.emplace_back("t", t_values);

  std::vector<Scenario> cells;
  std::vector<std::size_t> idx(axes.size(), 0);
  for (;;) {
    Scenario base;
    base.name = name;
    base.allow_subresilient = allow_subresilient;
    for (std::size_t a = 0; a < axes.size(); ++a) {
      const auto& [key, values] = axes[a];
      if (key == "t") {
        detail::set_t(base, values[idx[a]]);
        continue;
      }
      for (const auto& [k, set] : detail::setters()) {
        if (k == key) set(base, values[idx[a]]);
      }
    }
    if (allow_subresilient) base.allow_subresilient = true;
    try {
      base.validate();
    } catch (const ConfigError& e) {
      throw ConfigError("[" + name + "] " + e.what());
    }
    for (auto seed : *seeds) {
      Scenario s = base;
      s.seed = seed;
      cells.push_back(std::move(s));
    }
    std::size_t a = axes.size();
    while (a > 0) {
      --a;
      if (++idx[a] < axes[a].second.size()) break;
      idx[a] = 0;
      if (a == 0) return cells;
    }
    if (axes.empty()) return cells;
  }
}

inline Config parse_config(std::istream& in, bool allow_subresilient = false) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }
  Config cfg;
  for (const auto& [name, section] : tree) {
    if (section.empty()) throw ConfigError("top-level key '" + name + "' outside a section");
    if (name == "output") {
      for (const auto& [key, node] : section) {
        const auto v = node.get_value<std::string>();
        if (key == "csv") {
          cfg.output.csv = v;
        } else if (key == "violations") {
          cfg.output.violations = v;
        } else if (key == "trace_dir") {
          cfg.output.trace_dir = v;
        } else {
          throw ConfigError("[output] unknown key '" + key + "'");
        }
      }
      continue;
    }
    auto cells = expand_section(name, section, allow_subresilient);
    cfg.cells.insert(cfg.cells.end(), cells.begin(), cells.end());
  }
  if (cfg.cells.empty()) throw ConfigError("config defines no scenarios");
  return cfg;
}

inline Config load_config(const std::string& path, bool allow_subresilient = false) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  return parse_config(in, allow_subresilient);
}

}  // namespace ocior::harness
