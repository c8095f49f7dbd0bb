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

// Communication measurements against the asymptotic envelopes
//   BA  (total bits):     max{n l, n t log2 t}
//   RBC (per-node bits):  max{l, n log2 n}
// over an (n, l) grid of fault-free runs. Cells with t = 0 are skipped for
// BA, where log t is undefined.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "ocior/harness/config.hpp"
#include "ocior/harness/runner.hpp"

namespace ocior::harness {

/// "4..31" (step 1), "4..31:3" (step 3), "64..16384*2" (geometric) or a
/// comma-separated list of any of these.
inline std::vector<std::uint64_t> parse_grid(const std::string& text) {
  std::vector<std::uint64_t> out;
  for (const auto& part : split_list(text)) {
    const auto dots = part.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_uint(part, "grid"));
      continue;
    }
    const auto lo = parse_uint(part.substr(0, dots), "grid");
    std::string rest = part.substr(dots + 2);
    std::uint64_t step = 1, factor = 0;
    if (auto p = rest.find(':'); p != std::string::npos) {
      step = parse_uint(rest.substr(p + 1), "grid");
      rest = rest.substr(0, p);
    } else if (auto q = rest.find('*'); q != std::string::npos) {
      factor = parse_uint(rest.substr(q + 1), "grid");
      rest = rest.substr(0, q);
    }
    const auto hi = parse_uint(rest, "grid");
    if (hi < lo || step == 0 || factor == 1 || (factor != 0 && lo == 0)) {
      throw ConfigError("grid: bad range '" + part + "'");
    }
    for (std::uint64_t v = lo; v <= hi; v = factor != 0 ? v * factor : v + step) out.push_back(v);
  }
  if (out.empty()) throw ConfigError("grid: empty");
  return out;
}

struct ComplexityCell {
  std::size_t n = 0, t = 0, l = 0;
  double measured = 0;  // total bits (BA) or max per-node bits (RBC)
  double envelope = 0;
  double ratio = 0;
  std::uint64_t leader_bits = 0;
  double mean_node_bits = 0;
  std::string outcome;
};

struct ComplexityReport {
  netsim::Protocol protocol{};
  std::vector<ComplexityCell> cells;
  std::size_t skipped = 0;
  double min_ratio = 0, max_ratio = 0;

  double spread() const { return min_ratio > 0 ? max_ratio / min_ratio : std::numeric_limits<double>::infinity(); }
  bool clean() const {
    return std::all_of(cells.begin(), cells.end(), [](const auto& c) { return c.outcome == "ok"; });
  }
};

inline double claimed_envelope(netsim::Protocol p, std::size_t n, std::size_t t, std::size_t l) {
  const double dn = static_cast<double>(n), dl = static_cast<double>(l);
  if (netsim::is_async(p)) return std::max(dl, dn * std::log2(dn));
  const double dt = static_cast<double>(t);
  return std::max(dn * dl, dn * dt * std::log2(dt));
}

inline ComplexityReport measure_complexity(netsim::Protocol protocol, const std::vector<std::uint64_t>& n_grid,
                                           const std::vector<std::uint64_t>& l_grid, unsigned jobs = 1) {
  std::vector<Scenario> cells;
  ComplexityReport rep;
  rep.protocol = protocol;
  for (auto n : n_grid) {
    for (auto l : l_grid) {
      Scenario s;
      s.name = "complexity";
      s.protocol = protocol;
      s.n = n;
      s.t = n >= 1 ? (n - 1) / 3 : 0;
      s.l_bits = l;
      s.seed = 1;
      if (s.t == 0 && !netsim::is_async(protocol)) {
        ++rep.skipped;
        continue;
      }
      cells.push_back(s);
    }
  }
  const auto results = run_cells(cells, RunOptions{jobs, std::nullopt});
  rep.min_ratio = std::numeric_limits<double>::infinity();
  for (const auto& r : results) {
    ComplexityCell c;
    c.n = r.scenario.n;
    c.t = r.scenario.t;
    c.l = r.scenario.l_bits;
    c.measured = static_cast<double>(netsim::is_async(protocol) ? r.metrics.max_node_bits : r.metrics.total_bits);
    c.envelope = claimed_envelope(protocol, c.n, c.t, c.l);
    c.ratio = c.measured / c.envelope;
    c.leader_bits = r.metrics.leader_bits;
    c.mean_node_bits = r.metrics.mean_node_bits;
    c.outcome = r.outcome;
    rep.min_ratio = std::min(rep.min_ratio, c.ratio);
    rep.max_ratio = std::max(rep.max_ratio, c.ratio);
    rep.cells.push_back(c);
  }
  if (rep.cells.empty()) rep.min_ratio = 0;
  return rep;
}

inline void print_complexity(std::ostream& out, const ComplexityReport& rep) {
  const bool async = netsim::is_async(rep.protocol);
  out << "# protocol=" << netsim::to_string(rep.protocol)
      << (async ? " measured=max per-node bits envelope=max{l, n log2 n}"
                : " measured=total bits envelope=max{n l, n t log2 t}")
      << '\n';
  out << "n,t,l,measured_bits,envelope,ratio" << (async ? ",leader_bits,mean_node_bits" : "") << ",outcome\n";
  for (const auto& c : rep.cells) {
    out << c.n << ',' << c.t << ',' << c.l << ',' << static_cast<std::uint64_t>(c.measured) << ','
        << c.envelope << ',' << c.ratio;
    if (async) out << ',' << c.leader_bits << ',' << c.mean_node_bits;
    out << ',' << c.outcome << '\n';
  }
  out << "# cells=" << rep.cells.size() << " skipped=" << rep.skipped << " min_ratio=" << rep.min_ratio
      << " max_ratio=" << rep.max_ratio << " spread=" << rep.spread() << '\n';
}

}  // namespace ocior::harness
