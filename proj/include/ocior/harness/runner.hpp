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
#include <atomic>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "ocior/netsim/checker.hpp"
#include "ocior/netsim/explorer.hpp"
#include "ocior/netsim/replay.hpp"
#include "ocior/netsim/trace.hpp"

namespace ocior::harness {

using netsim::Metrics;
using netsim::Trace;
using netsim::Violation;
using nlohmann::json;

inline constexpr int kReportVersion = 1;
inline constexpr const char* kCsvHeader =
    "scenario,seed,protocol,n,t,l,adversary,total_bits,max_node_bits,rounds,depth,outcome";

struct CellResult {
  Scenario scenario;
  Metrics metrics;
  std::vector<Violation> violations;
  std::string outcome;
  std::optional<std::string> trace_path;
  std::uint64_t explored = 1;  // executions behind this cell (exhaustive-small explores all)

  /// Below n >= 3t + 1 findings are reported but do not fail the run.
  bool subresilient() const { return scenario.n < 3 * scenario.t + 1; }
  bool failed() const { return !subresilient() && (outcome == "violation" || outcome == "liveness-failure" || outcome == "error"); }
};

struct RunOptions {
  unsigned jobs = 1;
  std::optional<std::string> trace_dir;
};

inline std::string trace_file_name(const Scenario& s) {
  std::string name = s.name + "__" + std::string(netsim::to_string(s.protocol)) + "_n" + std::to_string(s.n) + "_t" +
                     std::to_string(s.t) + "_l" + std::to_string(s.l_bits) + "_" +
                     std::string(netsim::to_string(s.inputs)) + "_" + std::string(netsim::to_string(s.adversary));
  if (netsim::is_async(s.protocol)) {
    name += "_" + std::string(netsim::to_string(s.leader_mode)) + "_" + std::string(netsim::to_string(s.scheduler)) +
            "_B" + std::to_string(s.fairness);
  }
  name += "_s" + std::to_string(s.seed) + ".jsonl";
  for (auto& c : name) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_' && c != '.') c = '_';
  }
  return name;
}

/// Runs every choice sequence of an exhaustive-small cell and keeps the
/// first violating execution, or the first execution when all are clean.
inline Trace explore_cell(const Scenario& sc, std::uint64_t& runs, std::uint64_t limit = 0) {
  std::optional<Trace> kept;
  const auto stats = netsim::explore(
      [&](netsim::ChoiceSource& choices) {
        Trace tr = netsim::run_checked(sc, &choices);
        const bool clean = tr.violations.empty();
        if (!kept || (!clean && kept->violations.empty())) kept = std::move(tr);
        return clean;
      },
      limit);
  runs = stats.runs;
  return std::move(*kept);
}

inline CellResult run_cell(const Scenario& sc, const std::optional<std::string>& trace_dir) {
  CellResult r;
  r.scenario = sc;
  try {
    Trace tr = sc.scheduler == netsim::Policy::kExhaustiveSmall ? explore_cell(sc, r.explored) : netsim::run_checked(sc);
    r.metrics = tr.metrics;
    r.violations = tr.violations;
    r.outcome = netsim::outcome(tr);
    if (trace_dir) {
      std::filesystem::create_directories(*trace_dir);
      const auto path = std::filesystem::path(*trace_dir) / trace_file_name(sc);
      std::ofstream out(path);
      netsim::write_trace(out, tr);
      if (!out.flush()) throw std::runtime_error("cannot write trace " + path.string());
      r.trace_path = path.string();
    }
  } catch (const std::exception& e) {
    r.outcome = "error";
    r.violations.push_back({"engine-error", e.what()});
  }
  return r;
}

/// Executes every cell on a pool of `jobs` workers; results keep input order.
inline std::vector<CellResult> run_cells(const std::vector<Scenario>& cells, const RunOptions& opt) {
  if (opt.trace_dir) std::filesystem::create_directories(*opt.trace_dir);
  std::vector<CellResult> results(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) results[i] = run_cell(cells[i], opt.trace_dir);
  };
  const unsigned jobs = std::max(1U, std::min<unsigned>(opt.jobs, static_cast<unsigned>(cells.size())));
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return results;
}

inline void write_csv(std::ostream& out, const std::vector<CellResult>& results) {
  out << kCsvHeader << '\n';
  for (const auto& r : results) {
    const auto& s = r.scenario;
    out << s.name << ',' << s.seed << ',' << netsim::to_string(s.protocol) << ',' << s.n << ',' << s.t << ','
        << s.l_bits << ',' << netsim::to_string(s.adversary) << ',' << r.metrics.total_bits << ','
        << r.metrics.max_node_bits << ',' << r.metrics.rounds << ',' << r.metrics.depth << ',' << r.outcome << '\n';
  }
}

inline json violations_report(const std::vector<CellResult>& results) {
  json cells = json::array();
  std::size_t failing = 0, reported = 0;
  for (const auto& r : results) {
    if (r.violations.empty()) continue;
    json vs = json::array();
    for (const auto& v : r.violations) vs.push_back({{"property", v.property}, {"detail", v.detail}});
    json cell = {{"config", netsim::scenario_json(r.scenario)},
                 {"outcome", r.outcome},
                 {"subresilient", r.subresilient()},
                 {"explored", r.explored},
                 {"violations", vs}};
    if (r.trace_path) cell["trace"] = *r.trace_path;
    cells.push_back(cell);
    (r.failed() ? failing : reported)++;
  }
  return {{"version", kReportVersion},
          {"cells", results.size()},
          {"failing_cells", failing},
          {"reported_only_cells", reported},
          {"findings", cells}};
}

inline int exit_code(const std::vector<CellResult>& results) {
  return std::any_of(results.begin(), results.end(), [](const CellResult& r) { return r.failed(); }) ? 1 : 0;
}

}  // namespace ocior::harness
