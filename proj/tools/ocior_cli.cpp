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

// ocior: scenario runner, complexity grid and trace replay.
//
// Exit codes: 0 success, 1 violations / liveness failures / replay
// divergence, 2 invalid input (config, flags, unreadable or truncated trace).

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <thread>

#include "ocior/harness/complexity.hpp"
#include "ocior/harness/config.hpp"
#include "ocior/harness/runner.hpp"
#include "ocior/netsim/replay.hpp"

namespace {

using namespace ocior;

struct GlobalFlags {
  unsigned jobs = 0;
  std::string trace_dir;
  bool allow_subresilient = false;
};

unsigned resolve_jobs(unsigned jobs) {
  if (jobs != 0) return jobs;
  return std::max(1U, std::thread::hardware_concurrency());
}

int cmd_run(const std::string& config_path, const std::string& csv_flag, const std::string& violations_flag,
            const GlobalFlags& g) {
  harness::Config cfg;
  try {
    cfg = harness::load_config(config_path, g.allow_subresilient);
  } catch (const netsim::ConfigError& e) {
    std::cerr << "ocior: invalid config: " << e.what() << '\n';
    return 2;
  }
  harness::RunOptions opt;
  opt.jobs = resolve_jobs(g.jobs);
  if (!g.trace_dir.empty()) {
    opt.trace_dir = g.trace_dir;
  } else {
    opt.trace_dir = cfg.output.trace_dir;
  }
  const auto results = harness::run_cells(cfg.cells, opt);

  const std::string csv_path = !csv_flag.empty() ? csv_flag : cfg.output.csv.value_or("ocior_metrics.csv");
  const std::string vio_path =
      !violations_flag.empty() ? violations_flag : cfg.output.violations.value_or("ocior_violations.json");
  {
    std::ofstream csv(csv_path);
    if (!csv) {
      std::cerr << "ocior: cannot write " << csv_path << '\n';
      return 2;
    }
    harness::write_csv(csv, results);
  }
  const auto report = harness::violations_report(results);
  {
    std::ofstream vio(vio_path);
    if (!vio) {
      std::cerr << "ocior: cannot write " << vio_path << '\n';
      return 2;
    }
    vio << report.dump(2) << '\n';
  }
  const int code = harness::exit_code(results);
  std::cout << "cells=" << results.size() << " failing=" << report["failing_cells"]
            << " reported_only=" << report["reported_only_cells"] << " csv=" << csv_path
            << " violations=" << vio_path << '\n';
  for (const auto& r : results) {
    if (!r.failed()) continue;
    std::cout << "FAIL " << harness::trace_file_name(r.scenario) << ':';
    for (const auto& v : r.violations) std::cout << ' ' << v.property;
    std::cout << '\n';
  }
  return code;
}

int cmd_complexity(const std::string& protocol, const std::string& n_grid, const std::string& l_grid,
                   const std::string& out_path, const GlobalFlags& g) {
  harness::ComplexityReport rep;
  try {
    rep = harness::measure_complexity(netsim::parse_protocol(protocol), harness::parse_grid(n_grid),
                                      harness::parse_grid(l_grid), resolve_jobs(g.jobs));
  } catch (const netsim::ConfigError& e) {
    std::cerr << "ocior: " << e.what() << '\n';
    return 2;
  }
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    harness::print_complexity(out, rep);
  }
  harness::print_complexity(std::cout, rep);
  return rep.clean() ? 0 : 1;
}

int cmd_replay(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "ocior: cannot open trace " << path << '\n';
    return 2;
  }
  netsim::Trace recorded;
  try {
    recorded = netsim::read_trace(in);
  } catch (const netsim::TraceFormatError& e) {
    std::cerr << "ocior: trace parse error: " << e.what() << '\n';
    return 2;
  }
  netsim::ReplayResult r;
  try {
    r = netsim::replay(recorded);
  } catch (const netsim::ConfigError& e) {
    std::cerr << "ocior: trace config rejected: " << e.what() << '\n';
    return 2;
  }
  std::cout << "outputs=" << r.replayed.outputs.size() << " envelopes=" << r.replayed.envelopes.size()
            << " violations=" << r.replayed.violations.size() << '\n';
  for (const auto& v : r.replayed.violations) std::cout << "  " << v.property << ": " << v.detail << '\n';
  if (!r.identical) {
    std::cout << "replay DIVERGED: " << r.detail << '\n';
    return 1;
  }
  std::cout << "replay identical\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ocior: Byzantine agreement and reliable broadcast simulator"};
  app.require_subcommand(1);
  GlobalFlags g;
  app.add_option("--jobs,-j", g.jobs, "worker threads (0 = hardware concurrency)");
  app.add_option("--trace-dir", g.trace_dir, "write one JSONL trace per execution here");
  app.add_flag("--allow-subresilient", g.allow_subresilient, "accept n < 3t + 1 (findings are reported only)");

  std::string config_path, csv, violations;
  auto* run = app.add_subcommand("run", "execute every scenario cell of a config");
  run->add_option("config", config_path, "INI scenario file")->required();
  run->add_option("--csv", csv, "metrics CSV path");
  run->add_option("--violations", violations, "violation report JSON path");
  run->fallthrough();

  std::string protocol = "cool", n_grid = "4..31", l_grid = "64..16384*2", out;
  auto* cx = app.add_subcommand("complexity", "measure bits against the asymptotic envelope");
  cx->add_option("--protocol", protocol, "cool | rbc-balanced | rbc-unbalanced");
  cx->add_option("--n-grid", n_grid, "e.g. 4..31 or 4,7,10");
  cx->add_option("--l-grid", l_grid, "e.g. 64..16384*2");
  cx->add_option("--out", out, "also write the report here");
  cx->fallthrough();

  std::string trace_path;
  auto* rp = app.add_subcommand("replay", "re-execute a trace and compare byte for byte");
  rp->add_option("trace", trace_path, "JSONL trace")->required();
  rp->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (*run) return cmd_run(config_path, csv, violations, g);
  if (*cx) return cmd_complexity(protocol, n_grid, l_grid, out, g);
  return cmd_replay(trace_path);
}
