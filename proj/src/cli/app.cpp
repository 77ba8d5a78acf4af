// Copyright 2026 The retrosmooth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "retrosmooth/commands.hpp"
#include "retrosmooth/error.hpp"

namespace retrosmooth::cli {

namespace {

struct Options {
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string priors;
  unsigned jobs = 1;
  std::size_t trajectories = 100;
  bool enumerate = false;
  std::string records;
  bool demo_svb = false;
  std::size_t theorem1 = 0;
  double inject_defect = 0.0;
};

std::vector<PriorKind> parse_priors(const std::string& list) {
  std::vector<PriorKind> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(parse_prior_kind(item));
  }
  if (out.empty()) throw Error(ErrorCode::ConfigError, "--prior: empty list");
  return out;
}

Scenario resolve_scenario(const Options& o) {
  Scenario s = o.scenario.empty() ? demo_scenario() : load_scenario(o.scenario);
  if (o.scenario.empty()) apply_cap_override(s);
  if (o.seed) s.seed = *o.seed;
  if (!o.priors.empty()) {
    s.priors = parse_priors(o.priors);
    for (const PriorKind k : s.priors) {
      if ((k == PriorKind::GW || k == PriorKind::GWVariant) && !s.joint) {
        throw Error(ErrorCode::ConfigError, "--prior: '" + std::string(to_string(k)) + "' needs a joint instrument");
      }
      if (k == PriorKind::Custom && !s.custom_prior) {
        throw Error(ErrorCode::ConfigError, "--prior: 'custom' needs a custom_prior in the scenario");
      }
    }
  }
  return s;
}

std::string out_dir(const Options& o, const Scenario* s) {
  if (!o.out.empty()) return o.out;
  return s != nullptr ? s->output_dir : std::string();
}

// Writes to <dir>/<name>, or to stdout when no directory is configured.
void emit(const std::string& dir, const std::string& name, const std::string& content) {
  if (dir.empty()) {
    std::cout << content;
    return;
  }
  io::ensure_directory(dir);
  io::write_text_file(dir + "/" + name, content);
  std::cerr << "wrote " << dir << "/" << name << "\n";
}

int cmd_simulate(const Options& o) {
  const Scenario s = resolve_scenario(o);
  emit(out_dir(o, &s), "trajectories.jsonl", simulate_jsonl(s, o.trajectories, s.seed, o.jobs));
  return 0;
}

int cmd_smooth(const Options& o) {
  const Scenario s = resolve_scenario(o);
  if (o.enumerate == !o.records.empty()) {
    throw Error(ErrorCode::ConfigError, "smooth needs exactly one of --enumerate or --records <file>");
  }
  std::optional<std::vector<Record>> records;
  if (!o.records.empty()) {
    std::ifstream in(o.records);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot open " + o.records);
    std::stringstream ss;
    ss << in.rdbuf();
    records = read_records_jsonl(ss.str(), s, o.records);
  }
  const SmoothRun run = smooth_run(s, records ? &*records : nullptr, o.jobs);
  const std::string dir = out_dir(o, &s);
  emit(dir, "smooth.csv", smooth_csv(s, run));
  if (!dir.empty()) emit(dir, "smooth.json", smooth_json(s, run).dump(2) + "\n");
  int code = 0;
  if (run.enumerated) {
    if (!dir.empty()) emit(dir, "residuals.csv", residuals_csv(run));
    for (const auto& pr : run.residuals) {
      std::cerr << "criterion-2 residual " << to_string(pr.prior) << ": " << io::format_double(pr.max_residual)
                << " over " << pr.pasts << " pasts\n";
    }
    if (std::abs(run.total_probability - 1.0) > 1e-8) {
      std::cerr << "record probabilities sum to " << io::format_double(run.total_probability) << "\n";
      code = 1;
    }
  }
  return code;
}

int cmd_entropy_scan(const Options& o) {
  std::vector<ScanRow> rows;
  std::optional<Scenario> s;
  if (!o.scenario.empty() || (!o.demo_svb && o.theorem1 == 0)) {
    s = resolve_scenario(o);
    rows = entropy_scan_scenario(*s, o.jobs);
  }
  if (o.theorem1 > 0) {
    const auto sweep = entropy_scan_theorem1(o.theorem1, o.seed.value_or(s ? s->seed : 1));
    rows.insert(rows.end(), sweep.begin(), sweep.end());
  }
  if (o.demo_svb) {
    const auto demo = entropy_scan_demo_svb();
    rows.insert(rows.end(), demo.begin(), demo.end());
  }
  emit(out_dir(o, s ? &*s : nullptr), "entropy_scan.csv", scan_csv(rows));
  const bool ok = std::all_of(rows.begin(), rows.end(), [](const ScanRow& r) { return r.holds; });
  return ok ? 0 : 1;
}

int cmd_classical_limit(const Options& o) {
  std::vector<Scenario> scenarios;
  if (o.scenario.empty()) {
    for (const std::size_t n : {2u, 3u}) {
      scenarios.push_back(parse_scenario(classical_scenario_json(n), "builtin"));
      apply_cap_override(scenarios.back());
    }
  } else {
    scenarios.push_back(resolve_scenario(o));
  }
  io::json reports = io::json::array();
  bool ok = true;
  for (const Scenario& s : scenarios) {
    const ClassicalLimitReport r = classical_limit(s, o.jobs);
    ok = ok && r.max_residual <= kClassicalLimitTol;
    reports.push_back(classical_limit_json(r));
    std::cerr << s.name << ": max |diag(rho_S) - p_S| = " << io::format_double(r.max_residual) << " over "
              << r.records << " records\n";
  }
  emit(out_dir(o, scenarios.size() == 1 ? &scenarios.front() : nullptr), "classical_limit.json",
       reports.dump(2) + "\n");
  return ok ? 0 : 1;
}

int cmd_verify(const Options& o) {
  std::optional<Scenario> extra;
  if (!o.scenario.empty()) extra = resolve_scenario(o);
  VerifyOptions v;
  if (o.seed) v.seed = *o.seed;
  v.inject_defect = o.inject_defect;
  v.jobs = o.jobs;
  v.extra = extra ? &*extra : nullptr;
  const std::vector<CheckResult> checks = verify_suite(v);
  std::size_t failed = 0;
  for (const CheckResult& c : checks) {
    std::cout << format_check(c) << "\n";
    if (!c.passed) ++failed;
  }
  std::cout << (checks.size() - failed) << "/" << checks.size() << " checks passed\n";
  return failed == 0 ? 0 : 1;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Filtering, retrofiltering, and smoothing of monitored quantum systems"};
  app.require_subcommand(1);
  Options o;

  auto common = [&o](CLI::App* sub) {
    sub->add_option("--scenario", o.scenario, "Scenario JSON file (default: built-in driven-damped qubit)");
    sub->add_option("--seed", o.seed, "Random seed, overrides the scenario seed");
    sub->add_option("--out", o.out, "Output directory (default: scenario output field, else stdout)");
    sub->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
  };
  auto prior = [&o](CLI::App* sub) {
    sub->add_option("--prior", o.priors, "Comma-separated prior kinds: pf,gw,gw-variant,pf-variant,clhs,custom");
  };

  CLI::App* simulate = app.add_subcommand("simulate", "Sample measurement records");
  common(simulate);
  simulate->add_option("-n,--trajectories", o.trajectories, "Number of trajectories");

  CLI::App* smooth = app.add_subcommand("smooth", "Smoothed states for given or enumerated records");
  common(smooth);
  prior(smooth);
  smooth->add_flag("--enumerate", o.enumerate, "Enumerate every record of the scenario length");
  smooth->add_option("--records", o.records, "Trajectory file written by simulate");

  CLI::App* scan = app.add_subcommand("entropy-scan", "Average smoothed-state entropy and its bounds");
  common(scan);
  prior(scan);
  scan->add_flag("--demo-svb", o.demo_svb, "Include the two-extension qubit example");
  scan->add_option("--theorem1", o.theorem1, "Number of random extensions in the ordering sweep");

  CLI::App* limit = app.add_subcommand("classical-limit", "Compare with hidden-Markov-model smoothing");
  common(limit);

  CLI::App* verify = app.add_subcommand("verify", "Run the property suite on built-in scenarios");
  common(verify);
  verify->add_option("--inject-defect", o.inject_defect, "Completeness defect added to the demo instrument")
      ->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(o);
    if (smooth->parsed()) return cmd_smooth(o);
    if (scan->parsed()) return cmd_entropy_scan(o);
    if (limit->parsed()) return cmd_classical_limit(o);
    if (verify->parsed()) return cmd_verify(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace retrosmooth::cli
