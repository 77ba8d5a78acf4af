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

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "retrosmooth/io.hpp"
#include "retrosmooth/retrodiction.hpp"
#include "retrosmooth/scenario.hpp"

namespace retrosmooth::cli {

/// Filtered global state for one prior kind, given the past record and its filtered state.
FilteredGlobalState build_prior(const Scenario& scenario, PriorKind kind, const Record& past,
                                const DensityOperator& rho_f);

// ---- simulate ----

/// Header line, then one line per (trajectory, step). Trajectory i draws from seed_seq{seed, i}.
std::string simulate_jsonl(const Scenario& scenario, std::size_t n_trajectories, std::uint64_t seed, unsigned jobs);

/// Alice records from a simulate file, in trajectory order.
std::vector<Record> read_records_jsonl(const std::string& text, const Scenario& scenario, const std::string& source);

// ---- smooth ----

struct SmoothRow {
  Record record;
  double probability = 0.0;
  PriorKind prior = PriorKind::PF;
  std::string status = "ok";
  std::optional<DensityOperator> smoothed;
  double fidelity = 0.0;  // to the filtered state
  double purity = 0.0;
  double entropy = 0.0;
  double trace_distance = 0.0;  // 1/2 || rho_S - rho_F ||_1
};

struct PriorResidual {
  PriorKind prior = PriorKind::PF;
  double max_residual = 0.0;  // max over pasts of || sum_f p(f|past) rho_S - rho_F ||_1
  std::size_t pasts = 0;
  std::size_t failures = 0;
};

struct SmoothRun {
  std::string scenario;
  std::size_t smoothing_index = 0;
  bool enumerated = false;
  double total_probability = 0.0;
  std::vector<SmoothRow> rows;             // record-major, prior-minor
  std::vector<PriorResidual> residuals;    // enumerated runs only
};

/// With `records` null, every Alice record of length `steps` is enumerated.
SmoothRun smooth_run(const Scenario& scenario, const std::vector<Record>* records, unsigned jobs);

std::string smooth_csv(const Scenario& scenario, const SmoothRun& run);
io::json smooth_json(const Scenario& scenario, const SmoothRun& run);
std::string residuals_csv(const SmoothRun& run);

// ---- entropy-scan ----

struct ScanRow {
  std::string section;  // "prior", "theorem1", or "demo_svb"
  std::string id;
  std::string label;  // prior kind, instance shape, or demo case
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool holds = true;
};

std::vector<ScanRow> entropy_scan_scenario(const Scenario& scenario, unsigned jobs);
std::vector<ScanRow> entropy_scan_theorem1(std::size_t instances, std::uint64_t seed);
std::vector<ScanRow> entropy_scan_demo_svb();
std::string scan_csv(const std::vector<ScanRow>& rows);

// ---- classical-limit ----

struct ClassicalLimitEntry {
  std::string prior;
  double max_residual = 0.0;
  std::size_t comparisons = 0;
};

struct ClassicalLimitReport {
  std::string scenario;
  std::size_t records = 0;
  std::size_t skipped = 0;  // zero-probability records
  std::vector<ClassicalLimitEntry> entries;
  double max_residual = 0.0;
};

inline constexpr double kClassicalLimitTol = 1e-9;

/// Compares diag(rho_S) against forward-backward smoothing for every record of length 1..steps
/// and every split point.
ClassicalLimitReport classical_limit(const Scenario& scenario, unsigned jobs);
io::json classical_limit_json(const ClassicalLimitReport& report);

// ---- verify ----

struct CheckResult {
  std::string name;
  std::string scenario;
  double residual = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string detail;
};

struct VerifyOptions {
  std::uint64_t seed = 7;
  double inject_defect = 0.0;  // added to the no-jump completeness of the demo instrument
  unsigned jobs = 1;
  const Scenario* extra = nullptr;
};

std::vector<CheckResult> verify_suite(const VerifyOptions& options);
std::string format_check(const CheckResult& c);

// ---- entry point ----

/// Exit codes: 0 ok, 1 verification failure, 2 configuration error.
int run(int argc, char** argv);

}  // namespace retrosmooth::cli
