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

#include "retrosmooth/commands.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <gtest/gtest.h>

#include "retrosmooth/error.hpp"
#include "retrosmooth/io.hpp"
#include "retrosmooth/scenario.hpp"
#include "test_helpers.hpp"

using namespace retrosmooth;
using namespace retrosmooth::cli;
using retrosmooth::testing::max_abs_diff;

namespace {

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

io::json demo_with(const std::string& key, const io::json& value) {
  io::json j = demo_scenario_json();
  j[key] = value;
  return j;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::InvalidMatrix;
}

int run_args(std::vector<std::string> args) {
  args.insert(args.begin(), "retrosmooth");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return run(static_cast<int>(argv.size()), argv.data());
}

std::filesystem::path temp_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("retrosmooth_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST(Io, MatrixJsonRoundTripIsExact) {
  Matrix m(2, 2);
  m << Complex(0.1, 0.0), Complex(1.0 / 3.0, -2.0 / 7.0), Complex(1.0 / 3.0, 2.0 / 7.0), Complex(0.9, 0.0);
  const io::json j = io::matrix_to_json(m);
  EXPECT_EQ(j.at("dim"), 2);
  const Matrix back = io::matrix_from_json(io::parse_json_text(j.dump(), "test"), "m");
  EXPECT_EQ(back, m);
}

TEST(Io, DensityValidationOnRead) {
  const io::json bad{{"real", {{0.6, 0.0}, {0.0, 0.6}}}};
  EXPECT_EQ(code_of([&] { io::density_from_json(bad, "rho"); }), ErrorCode::ConfigError);
  const io::json ragged{{"real", {{1.0, 0.0}, {0.0}}}};
  EXPECT_EQ(code_of([&] { io::matrix_from_json(ragged, "m"); }), ErrorCode::ConfigError);
}

TEST(Io, FormatDoubleRoundTrips) {
  for (const double x : {0.1, 1.0 / 3.0, 2.0 / 7.0 * 1e-300, 123456789.123456789}) {
    EXPECT_EQ(std::strtod(io::format_double(x).c_str(), nullptr), x);
  }
  EXPECT_EQ(io::format_double(0.5), "0.5");
}

TEST(Io, SyntaxErrorsReportLineAndColumn) {
  try {
    io::parse_json_text("{\n  \"a\": 1,,\n}", "cfg.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConfigError);
    EXPECT_NE(std::string(e.what()).find("cfg.json:2:"), std::string::npos) << e.what();
  }
}

TEST(ScenarioParsing, BuiltinMatchesShippedFile) {
  const Scenario file = parse_scenario(io::read_json_file(std::string(RETROSMOOTH_SOURCE_DIR) + "/scenarios/driven_damped_qubit.json"));
  const Scenario builtin = demo_scenario();
  EXPECT_EQ(file.name, builtin.name);
  EXPECT_EQ(file.steps, 4u);
  EXPECT_EQ(file.smoothing_index, 2u);
  EXPECT_EQ(file.priors, builtin.priors);
  ASSERT_EQ(file.joint->entries().size(), builtin.joint->entries().size());
  for (std::size_t i = 0; i < file.joint->entries().size(); ++i) {
    EXPECT_EQ(file.joint->entries()[i].kraus, builtin.joint->entries()[i].kraus);
  }
}

TEST(ScenarioParsing, FieldDiagnostics) {
  io::json j = demo_scenario_json();
  j["system"]["channels"][0]["efficiency"] = "high";
  try {
    parse_scenario(j, "cfg");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConfigError);
    EXPECT_NE(std::string(e.what()).find("cfg.system.channels[0].efficiency"), std::string::npos) << e.what();
  }
  EXPECT_EQ(code_of([&] { parse_scenario(demo_with("smoothing_index", 9)); }), ErrorCode::ConfigError);
  EXPECT_EQ(code_of([&] { parse_scenario(demo_with("rho0", "excited-ish")); }), ErrorCode::ConfigError);
  EXPECT_EQ(code_of([&] { parse_scenario(demo_with("priors", {"custom"})); }), ErrorCode::ConfigError);
  io::json coarse = demo_scenario_json();
  coarse["system"]["dt"] = 5.0;
  EXPECT_EQ(code_of([&] { parse_scenario(coarse); }), ErrorCode::ConfigError);
}

TEST(ScenarioParsing, NamedStates) {
  EXPECT_LT(max_abs_diff(parse_scenario(demo_with("rho0", "ground")).rho0.matrix(),
                         retrosmooth::testing::diag({1.0, 0.0})),
            1e-15);
  const Matrix plus = parse_scenario(demo_with("rho0", "plus")).rho0.matrix();
  EXPECT_LT(max_abs_diff(plus, Matrix::Constant(2, 2, 0.5)), 1e-15);
}

TEST(ScenarioParsing, CapOverrideFromEnvironment) {
  Scenario s = demo_scenario();
  ::setenv("RETROSMOOTH_CAP", "8", 1);
  apply_cap_override(s);
  ::unsetenv("RETROSMOOTH_CAP");
  EXPECT_EQ(s.enumeration_cap, 8u);
  EXPECT_EQ(code_of([&] { smooth_run(s, nullptr, 1); }), ErrorCode::EnumerationTooLarge);
  ::setenv("RETROSMOOTH_CAP", "lots", 1);
  EXPECT_EQ(code_of([&] { apply_cap_override(s); }), ErrorCode::ConfigError);
  ::unsetenv("RETROSMOOTH_CAP");
}

TEST(Simulate, ZeroTrajectoriesGivesHeaderOnly) {
  const std::string out = simulate_jsonl(demo_scenario(), 0, 1, 1);
  EXPECT_EQ(count_lines(out), 1u);
  EXPECT_EQ(io::parse_json_text(out, "h").at("type"), "header");
}

TEST(Simulate, SingleOutcomeInstrumentGivesIdenticalRecords) {
  io::json j{{"name", "unitary"},
             {"system", {{"type", "instrument"}, {"outcomes", {{{"label", "only"}, {"kraus", {{{"real", {{0.0, 1.0}, {1.0, 0.0}}}}}}}}}}},
             {"steps", 3}};
  const Scenario s = parse_scenario(j);
  const std::vector<Record> records = read_records_jsonl(simulate_jsonl(s, 5, 9, 1), s, "mem");
  ASSERT_EQ(records.size(), 5u);
  for (const Record& r : records) EXPECT_EQ(r, (Record{0, 0, 0}));
}

TEST(Simulate, DeterministicAcrossSeedsAndJobs) {
  const Scenario s = demo_scenario();
  const std::string a = simulate_jsonl(s, 50, 42, 1);
  EXPECT_EQ(a, simulate_jsonl(s, 50, 42, 3));
  EXPECT_NE(a, simulate_jsonl(s, 50, 43, 1));
}

TEST(Simulate, FrequenciesMatchEnumeration) {
  // A coarser step so that jump records are frequent enough to test.
  io::json j = demo_scenario_json();
  j["system"]["dt"] = 0.08;
  j["system"]["channels"][0]["operator"]["real"] = {{0.0, std::sqrt(2.0)}, {0.0, 0.0}};
  const Scenario s = parse_scenario(j);
  constexpr std::size_t kSamples = 40000;
  const std::vector<Record> records = read_records_jsonl(simulate_jsonl(s, kSamples, 5, 2), s, "mem");
  std::map<Record, std::size_t> counts;
  for (const Record& r : records) ++counts[r];
  for (const auto& rp : enumerate_records(s.alice(), s.rho0, s.steps)) {
    const double sigma = std::sqrt(rp.probability * (1.0 - rp.probability) / kSamples);
    const double freq = static_cast<double>(counts[rp.record]) / kSamples;
    EXPECT_LE(std::abs(freq - rp.probability), 3.0 * sigma + 1e-12);
  }
}

TEST(Simulate, RecordFileErrors) {
  const Scenario s = demo_scenario();
  EXPECT_EQ(code_of([&] { read_records_jsonl("{\"trajectory\":0,\"step\":0,\"alice\":\"boom\"}\n", s, "f"); }),
            ErrorCode::ConfigError);
  EXPECT_EQ(code_of([&] { read_records_jsonl("{\"trajectory\":0,\"step\":1,\"alice\":\"0\"}\n", s, "f"); }),
            ErrorCode::ConfigError);
}

TEST(Smooth, ClhsReturnsFilteredStateEverywhere) {
  Scenario s = demo_scenario();
  s.priors = {PriorKind::CLHS};
  const SmoothRun run = smooth_run(s, nullptr, 1);
  for (const SmoothRow& r : run.rows) {
    if (r.status == "ok") EXPECT_LT(r.trace_distance, 1e-10);
  }
  ASSERT_EQ(run.residuals.size(), 1u);
  EXPECT_LT(run.residuals[0].max_residual, 1e-10);
}

TEST(Smooth, EnumeratedResidualsAndProbabilities) {
  const SmoothRun run = smooth_run(demo_scenario(), nullptr, 2);
  EXPECT_NEAR(run.total_probability, 1.0, 1e-8);
  for (const auto& pr : run.residuals) EXPECT_LT(pr.max_residual, 1e-8) << to_string(pr.prior);
  for (const SmoothRow& r : run.rows) {
    if (r.probability > 1e-14) EXPECT_EQ(r.status, "ok");
    else EXPECT_EQ(r.status, "ZeroProbabilityRecord");
  }
}

TEST(Smooth, GwAndGwVariantAgreeOnPureInitialState) {
  Scenario s = parse_scenario(demo_with("rho0", "plus"));
  s.priors = {PriorKind::GW, PriorKind::GWVariant};
  const SmoothRun run = smooth_run(s, nullptr, 1);
  for (std::size_t i = 0; i + 1 < run.rows.size(); i += 2) {
    ASSERT_EQ(run.rows[i].status, run.rows[i + 1].status);
    if (run.rows[i].smoothed) {
      EXPECT_LT(max_abs_diff(run.rows[i].smoothed->matrix(), run.rows[i + 1].smoothed->matrix()), 1e-9);
    }
  }
}

TEST(Smooth, OutputsAreDeterministicAndReReadable) {
  const Scenario s = demo_scenario();
  const SmoothRun a = smooth_run(s, nullptr, 1);
  const SmoothRun b = smooth_run(s, nullptr, 4);
  EXPECT_EQ(smooth_csv(s, a), smooth_csv(s, b));
  EXPECT_EQ(smooth_json(s, a).dump(), smooth_json(s, b).dump());
  const io::json j = io::parse_json_text(smooth_json(s, a).dump(), "mem");
  for (const auto& row : j.at("rows")) {
    if (!row.at("rho_s").is_null()) EXPECT_NO_THROW(io::density_from_json(row.at("rho_s"), "rho_s"));
  }
}

TEST(Smooth, RecordsFromSimulateFile) {
  const Scenario s = demo_scenario();
  const std::vector<Record> records = read_records_jsonl(simulate_jsonl(s, 10, 3, 1), s, "mem");
  const SmoothRun run = smooth_run(s, &records, 1);
  EXPECT_FALSE(run.enumerated);
  EXPECT_EQ(run.rows.size(), 10 * s.priors.size());
  for (const SmoothRow& r : run.rows) EXPECT_EQ(r.status, "ok");
}

TEST(Smooth, CustomPriorIsRetargetedPerPast) {
  const Scenario s = parse_scenario(io::read_json_file(std::string(RETROSMOOTH_SOURCE_DIR) + "/scenarios/dephased_readout.json"));
  const SmoothRun run = smooth_run(s, nullptr, 1);
  for (const auto& pr : run.residuals) {
    EXPECT_LT(pr.max_residual, 1e-8);
    EXPECT_EQ(pr.failures, 0u);
  }
}

TEST(EntropyScan, ClhsSaturatesAndPfIsBelowCustomExtensions) {
  const std::vector<ScanRow> rows = entropy_scan_scenario(demo_scenario(), 1);
  ASSERT_FALSE(rows.empty());
  for (const ScanRow& r : rows) {
    EXPECT_TRUE(r.holds);
    if (r.label == "clhs") EXPECT_NEAR(r.value, r.upper, 1e-10);
  }
  for (const ScanRow& r : entropy_scan_theorem1(30, 3)) {
    EXPECT_TRUE(r.holds);
    EXPECT_LE(r.lower, r.value + 1e-9);
  }
}

TEST(EntropyScan, DemoValues) {
  const std::vector<ScanRow> rows = entropy_scan_demo_svb();
  ASSERT_EQ(rows.size(), 5u);
  for (const ScanRow& r : rows) EXPECT_TRUE(r.holds) << r.id;
  EXPECT_NEAR(rows[1].value, std::log(2.0), 1e-10);
  const std::string csv = scan_csv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "section,id,label,value,lower,upper,margin_lower,margin_upper,holds");
}

TEST(ClassicalLimit, BuiltinModels) {
  for (const std::size_t n : {2u, 3u}) {
    const ClassicalLimitReport r = classical_limit(parse_scenario(classical_scenario_json(n)), 2);
    EXPECT_LT(r.max_residual, 1e-9);
    EXPECT_GT(r.records, 0u);
  }
}

TEST(ClassicalLimit, IdentityDynamicsReturnsPrior) {
  io::json j{{"name", "frozen"},
             {"system", {{"type", "classical"}, {"transition", {{1.0, 0.0}, {0.0, 1.0}}},
                         {"likelihood", {{0.5, 0.5}, {0.5, 0.5}}}, {"prior", {0.3, 0.7}}}},
             {"steps", 3}};
  const Scenario s = parse_scenario(j);
  const ClassicalLimitReport r = classical_limit(s, 1);
  EXPECT_LT(r.max_residual, 1e-12);
  const SmoothRun run = smooth_run(s, nullptr, 1);
  for (const SmoothRow& row : run.rows) {
    EXPECT_LT(max_abs_diff(row.smoothed->matrix(), retrosmooth::testing::diag({0.3, 0.7})), 1e-12);
  }
}

TEST(ClassicalLimit, DeltaPriorWithNoiselessReadout) {
  io::json j{{"name", "delta"},
             {"system", {{"type", "classical"}, {"transition", {{1.0, 0.0}, {0.0, 1.0}}},
                         {"likelihood", {{1.0, 0.0}, {0.0, 1.0}}}, {"prior", {0.0, 1.0}}}},
             {"steps", 3}};
  const Scenario s = parse_scenario(j);
  const ClassicalLimitReport r = classical_limit(s, 1);
  EXPECT_LT(r.max_residual, 1e-12);
  EXPECT_GT(r.skipped, 0u);
}

TEST(ClassicalLimit, RejectsCoherentInstruments) {
  EXPECT_EQ(code_of([] { classical_limit(demo_scenario(), 1); }), ErrorCode::NotClassicalLimit);
  const double h = 1.0 / std::sqrt(2.0);
  io::json j{{"name", "hadamard"},
             {"system", {{"type", "instrument"}, {"diagonal", true},
                         {"outcomes", {{{"label", "h"}, {"kraus", {{{"real", {{h, h}, {h, -h}}}}}}}}}}},
             {"rho0", "ground"},
             {"steps", 2}};
  EXPECT_EQ(code_of([&] { parse_scenario(j); }), ErrorCode::ConfigError);
  io::json coherent = j;
  coherent["system"].erase("diagonal");
  const Scenario s = parse_scenario(coherent);
  EXPECT_EQ(code_of([&] { classical_model_from_instrument(s.alice()); }), ErrorCode::NotClassicalLimit);
  EXPECT_EQ(code_of([&] { classical_limit(s, 1); }), ErrorCode::NotClassicalLimit);
}

TEST(Verify, CleanRunPasses) {
  const std::vector<CheckResult> checks = verify_suite({});
  for (const CheckResult& c : checks) EXPECT_TRUE(c.passed) << format_check(c);
  bool saw_c1 = false, saw_c2 = false, saw_c3 = false;
  for (const CheckResult& c : checks) {
    saw_c1 = saw_c1 || c.name.rfind("criterion 1", 0) == 0;
    saw_c2 = saw_c2 || c.name.rfind("criterion 2", 0) == 0;
    saw_c3 = saw_c3 || c.name.rfind("criterion 3", 0) == 0;
  }
  EXPECT_TRUE(saw_c1 && saw_c2 && saw_c3);
}

TEST(Verify, InjectedDefectFailsInstrumentCheck) {
  VerifyOptions v;
  v.inject_defect = 1e-3;
  const std::vector<CheckResult> checks = verify_suite(v);
  const auto it = std::find_if(checks.begin(), checks.end(), [](const CheckResult& c) { return !c.passed; });
  ASSERT_NE(it, checks.end());
  EXPECT_EQ(it->name, "instrument completeness");
  EXPECT_EQ(it->scenario, "driven-damped-qubit");
  EXPECT_NEAR(it->residual, 1e-3, 1e-9);
}

TEST(Run, ExitCodes) {
  EXPECT_EQ(run_args({"verify"}), 0);
  EXPECT_EQ(run_args({"verify", "--inject-defect", "1e-3"}), 1);
  EXPECT_EQ(run_args({"smooth"}), 2);
  EXPECT_EQ(run_args({"smooth", "--enumerate", "--scenario", "/nonexistent.json"}), 2);
  EXPECT_EQ(run_args({"smooth", "--enumerate", "--prior", "nonsense"}), 2);
  EXPECT_EQ(run_args({"bogus"}), 2);
}

TEST(Run, WritesByteIdenticalOutputs) {
  const auto a = temp_dir("a");
  const auto b = temp_dir("b");
  ASSERT_EQ(run_args({"smooth", "--enumerate", "--out", a.string(), "--jobs", "1"}), 0);
  ASSERT_EQ(run_args({"smooth", "--enumerate", "--out", b.string(), "--jobs", "3"}), 0);
  for (const char* name : {"smooth.csv", "smooth.json", "residuals.csv"}) {
    std::ifstream fa(a / name), fb(b / name);
    std::stringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    EXPECT_FALSE(sa.str().empty());
    EXPECT_EQ(sa.str(), sb.str()) << name;
  }
  std::filesystem::remove_all(a);
  std::filesystem::remove_all(b);
}
