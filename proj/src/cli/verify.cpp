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
#include <random>

#include "retrosmooth/commands.hpp"
#include "retrosmooth/entropy.hpp"
#include "retrosmooth/error.hpp"
#include "retrosmooth/sampling.hpp"
#include "retrosmooth/smoothers.hpp"

namespace retrosmooth::cli {

namespace {

CheckResult check(std::string name, std::string scenario, double residual, double tol, std::string detail = {}) {
  CheckResult c{std::move(name), std::move(scenario), residual, tol, residual <= tol, std::move(detail)};
  return c;
}

CheckResult completeness_check(const Scenario& s, double inject) {
  const Eigen::Index d = s.dim();
  Matrix sum = Matrix::Zero(d, d);
  if (s.joint) {
    for (std::size_t i = 0; i < s.joint->entries().size(); ++i) {
      Matrix k = s.joint->entries()[i].kraus;
      if (i == 0) k *= std::sqrt(1.0 + inject);
      sum += k.adjoint() * k;
    }
  } else {
    for (std::size_t y = 0; y < s.alice().size(); ++y) {
      const Matrix c = s.alice().op(y).completeness();
      sum += y == 0 ? Matrix((1.0 + inject) * c) : c;
    }
  }
  const double defect = (sum - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
  return check("instrument completeness", s.name, defect, 1e-9);
}

std::vector<CheckResult> smoothing_checks(const Scenario& s, unsigned jobs) {
  std::vector<CheckResult> out;
  const SmoothRun run = smooth_run(s, nullptr, jobs);
  out.push_back(check("record probabilities sum to one", s.name, std::abs(run.total_probability - 1.0), 1e-8));

  // Criterion 1: smoothed states are density operators.
  const Instrument& alice = s.alice();
  double psd_gap = 0.0, trace_gap = 0.0;
  std::size_t states = 0, errors = 0;
  const auto records = enumerate_records(alice, s.rho0, s.steps, s.enumeration_cap);
  for (const auto& rp : records) {
    if (rp.probability <= kMinOutcomeProb) continue;
    const Record past(rp.record.begin(), rp.record.begin() + static_cast<std::ptrdiff_t>(s.smoothing_index));
    const Record future(rp.record.begin() + static_cast<std::ptrdiff_t>(s.smoothing_index), rp.record.end());
    const DensityOperator rho_f = filter(alice, s.rho0, past).state;
    const Effect retro = retrofilter(alice, future);
    for (const PriorKind k : s.priors) {
      try {
        const Matrix raw = smoothed_operator(build_prior(s, k, past, rho_f), retro);
        psd_gap = std::max(psd_gap, -herm_eig(raw).values.minCoeff());
        trace_gap = std::max(trace_gap, std::abs(raw.trace().real() - 1.0));
        ++states;
      } catch (const Error&) {
        ++errors;
      }
    }
  }
  out.push_back(check("criterion 1: smoothed states positive", s.name, psd_gap, 1e-9,
                      std::to_string(states) + " states, " + std::to_string(errors) + " errors"));
  out.push_back(check("criterion 1: smoothed states unit trace", s.name, trace_gap, 1e-10));
  if (errors > 0) out.back().passed = false;

  // Criterion 2: averaging over futures returns the filtered state.
  for (const auto& pr : run.residuals) {
    out.push_back(check("criterion 2: average returns filtered state (" + std::string(to_string(pr.prior)) + ")",
                        s.name, pr.max_residual, 1e-8, std::to_string(pr.pasts) + " pasts"));
  }

  // Bob posterior: Bayes over enumerated Bob branches.
  if (s.joint) {
    double gap = 0.0;
    for (const auto& rp : records) {
      if (rp.probability <= kMinOutcomeProb) continue;
      const Record past(rp.record.begin(), rp.record.begin() + static_cast<std::ptrdiff_t>(s.smoothing_index));
      const Record future(rp.record.begin() + static_cast<std::ptrdiff_t>(s.smoothing_index), rp.record.end());
      const Effect retro = retrofilter(alice, future);
      const BranchSet branches = enumerate_bob_branches(*s.joint, s.rho0, past);
      double total = 0.0;
      std::vector<double> joint;
      for (const auto& b : branches.branches) {
        joint.push_back((b.state * retro.matrix()).trace().real());
        total += joint.back();
      }
      for (const FilteredGlobalState& prior : {build_gw(*s.joint, s.rho0, past), build_gw_variant(*s.joint, s.rho0, past)}) {
        const auto post = bob_posterior(prior, retro);
        for (std::size_t u = 0; u < post.size(); ++u) gap = std::max(gap, std::abs(post[u].probability - joint[u] / total));
      }
    }
    out.push_back(check("bob posterior matches Bayes", s.name, gap, 1e-9));
  }

  // Sandwich bound per prior and past.
  double violation = 0.0;
  for (const ScanRow& r : entropy_scan_scenario(s, jobs)) {
    violation = std::max({violation, r.lower - r.value, r.value - r.upper});
  }
  out.push_back(check("average entropy sandwich bound", s.name, std::max(0.0, violation), 1e-9));
  return out;
}

}  // namespace

std::string format_check(const CheckResult& c) {
  std::string line = std::string(c.passed ? "PASS" : "FAIL") + "  " + c.name + " [" + c.scenario +
                     "] residual=" + io::format_double(c.residual) + " tol=" + io::format_double(c.tolerance);
  if (!c.detail.empty()) line += " (" + c.detail + ")";
  return line;
}

std::vector<CheckResult> verify_suite(const VerifyOptions& options) {
  std::vector<CheckResult> out;
  auto append = [&out](std::vector<CheckResult> more) { out.insert(out.end(), more.begin(), more.end()); };

  std::vector<Scenario> scenarios{demo_scenario()};
  if (options.extra != nullptr) scenarios.push_back(*options.extra);
  for (const Scenario& s : scenarios) {
    out.push_back(completeness_check(s, &s == &scenarios.front() ? options.inject_defect : 0.0));
    append(smoothing_checks(s, options.jobs));
  }

  // Criterion 3 on the built-in hidden Markov models.
  for (const std::size_t n : {2u, 3u}) {
    const Scenario s = parse_scenario(classical_scenario_json(n), "builtin");
    const ClassicalLimitReport r = classical_limit(s, options.jobs);
    out.push_back(check("criterion 3: classical limit", s.name, r.max_residual, kClassicalLimitTol,
                        std::to_string(r.records) + " records"));
  }

  std::mt19937_64 rng(options.seed);
  {
    double gap = 0.0;
    for (int i = 0; i < 25; ++i) {
      const Eigen::Index d_in = 2 + static_cast<Eigen::Index>(rng() % 3);
      const Eigen::Index d_out = 2 + static_cast<Eigen::Index>(rng() % 3);
      const ChannelRep channel = sampling::random_channel(d_in, d_out, 1 + static_cast<std::size_t>(d_in), rng);
      const DensityOperator gamma = sampling::random_density(d_in, rng);
      const DensityOperator image = DensityOperator::normalized(hermitian_part(channel.apply(gamma.matrix())));
      gap = std::max(gap, trace_norm(hermitian_part(petz_map(channel, gamma, image).matrix() - gamma.matrix())));
    }
    out.push_back(check("petz map fixed point", "random", gap, 1e-9));
  }
  {
    double violation = 0.0;
    for (const ScanRow& r : entropy_scan_theorem1(50, rng())) {
      violation = std::max({violation, r.lower - r.value, r.value - r.upper});
    }
    out.push_back(check("average entropy ordering", "random", std::max(0.0, violation), 1e-9));
  }
  {
    double gap = 0.0;
    for (int i = 0; i < 20; ++i) {
      const Eigen::Index d = 2 + static_cast<Eigen::Index>(rng() % 2);
      const DensityOperator gamma = sampling::random_density(d, rng);
      const FilteredGlobalState ext = sampling::random_extension(gamma, 2 + static_cast<Eigen::Index>(rng() % 3), rng);
      const LambdaMap lambda = lambda_map(ext, gamma);
      gap = std::max(gap, -herm_eig(lambda.choi()).values.minCoeff());
      const Matrix y = sampling::random_hermitian(d, rng);
      gap = std::max(gap, (lambda.apply(y) - lambda.apply_direct(y)).cwiseAbs().maxCoeff());
    }
    out.push_back(check("lambda map positivity and intertwining", "random", std::max(0.0, gap), 1e-9));
  }
  {
    double gap = 0.0;
    for (const ScanRow& r : entropy_scan_demo_svb()) {
      if (r.id != "reversal") gap = std::max(gap, std::abs(r.value - r.lower));
      if (!r.holds) gap = std::max(gap, 1.0);
    }
    out.push_back(check("qubit extension example", "builtin", gap, 1e-10));
  }
  {
    const Scenario s = demo_scenario();
    const DensityOperator rho = filter(s.alice(), s.rho0, {0, 1}).state;
    const DensityOperator back = io::density_from_json(io::parse_json_text(io::density_to_json(rho).dump(), "roundtrip"), "rho");
    out.push_back(check("density operator json round trip", s.name, (back.matrix() - rho.matrix()).cwiseAbs().maxCoeff(), 0.0));
  }
  return out;
}

}  // namespace retrosmooth::cli
