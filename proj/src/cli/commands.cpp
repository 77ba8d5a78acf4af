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

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "retrosmooth/entropy.hpp"
#include "retrosmooth/error.hpp"
#include "retrosmooth/parallel.hpp"
#include "retrosmooth/sampling.hpp"
#include "retrosmooth/smoothers.hpp"

namespace retrosmooth::cli {

namespace {

using io::json;

Record slice(const Record& r, std::size_t from, std::size_t to) {
  return Record(r.begin() + static_cast<std::ptrdiff_t>(from), r.begin() + static_cast<std::ptrdiff_t>(to));
}

std::string record_string(const Instrument& inst, const Record& r) { return io::join(inst.to_labels(r), " "); }

json labels_json(const Instrument& inst, const Record& r) {
  json out = json::array();
  for (const auto& l : inst.to_labels(r)) out.push_back(l);
  return out;
}

// Groups consecutive records sharing the same length-t prefix.
struct PastGroup {
  Record past;
  std::vector<std::size_t> members;
};

std::vector<PastGroup> group_by_past(const std::vector<Record>& records, std::size_t t) {
  std::vector<PastGroup> groups;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const Record past = slice(records[i], 0, t);
    if (groups.empty() || groups.back().past != past) groups.push_back({past, {}});
    groups.back().members.push_back(i);
  }
  return groups;
}

}  // namespace

FilteredGlobalState build_prior(const Scenario& s, PriorKind kind, const Record& past, const DensityOperator& rho_f) {
  const BranchOptions options{s.enumeration_cap, 0.0};
  switch (kind) {
    case PriorKind::PF: return build_pf(rho_f);
    case PriorKind::GW: return build_gw(*s.joint, s.rho0, past, options);
    case PriorKind::GWVariant: return build_gw_variant(*s.joint, s.rho0, past, options);
    case PriorKind::PFVariant: return build_pf_variant(s.alice(), s.rho0, past);
    case PriorKind::CLHS: return build_clhs(rho_f);
    case PriorKind::Custom:
      if (!s.custom_prior) throw Error(ErrorCode::ConfigError, "prior 'custom' needs a custom_prior field");
      return correct_marginal(s.custom_prior->state, s.custom_prior->dims, rho_f, PriorKind::Custom);
  }
  throw Error(ErrorCode::ConfigError, "unknown prior kind");
}

std::string simulate_jsonl(const Scenario& s, std::size_t n, std::uint64_t seed, unsigned jobs) {
  const Instrument& alice = s.alice();
  json header{{"type", "header"},       {"scenario", s.name},         {"seed", seed},
              {"steps", s.steps},       {"n_trajectories", n},        {"alice_labels", alice.labels()},
              {"bob_labels", s.joint ? json(s.joint->bob_labels()) : json(nullptr)}};
  const auto blocks = parallel_map<std::string>(n, jobs, [&](std::size_t i) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(static_cast<std::uint64_t>(i) >> 32)};
    std::mt19937_64 rng(seq);
    std::string out;
    if (s.joint) {
      const JointRecord r = sample_joint_record(*s.joint, s.rho0, s.steps, rng);
      for (std::size_t k = 0; k < s.steps; ++k) {
        out += json{{"trajectory", i},
                    {"step", k},
                    {"alice", s.joint->alice_labels()[r.alice[k]]},
                    {"bob", s.joint->bob_labels()[r.bob[k]]}}
                   .dump();
        out += '\n';
      }
    } else {
      const SampledRecord r = sample_record(alice, s.rho0, s.steps, rng);
      for (std::size_t k = 0; k < s.steps; ++k) {
        out += json{{"trajectory", i}, {"step", k}, {"alice", alice.labels()[r.record[k]]}, {"bob", nullptr}}.dump();
        out += '\n';
      }
    }
    return out;
  });
  std::string out = header.dump() + "\n";
  for (const auto& b : blocks) out += b;
  return out;
}

std::vector<Record> read_records_jsonl(const std::string& text, const Scenario& s, const std::string& source) {
  std::map<std::uint64_t, std::map<std::uint64_t, std::size_t>> by_trajectory;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = source + ":" + std::to_string(line_no);
    const json j = io::parse_json_text(line, where);
    if (j.contains("type") && j.at("type") == "header") continue;
    if (!j.contains("trajectory") || !j.contains("step") || !j.contains("alice") || !j.at("alice").is_string() ||
        !j.at("trajectory").is_number_unsigned() || !j.at("step").is_number_unsigned()) {
      throw Error(ErrorCode::ConfigError, where + ": expected trajectory, step, and alice fields");
    }
    std::size_t y = 0;
    try {
      y = s.alice().index_of(j.at("alice").get<std::string>());
    } catch (const Error& e) {
      throw Error(ErrorCode::ConfigError, where + ": " + e.what());
    }
    auto& steps = by_trajectory[j.at("trajectory").get<std::uint64_t>()];
    if (!steps.emplace(j.at("step").get<std::uint64_t>(), y).second) {
      throw Error(ErrorCode::ConfigError, where + ": duplicate step");
    }
  }
  std::vector<Record> out;
  for (const auto& [id, steps] : by_trajectory) {
    Record r;
    for (const auto& [k, y] : steps) {
      if (k != r.size()) throw Error(ErrorCode::ConfigError, source + ": trajectory " + std::to_string(id) + " skips a step");
      r.push_back(y);
    }
    if (r.size() < s.smoothing_index) {
      throw Error(ErrorCode::ConfigError, source + ": trajectory " + std::to_string(id) + " is shorter than the smoothing index");
    }
    out.push_back(std::move(r));
  }
  return out;
}

SmoothRun smooth_run(const Scenario& s, const std::vector<Record>* given, unsigned jobs) {
  const Instrument& alice = s.alice();
  const std::size_t t = s.smoothing_index;
  SmoothRun run;
  run.scenario = s.name;
  run.smoothing_index = t;
  run.enumerated = given == nullptr;

  std::vector<Record> records;
  std::vector<double> probs;
  if (given == nullptr) {
    for (auto& rp : enumerate_records(alice, s.rho0, s.steps, s.enumeration_cap)) {
      records.push_back(std::move(rp.record));
      probs.push_back(rp.probability);
    }
  } else {
    records = *given;
    for (const Record& r : records) {
      try {
        probs.push_back(std::exp(filter(alice, s.rho0, r).log_prob));
      } catch (const Error&) {
        probs.push_back(0.0);
      }
    }
  }
  for (const double p : probs) run.total_probability += p;

  const std::vector<PastGroup> groups = group_by_past(records, t);
  const std::size_t n_priors = s.priors.size();

  struct GroupOut {
    std::vector<SmoothRow> rows;     // member-major, prior-minor
    std::vector<double> residual;    // per prior; negative when not computable
    std::vector<std::size_t> failures;
  };
  const auto outs = parallel_map<GroupOut>(groups.size(), jobs, [&](std::size_t gi) {
    const PastGroup& g = groups[gi];
    GroupOut out;
    out.rows.resize(g.members.size() * n_priors);
    out.residual.assign(n_priors, -1.0);
    out.failures.assign(n_priors, 0);
    for (std::size_t m = 0; m < g.members.size(); ++m) {
      for (std::size_t k = 0; k < n_priors; ++k) {
        SmoothRow& row = out.rows[m * n_priors + k];
        row.record = records[g.members[m]];
        row.probability = probs[g.members[m]];
        row.prior = s.priors[k];
      }
    }
    std::optional<FilterResult> filtered;
    std::string filter_status;
    try {
      filtered = filter(alice, s.rho0, g.past);
    } catch (const Error& e) {
      filter_status = std::string(to_string(e.code()));
    }
    for (std::size_t k = 0; k < n_priors; ++k) {
      std::optional<FilteredGlobalState> prior;
      std::string status = filter_status;
      if (filtered) {
        try {
          prior = build_prior(s, s.priors[k], g.past, filtered->state);
        } catch (const Error& e) {
          status = std::string(to_string(e.code()));
        }
      }
      Matrix average = Matrix::Zero(s.dim(), s.dim());
      for (std::size_t m = 0; m < g.members.size(); ++m) {
        SmoothRow& row = out.rows[m * n_priors + k];
        if (!prior) {
          row.status = status;
          ++out.failures[k];
          continue;
        }
        const Record& r = records[g.members[m]];
        const Effect retro = retrofilter(alice, slice(r, t, r.size()));
        try {
          const Matrix raw = smoothed_operator(*prior, retro);
          const double weight = (filtered->state.matrix() * retro.matrix()).trace().real();
          average += weight * raw;
          row.smoothed = DensityOperator(raw);
          row.fidelity = fidelity(*row.smoothed, filtered->state);
          row.purity = purity(*row.smoothed);
          row.entropy = entropy_vn(*row.smoothed);
          row.trace_distance = 0.5 * trace_norm(hermitian_part(raw - filtered->state.matrix()));
        } catch (const Error& e) {
          row.status = std::string(to_string(e.code()));
          ++out.failures[k];
        }
      }
      if (prior) out.residual[k] = trace_norm(hermitian_part(average - filtered->state.matrix()));
    }
    return out;
  });

  run.rows.resize(records.size() * n_priors);
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    for (std::size_t m = 0; m < groups[gi].members.size(); ++m) {
      for (std::size_t k = 0; k < n_priors; ++k) {
        run.rows[groups[gi].members[m] * n_priors + k] = outs[gi].rows[m * n_priors + k];
      }
    }
  }
  if (run.enumerated) {
    for (std::size_t k = 0; k < n_priors; ++k) {
      PriorResidual pr;
      pr.prior = s.priors[k];
      for (const auto& o : outs) {
        if (o.residual[k] >= 0.0) {
          pr.max_residual = std::max(pr.max_residual, o.residual[k]);
          ++pr.pasts;
        }
        pr.failures += o.failures[k];
      }
      run.residuals.push_back(pr);
    }
  }
  return run;
}

std::string smooth_csv(const Scenario& s, const SmoothRun& run) {
  std::string out = "record,probability,prior,t,status,fidelity_to_filtered,purity,entropy,trace_distance_to_filtered\n";
  for (const SmoothRow& r : run.rows) {
    out += record_string(s.alice(), r.record) + "," + io::format_double(r.probability) + "," +
           std::string(to_string(r.prior)) + "," + std::to_string(run.smoothing_index) + "," + r.status;
    if (r.smoothed) {
      out += "," + io::format_double(r.fidelity) + "," + io::format_double(r.purity) + "," +
             io::format_double(r.entropy) + "," + io::format_double(r.trace_distance);
    } else {
      out += ",,,,";
    }
    out += "\n";
  }
  return out;
}

json smooth_json(const Scenario& s, const SmoothRun& run) {
  json rows = json::array();
  for (const SmoothRow& r : run.rows) {
    json row{{"record", labels_json(s.alice(), r.record)},
             {"probability", r.probability},
             {"prior", to_string(r.prior)},
             {"status", r.status}};
    if (r.smoothed) {
      row["rho_s"] = io::density_to_json(*r.smoothed);
      row["fidelity_to_filtered"] = r.fidelity;
      row["purity"] = r.purity;
      row["entropy"] = r.entropy;
      row["trace_distance_to_filtered"] = r.trace_distance;
    } else {
      row["rho_s"] = nullptr;
    }
    rows.push_back(std::move(row));
  }
  json residuals = json::array();
  for (const auto& pr : run.residuals) {
    residuals.push_back(
        {{"prior", to_string(pr.prior)}, {"max_residual", pr.max_residual}, {"pasts", pr.pasts}, {"failures", pr.failures}});
  }
  return json{{"scenario", run.scenario},
              {"smoothing_index", run.smoothing_index},
              {"enumerated", run.enumerated},
              {"total_probability", run.total_probability},
              {"rows", std::move(rows)},
              {"residuals", std::move(residuals)}};
}

std::string residuals_csv(const SmoothRun& run) {
  std::string out = "prior,max_residual,pasts,failures\n";
  for (const auto& pr : run.residuals) {
    out += std::string(to_string(pr.prior)) + "," + io::format_double(pr.max_residual) + "," +
           std::to_string(pr.pasts) + "," + std::to_string(pr.failures) + "\n";
  }
  return out;
}

std::vector<ScanRow> entropy_scan_scenario(const Scenario& s, unsigned jobs) {
  const Instrument& alice = s.alice();
  const std::size_t t = s.smoothing_index;
  const auto pasts = enumerate_records(alice, s.rho0, t, s.enumeration_cap);
  check_enumeration_size(alice.size(), s.steps - t, s.enumeration_cap);
  const auto per_past = parallel_map<std::vector<ScanRow>>(pasts.size(), jobs, [&](std::size_t i) {
    std::vector<ScanRow> rows;
    if (pasts[i].probability <= kMinOutcomeProb) return rows;
    const Record& past = pasts[i].record;
    const DensityOperator rho_f = filter(alice, s.rho0, past).state;
    const auto futures = enumerate_records(alice, rho_f, s.steps - t, s.enumeration_cap);
    std::vector<double> probs;
    std::vector<std::optional<Effect>> effects;
    for (const auto& f : futures) {
      probs.push_back(f.probability);
      effects.push_back(f.probability > kMinOutcomeProb ? std::optional<Effect>(retrofilter(alice, f.record))
                                                        : std::nullopt);
    }
    const std::string id = past.empty() ? "-" : record_string(alice, past);
    for (const PriorKind k : s.priors) {
      const FilteredGlobalState prior = build_prior(s, k, past, rho_f);
      double avg = 0.0;
      for (std::size_t f = 0; f < futures.size(); ++f) {
        if (effects[f]) avg += probs[f] * entropy_vn(generalized_smooth(prior, *effects[f]));
      }
      const SandwichBound b = sandwich_bound(rho_f, probs, avg);
      rows.push_back({"prior", id, std::string(to_string(k)), avg, b.lower, b.upper, b.holds});
    }
    return rows;
  });
  std::vector<ScanRow> out;
  for (const auto& rows : per_past) out.insert(out.end(), rows.begin(), rows.end());
  return out;
}

std::vector<ScanRow> entropy_scan_theorem1(std::size_t instances, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<ScanRow> out;
  for (std::size_t i = 0; i < instances; ++i) {
    const Eigen::Index dq = 2 + static_cast<Eigen::Index>(rng() % 2);
    const Eigen::Index da = 2 + static_cast<Eigen::Index>(rng() % 3);
    const std::size_t n_eff = 2 + static_cast<std::size_t>(rng() % 3);
    const DensityOperator gamma = sampling::random_density(dq, rng);
    const FilteredGlobalState ext = sampling::random_extension(gamma, da, rng);
    const POVM povm(sampling::random_povm(dq, n_eff, rng));
    const Theorem1Report r = theorem1_check(gamma, ext, povm);
    out.push_back({"theorem1", std::to_string(i),
                   "dQ=" + std::to_string(dq) + ";dA=" + std::to_string(da) + ";effects=" + std::to_string(n_eff),
                   r.avg_extension, r.avg_trivial, r.entropy_gamma, r.ordering_holds});
  }
  return out;
}

std::vector<ScanRow> entropy_scan_demo_svb() {
  const NoUniversalQuantifierReport r = no_universal_quantifier_demo();
  const double ln2 = std::log(2.0);
  auto row = [](const std::string& id, double value, double expected) {
    return ScanRow{"demo_svb", id, "custom", value, expected, expected, std::abs(value - expected) <= 1e-10};
  };
  std::vector<ScanRow> out{row("gamma1/Z", r.g1_z, 0.0), row("gamma1/X", r.g1_x, ln2), row("gamma2/Z", r.g2_z, ln2),
                           row("gamma2/X", r.g2_x, 0.0)};
  out.push_back({"demo_svb", "reversal", "custom", r.reversal ? 1.0 : 0.0, 1.0, 1.0, r.reversal});
  return out;
}

std::string scan_csv(const std::vector<ScanRow>& rows) {
  std::string out = "section,id,label,value,lower,upper,margin_lower,margin_upper,holds\n";
  for (const ScanRow& r : rows) {
    out += r.section + "," + r.id + "," + r.label + "," + io::format_double(r.value) + "," +
           io::format_double(r.lower) + "," + io::format_double(r.upper) + "," +
           io::format_double(r.value - r.lower) + "," + io::format_double(r.upper - r.value) + "," +
           (r.holds ? "true" : "false") + "\n";
  }
  return out;
}

ClassicalLimitReport classical_limit(const Scenario& s, unsigned jobs) {
  if (!s.classical || !s.diagonal) {
    throw Error(ErrorCode::NotClassicalLimit, "scenario '" + s.name + "' is not marked diagonal");
  }
  const classical::ClassicalModel& model = *s.classical;
  const Instrument& alice = s.alice();
  const classical::RealVector p0 = s.rho0.matrix().diagonal().real();

  std::vector<std::string> labels{"pf", "copy"};
  if (s.joint) labels.push_back("gw-variant");

  std::vector<Record> records;
  ClassicalLimitReport report;
  report.scenario = s.name;
  for (std::size_t len = 1; len <= s.steps; ++len) {
    for (auto& rp : enumerate_records(alice, s.rho0, len, s.enumeration_cap)) {
      if (rp.probability <= kMinOutcomeProb) {
        ++report.skipped;
        continue;
      }
      records.push_back(std::move(rp.record));
    }
  }
  report.records = records.size();

  using Residuals = std::vector<std::pair<double, std::size_t>>;
  const auto per_record = parallel_map<Residuals>(records.size(), jobs, [&](std::size_t i) {
    const Record& r = records[i];
    Residuals res(labels.size(), {0.0, 0});
    for (std::size_t t = 0; t <= r.size(); ++t) {
      const Record past = slice(r, 0, t);
      const Record future = slice(r, t, r.size());
      const classical::RealVector expected = classical::classical_smooth(model, p0, past, future);
      const DensityOperator rho_f = filter(alice, s.rho0, past).state;
      const Effect retro = retrofilter(alice, future);

      const Eigen::Index d = s.dim();
      Matrix copy = Matrix::Zero(d * d, d * d);
      for (Eigen::Index x = 0; x < d; ++x) copy(x * d + x, x * d + x) = rho_f.matrix()(x, x);
      std::vector<FilteredGlobalState> priors{build_pf(rho_f), FilteredGlobalState(PriorKind::Custom, copy, Dims{d, d})};
      if (s.joint) priors.push_back(build_gw_variant(*s.joint, s.rho0, past));

      for (std::size_t k = 0; k < priors.size(); ++k) {
        const Matrix rho_s = smoothed_operator(priors[k], retro);
        const double gap = (rho_s.diagonal().real() - expected).cwiseAbs().maxCoeff();
        res[k].first = std::max(res[k].first, gap);
        ++res[k].second;
      }
    }
    return res;
  });

  for (std::size_t k = 0; k < labels.size(); ++k) {
    ClassicalLimitEntry e{labels[k], 0.0, 0};
    for (const auto& r : per_record) {
      e.max_residual = std::max(e.max_residual, r[k].first);
      e.comparisons += r[k].second;
    }
    report.max_residual = std::max(report.max_residual, e.max_residual);
    report.entries.push_back(e);
  }
  return report;
}

json classical_limit_json(const ClassicalLimitReport& report) {
  json entries = json::array();
  for (const auto& e : report.entries) {
    entries.push_back({{"prior", e.prior}, {"max_residual", e.max_residual}, {"comparisons", e.comparisons}});
  }
  return json{{"scenario", report.scenario},
              {"records", report.records},
              {"skipped_zero_probability", report.skipped},
              {"max_residual", report.max_residual},
              {"tolerance", kClassicalLimitTol},
              {"passed", report.max_residual <= kClassicalLimitTol},
              {"priors", std::move(entries)}};
}

}  // namespace retrosmooth::cli
