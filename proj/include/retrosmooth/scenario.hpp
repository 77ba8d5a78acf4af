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

#include "retrosmooth/classical.hpp"
#include "retrosmooth/io.hpp"
#include "retrosmooth/linalg.hpp"
#include "retrosmooth/retrodiction.hpp"
#include "retrosmooth/trajectory.hpp"

namespace retrosmooth {

struct CustomPriorTemplate {
  Matrix state;  // on Q (x) A, re-targeted to each filtered state
  Dims dims;
};

struct Scenario {
  std::string name;
  std::optional<JointInstrument> joint;
  std::optional<Instrument> instrument;  // Alice's instrument; the marginal of `joint` when that is set
  std::optional<classical::ClassicalModel> classical;
  bool diagonal = false;
  DensityOperator rho0;
  std::size_t steps = 0;
  std::size_t smoothing_index = 0;
  std::vector<PriorKind> priors;
  std::uint64_t seed = 0;
  std::size_t enumeration_cap = kDefaultEnumerationCap;
  std::optional<CustomPriorTemplate> custom_prior;
  std::string output_dir;

  const Instrument& alice() const { return *instrument; }
  Eigen::Index dim() const { return rho0.dim(); }
};

/// Field errors name the offending path, e.g. "system.channels[0].efficiency".
Scenario parse_scenario(const io::json& j, const std::string& source = "scenario");

/// Reads a scenario file and applies the RETROSMOOTH_CAP override.
Scenario load_scenario(const std::string& path);

void apply_cap_override(Scenario& scenario);

/// Driven, damped qubit: Omega = kappa = 1, eta = 0.5, kappa dt = 0.02, 4 steps, smoothing at step 2.
io::json demo_scenario_json();
Scenario demo_scenario();

/// Two- and three-state hidden Markov models used by the classical-limit checks.
io::json classical_scenario_json(std::size_t n_states);

/// Single-entry Kraus operators sqrt(D(x|x') p(y|x')) |x><x'| for each outcome y.
Instrument classical_instrument(const classical::ClassicalModel& model);

/// Recovers (D, p) from an instrument whose Kraus operators keep diagonal states diagonal.
classical::ClassicalModel classical_model_from_instrument(const Instrument& instrument);

std::vector<PriorKind> all_prior_kinds();

}  // namespace retrosmooth
