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

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace retrosmooth::classical {

using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Record = std::vector<std::size_t>;

/// Discrete hidden-Markov model. transition(x, x') = D(x|x') is column
/// stochastic; likelihood(y, x) = p(y|x) sums to one over y for each x.
class ClassicalModel {
 public:
  ClassicalModel(RealMatrix transition, RealMatrix likelihood, std::vector<std::string> labels);

  std::size_t n_states() const { return static_cast<std::size_t>(transition_.rows()); }
  std::size_t n_outcomes() const { return labels_.size(); }
  const RealMatrix& transition() const { return transition_; }
  const RealMatrix& likelihood() const { return likelihood_; }
  const std::vector<std::string>& labels() const { return labels_; }

  std::size_t outcome_index(const std::string& label) const;
  Record to_record(const std::vector<std::string>& labels) const;

 private:
  RealMatrix transition_;
  RealMatrix likelihood_;
  std::vector<std::string> labels_;
};

/// phi_y(x|x') = D(x|x') p(y|x').
RealMatrix conditional_map(const ClassicalModel& model, std::size_t y);

struct FilterResult {
  RealVector state;
  double log_likelihood = 0.0;
};

/// Stepwise normalized forward pass; throws ZeroProbabilityRecord on an
/// impossible record.
FilterResult classical_filter(const ClassicalModel& model, const RealVector& prior, const Record& past);

/// Backward pass from the all-ones final effect.
RealVector classical_retrofilter(const ClassicalModel& model, const Record& future);

RealVector classical_smooth(const ClassicalModel& model, const RealVector& prior, const Record& past,
                            const Record& future);

struct Trajectory {
  std::vector<std::size_t> states;  // steps + 1 entries
  Record record;
};

Trajectory sample_classical_trajectory(const ClassicalModel& model, const RealVector& prior,
                                       std::size_t steps, std::mt19937_64& rng);

/// Validates a probability vector (entries >= -1e-12, sum 1 within 1e-10).
void check_distribution(const RealVector& p);

}  // namespace retrosmooth::classical
