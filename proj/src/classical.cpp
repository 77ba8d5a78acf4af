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

#include "retrosmooth/classical.hpp"

#include <cmath>

#include "retrosmooth/error.hpp"

namespace retrosmooth::classical {

namespace {

constexpr double kStochasticTol = 1e-12;

std::size_t sample_index(const RealVector& weights, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uniform(0.0, weights.sum());
  const double u = uniform(rng);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    acc += weights(i);
    if (u < acc) return static_cast<std::size_t>(i);
  }
  // Round-off at the top of the range: last index with positive weight.
  for (Eigen::Index i = weights.size() - 1; i >= 0; --i) {
    if (weights(i) > 0.0) return static_cast<std::size_t>(i);
  }
  return 0;
}

}  // namespace

ClassicalModel::ClassicalModel(RealMatrix transition, RealMatrix likelihood, std::vector<std::string> labels)
    : transition_(std::move(transition)), likelihood_(std::move(likelihood)), labels_(std::move(labels)) {
  const Eigen::Index n = transition_.rows();
  if (n == 0 || transition_.cols() != n) {
    throw Error(ErrorCode::InvalidModel, "transition matrix must be square and nonempty");
  }
  if (likelihood_.cols() != n || likelihood_.rows() != static_cast<Eigen::Index>(labels_.size()) ||
      labels_.empty()) {
    throw Error(ErrorCode::InvalidModel, "likelihood must have one row per outcome and one column per state");
  }
  if (!transition_.allFinite() || !likelihood_.allFinite() || transition_.minCoeff() < 0.0 ||
      likelihood_.minCoeff() < 0.0) {
    throw Error(ErrorCode::InvalidModel, "probabilities must be finite and nonnegative");
  }
  for (Eigen::Index x = 0; x < n; ++x) {
    if (std::abs(transition_.col(x).sum() - 1.0) > kStochasticTol) {
      throw Error(ErrorCode::InvalidModel, "transition column " + std::to_string(x) + " does not sum to 1");
    }
    if (std::abs(likelihood_.col(x).sum() - 1.0) > kStochasticTol) {
      throw Error(ErrorCode::InvalidModel, "likelihood for state " + std::to_string(x) + " does not sum to 1");
    }
  }
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    for (std::size_t j = i + 1; j < labels_.size(); ++j) {
      if (labels_[i] == labels_[j]) throw Error(ErrorCode::InvalidModel, "duplicate outcome label " + labels_[i]);
    }
  }
}

std::size_t ClassicalModel::outcome_index(const std::string& label) const {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == label) return i;
  }
  throw Error(ErrorCode::UnknownOutcome, "unknown outcome '" + label + "'");
}

Record ClassicalModel::to_record(const std::vector<std::string>& labels) const {
  Record out;
  out.reserve(labels.size());
  for (const auto& l : labels) out.push_back(outcome_index(l));
  return out;
}

RealMatrix conditional_map(const ClassicalModel& model, std::size_t y) {
  if (y >= model.n_outcomes()) {
    throw Error(ErrorCode::UnknownOutcome, "outcome index " + std::to_string(y) + " out of range");
  }
  return model.transition() * model.likelihood().row(static_cast<Eigen::Index>(y)).transpose().asDiagonal();
}

void check_distribution(const RealVector& p) {
  if (p.size() == 0 || !p.allFinite() || p.minCoeff() < -1e-12 || std::abs(p.sum() - 1.0) > 1e-10) {
    throw Error(ErrorCode::InvalidDistribution, "not a probability vector");
  }
}

FilterResult classical_filter(const ClassicalModel& model, const RealVector& prior, const Record& past) {
  if (prior.size() != static_cast<Eigen::Index>(model.n_states())) {
    throw Error(ErrorCode::InvalidDistribution, "prior has wrong length");
  }
  check_distribution(prior);
  FilterResult out{prior, 0.0};
  for (const std::size_t y : past) {
    RealVector next = conditional_map(model, y) * out.state;
    const double weight = next.sum();
    if (!(weight > 0.0)) {
      throw Error(ErrorCode::ZeroProbabilityRecord, "record has zero probability under the model");
    }
    out.state = next / weight;
    out.log_likelihood += std::log(weight);
  }
  return out;
}

RealVector classical_retrofilter(const ClassicalModel& model, const Record& future) {
  RealVector effect = RealVector::Ones(static_cast<Eigen::Index>(model.n_states()));
  for (auto it = future.rbegin(); it != future.rend(); ++it) {
    effect = conditional_map(model, *it).transpose() * effect;
  }
  return effect;
}

RealVector classical_smooth(const ClassicalModel& model, const RealVector& prior, const Record& past,
                            const Record& future) {
  const FilterResult filtered = classical_filter(model, prior, past);
  const RealVector effect = classical_retrofilter(model, future);
  const RealVector joint = filtered.state.cwiseProduct(effect);
  const double norm = joint.sum();
  if (!(norm > 0.0)) {
    throw Error(ErrorCode::ZeroProbabilityRecord, "future record impossible given the past");
  }
  return joint / norm;
}

Trajectory sample_classical_trajectory(const ClassicalModel& model, const RealVector& prior,
                                       std::size_t steps, std::mt19937_64& rng) {
  check_distribution(prior);
  Trajectory out;
  std::size_t x = sample_index(prior.cwiseMax(0.0), rng);
  out.states.push_back(x);
  for (std::size_t step = 0; step < steps; ++step) {
    const auto col = static_cast<Eigen::Index>(x);
    const std::size_t y = sample_index(model.likelihood().col(col), rng);
    x = sample_index(model.transition().col(col), rng);
    out.record.push_back(y);
    out.states.push_back(x);
  }
  return out;
}

}  // namespace retrosmooth::classical
