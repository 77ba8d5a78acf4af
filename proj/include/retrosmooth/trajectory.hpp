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

#include "retrosmooth/linalg.hpp"

namespace retrosmooth {

/// Outcome indices into an instrument's label list, earliest step first.
using Record = std::vector<std::size_t>;

inline constexpr std::size_t kDefaultEnumerationCap = 1'000'000;

/// Per-step weights below this are treated as an impossible outcome.
inline constexpr double kZeroWeight = 1e-14;

/// Completely positive map sum_k M_k . M_k^dagger with sum_k M^dagger M <= I.
class ConditionalOp {
 public:
  explicit ConditionalOp(std::vector<Matrix> kraus);

  const std::vector<Matrix>& kraus() const { return kraus_; }
  Eigen::Index dim() const { return kraus_.front().cols(); }

  Matrix apply(const Matrix& rho) const;
  Matrix adjoint(const Matrix& effect) const;
  Matrix completeness() const;

 private:
  std::vector<Matrix> kraus_;
};

struct WeightedState {
  Matrix state;  // unnormalized
  double weight = 0.0;
};

WeightedState apply_conditional(const ConditionalOp& op, const DensityOperator& rho);

class Instrument {
 public:
  /// Throws InvalidInstrument if sum_y Phi_y^dagger(I) deviates from I by more
  /// than completeness_tol in any entry.
  Instrument(std::vector<std::string> labels, std::vector<ConditionalOp> ops, double completeness_tol = 1e-9);

  std::size_t size() const { return labels_.size(); }
  Eigen::Index dim() const { return ops_.front().dim(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const ConditionalOp& op(std::size_t y) const { return ops_.at(y); }
  const std::vector<ConditionalOp>& ops() const { return ops_; }

  std::size_t index_of(const std::string& label) const;
  Record to_record(const std::vector<std::string>& labels) const;
  std::vector<std::string> to_labels(const Record& record) const;

  double completeness_defect() const;

 private:
  std::vector<std::string> labels_;
  std::vector<ConditionalOp> ops_;
};

/// Alice/Bob split of an instrument. Every allowed pair (y, u) carries exactly
/// one Kraus operator; pairs that are not listed never occur.
class JointInstrument {
 public:
  struct Entry {
    std::size_t alice = 0;
    std::size_t bob = 0;
    Matrix kraus;
  };

  JointInstrument(std::vector<std::string> alice_labels, std::vector<std::string> bob_labels,
                  std::vector<Entry> entries, double completeness_tol = 1e-9);

  const std::vector<std::string>& alice_labels() const { return alice_labels_; }
  const std::vector<std::string>& bob_labels() const { return bob_labels_; }
  const std::vector<Entry>& entries() const { return entries_; }
  Eigen::Index dim() const { return entries_.front().kraus.cols(); }

  /// Indices into entries() that are compatible with Alice outcome y, ordered
  /// by Bob label.
  const std::vector<std::size_t>& entries_for(std::size_t alice) const { return by_alice_.at(alice); }

  std::size_t alice_index(const std::string& label) const;

 private:
  std::vector<std::string> alice_labels_;
  std::vector<std::string> bob_labels_;
  std::vector<Entry> entries_;
  std::vector<std::vector<std::size_t>> by_alice_;
};

Instrument alice_marginal(const JointInstrument& joint);

/// Flattens (y, u) pairs into one instrument with labels "y/u"; used to
/// enumerate complete Alice+Bob records.
Instrument joint_as_instrument(const JointInstrument& joint);

enum class Detection { JumpLike, HomodyneLike };

struct JumpChannel {
  std::string name;
  Matrix op;
  double efficiency = 1.0;
  Detection detection = Detection::JumpLike;
};

struct LindbladSpec {
  Matrix hamiltonian;  // units of 1/time
  std::vector<JumpChannel> channels;
  double dt = 0.01;
};

/// Largest first-order completeness defect that the polar repair is allowed to
/// absorb before the step is rejected as too coarse.
inline constexpr double kMaxRawDefect = 1e-2;

/// First-order Kraus discretization of one time step. Alice sees the no-jump
/// outcome "0" and every detected jump; Bob sees "0" and every undetected jump.
JointInstrument discretize(const LindbladSpec& spec);

struct FilterResult {
  DensityOperator state;
  double log_prob = 0.0;
};

FilterResult filter(const Instrument& instrument, const DensityOperator& rho0, const Record& past);

/// Phi_future^dagger(I), evaluated by a backward adjoint sweep.
Effect retrofilter(const Instrument& instrument, const Record& future);

struct RecordProbability {
  Record record;
  double probability = 0.0;
};

/// Every record of the given length in lexicographic index order, including
/// zero-probability ones.
std::vector<RecordProbability> enumerate_records(const Instrument& instrument, const DensityOperator& rho0,
                                                 std::size_t steps, std::size_t cap = kDefaultEnumerationCap);

/// Throws EnumerationTooLarge when alphabet^steps exceeds cap.
void check_enumeration_size(std::size_t alphabet, std::size_t steps, std::size_t cap);

struct SampledRecord {
  Record record;
  std::vector<DensityOperator> path;  // filtered state before each step and after the last
};

SampledRecord sample_record(const Instrument& instrument, const DensityOperator& rho0, std::size_t steps,
                            std::mt19937_64& rng);

struct JointRecord {
  Record alice;
  Record bob;
};

JointRecord sample_joint_record(const JointInstrument& joint, const DensityOperator& rho0, std::size_t steps,
                                std::mt19937_64& rng);

}  // namespace retrosmooth
