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

#include "retrosmooth/trajectory.hpp"

#include <cmath>
#include <map>
#include <random>

#include <gtest/gtest.h>

#include "retrosmooth/error.hpp"
#include "retrosmooth/sampling.hpp"
#include "test_helpers.hpp"

using namespace retrosmooth;
using retrosmooth::testing::diag;
using retrosmooth::testing::driven_decay;
using retrosmooth::testing::max_abs_diff;
using retrosmooth::testing::pauli_z;
using retrosmooth::testing::sigma_minus;

namespace {

// Unnormalized Phi_record(rho) by direct composition of Kraus sums.
Matrix brute_unnormalized(const Instrument& inst, const Matrix& rho, const Record& record) {
  Matrix s = rho;
  for (const std::size_t y : record) {
    Matrix next = Matrix::Zero(s.rows(), s.cols());
    for (const Matrix& k : inst.op(y).kraus()) next += k * s * k.adjoint();
    s = next;
  }
  return s;
}

// Heisenberg-picture composite by direct composition, latest step outermost.
Matrix brute_effect(const Instrument& inst, const Record& record) {
  Matrix e = Matrix::Identity(inst.dim(), inst.dim());
  for (auto it = record.rbegin(); it != record.rend(); ++it) {
    Matrix prev = Matrix::Zero(e.rows(), e.cols());
    for (const Matrix& k : inst.op(*it).kraus()) prev += k.adjoint() * e * k;
    e = prev;
  }
  return e;
}

Instrument z_measurement() {
  Matrix p0 = diag({1.0, 0.0});
  Matrix p1 = diag({0.0, 1.0});
  return Instrument({"0", "1"}, {ConditionalOp({p0}), ConditionalOp({p1})});
}

}  // namespace

TEST(ConditionalOpType, RejectsTraceIncreasing) {
  try {
    ConditionalOp({Matrix::Identity(2, 2) * 1.1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidInstrument);
  }
}

TEST(InstrumentType, RejectsIncompleteAndDuplicates) {
  EXPECT_THROW(Instrument({"0"}, {ConditionalOp({diag({1.0, 0.0})})}), Error);
  EXPECT_THROW(Instrument({"a", "a"}, {ConditionalOp({diag({1.0, 0.0})}), ConditionalOp({diag({0.0, 1.0})})}),
               Error);
  const Instrument z = z_measurement();
  EXPECT_EQ(z.index_of("1"), 1u);
  EXPECT_THROW(z.index_of("2"), Error);
  EXPECT_EQ(z.to_labels(z.to_record({"1", "0"})), (std::vector<std::string>{"1", "0"}));
}

TEST(Filter, Examples) {
  const Instrument z = z_measurement();
  const DensityOperator mixed = DensityOperator::maximally_mixed(2);
  const FilterResult none = filter(z, mixed, {});
  EXPECT_LT(max_abs_diff(none.state.matrix(), mixed.matrix()), 1e-300);
  EXPECT_EQ(none.log_prob, 0.0);

  const FilterResult one = filter(z, mixed, {0});
  EXPECT_LT(max_abs_diff(one.state.matrix(), diag({1.0, 0.0})), 1e-15);
  EXPECT_NEAR(one.log_prob, std::log(0.5), 1e-15);

  try {
    filter(z, mixed, {0, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroProbabilityRecord);
  }
}

TEST(Retrofilter, Examples) {
  const Instrument z = z_measurement();
  EXPECT_LT(max_abs_diff(retrofilter(z, {}).matrix(), Matrix::Identity(2, 2)), 1e-300);
  EXPECT_LT(max_abs_diff(retrofilter(z, {1}).matrix(), diag({0.0, 1.0})), 1e-300);
  EXPECT_LT(max_abs_diff(retrofilter(z, {1, 0}).matrix(), Matrix::Zero(2, 2)), 1e-300);
}

TEST(FilterRetrofilter, AgreeWithBruteForceAndConsistency) {
  std::mt19937_64 rng(123);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::Index d = 2 + trial % 3;
    const Instrument inst = sampling::random_instrument(d, 2 + static_cast<std::size_t>(trial % 2), 2, rng);
    const DensityOperator rho0 = sampling::random_density(d, rng);
    const std::size_t steps = 5;
    const auto records = enumerate_records(inst, rho0, steps);
    double total = 0.0;
    for (const auto& rp : records) {
      const Matrix brute = brute_unnormalized(inst, rho0.matrix(), rp.record);
      EXPECT_NEAR(rp.probability, brute.trace().real(), 1e-12);
      total += rp.probability;
      for (std::size_t t = 0; t <= steps; ++t) {
        const Record past(rp.record.begin(), rp.record.begin() + static_cast<std::ptrdiff_t>(t));
        const Record future(rp.record.begin() + static_cast<std::ptrdiff_t>(t), rp.record.end());
        const FilterResult f = filter(inst, rho0, past);
        const Matrix e = retrofilter(inst, future).matrix();
        EXPECT_LT(max_abs_diff(e, brute_effect(inst, future)), 1e-12);
        const Matrix past_brute = brute_unnormalized(inst, rho0.matrix(), past);
        EXPECT_LT(max_abs_diff(f.state.matrix(), past_brute / past_brute.trace()), 1e-10);
        const double lhs = std::exp(f.log_prob) * (f.state.matrix() * e).trace().real();
        EXPECT_NEAR(lhs, rp.probability, 1e-12);
      }
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(EnumerateRecords, LexicographicAndIncludesZeroProbability) {
  const Instrument z = z_measurement();
  const auto records = enumerate_records(z, DensityOperator(diag({1.0, 0.0})), 2);
  ASSERT_EQ(records.size(), 4u);
  EXPECT_EQ(records[0].record, (Record{0, 0}));
  EXPECT_EQ(records[1].record, (Record{0, 1}));
  EXPECT_EQ(records[3].record, (Record{1, 1}));
  EXPECT_NEAR(records[0].probability, 1.0, 1e-15);
  EXPECT_EQ(records[3].probability, 0.0);
}

TEST(EnumerateRecords, CapIsEnforced) {
  const Instrument z = z_measurement();
  try {
    enumerate_records(z, DensityOperator::maximally_mixed(2), 21, 1'000'000);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EnumerationTooLarge);
  }
  EXPECT_NO_THROW(check_enumeration_size(2, 19, 1'000'000));
}

TEST(Discretize, LabelsAndCompleteness) {
  const JointInstrument j = discretize(driven_decay(1.0, 1.0, 0.5, 0.01));
  EXPECT_EQ(j.alice_labels(), (std::vector<std::string>{"0", "decay"}));
  EXPECT_EQ(j.bob_labels(), (std::vector<std::string>{"0", "decay"}));
  ASSERT_EQ(j.entries().size(), 3u);
  Matrix sum = Matrix::Zero(2, 2);
  for (const auto& e : j.entries()) sum += e.kraus.adjoint() * e.kraus;
  EXPECT_LT(max_abs_diff(sum, Matrix::Identity(2, 2)), 1e-12);

  // Detected jump carries sqrt(eta dt) L.
  const auto& det = j.entries()[j.entries_for(1).front()];
  EXPECT_LT(max_abs_diff(det.kraus, std::sqrt(0.5 * 0.01) * sigma_minus()), 1e-15);
}

TEST(Discretize, FullEfficiencyHasNoBobOutcome) {
  const JointInstrument j = discretize(driven_decay(0.0, 1.0, 1.0, 0.01));
  EXPECT_EQ(j.bob_labels(), (std::vector<std::string>{"0"}));
  const JointInstrument dark = discretize(driven_decay(0.0, 1.0, 0.0, 0.01));
  EXPECT_EQ(dark.alice_labels(), (std::vector<std::string>{"0"}));
}

TEST(Discretize, UndrivenNoJumpMatchesExactDecay) {
  // With H = 0 and L = sqrt(kappa) sigma_-, the repaired no-jump operator is diag(1, sqrt(1 - kappa dt)).
  const JointInstrument j = discretize(driven_decay(0.0, 2.0, 1.0, 0.01));
  EXPECT_LT(max_abs_diff(j.entries().front().kraus, diag({1.0, std::sqrt(1.0 - 0.02)})), 1e-14);
}

TEST(Discretize, RejectsCoarseStepsAndHomodyne) {
  try {
    discretize(driven_decay(1.0, 50.0, 0.5, 0.1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::StepTooCoarse);
  }
  LindbladSpec spec = driven_decay(1.0, 1.0, 0.5, 0.01);
  spec.channels.front().detection = Detection::HomodyneLike;
  EXPECT_THROW(discretize(spec), Error);
  spec = driven_decay(1.0, 1.0, 0.5, -0.01);
  EXPECT_THROW(discretize(spec), Error);
}

TEST(Discretize, DefaultChannelNames) {
  LindbladSpec spec;
  spec.hamiltonian = pauli_z();
  spec.channels.push_back({"", sigma_minus(), 1.0, Detection::JumpLike});
  spec.channels.push_back({"", pauli_z() * 0.5, 0.3, Detection::JumpLike});
  spec.dt = 0.01;
  const JointInstrument j = discretize(spec);
  EXPECT_EQ(j.alice_labels(), (std::vector<std::string>{"0", "1", "2"}));
  EXPECT_EQ(j.bob_labels(), (std::vector<std::string>{"0", "2"}));
}

TEST(AliceMarginal, EqualsBobSummedJoint) {
  std::mt19937_64 rng(55);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::Index d = 2 + trial % 3;
    const JointInstrument j = sampling::random_joint_instrument(d, 2, 3, rng);
    const Instrument marginal = alice_marginal(j);
    const Matrix rho = sampling::random_density(d, rng).matrix();
    for (std::size_t y = 0; y < j.alice_labels().size(); ++y) {
      Matrix direct = Matrix::Zero(d, d);
      for (const std::size_t idx : j.entries_for(y)) direct += j.entries()[idx].kraus * rho * j.entries()[idx].kraus.adjoint();
      EXPECT_LT(max_abs_diff(marginal.op(y).apply(rho), direct), 1e-13);
    }
    EXPECT_LT(marginal.completeness_defect(), 1e-12);
    EXPECT_LT(joint_as_instrument(j).completeness_defect(), 1e-12);
  }
}

TEST(SampleRecord, ReproducibleAndFrequenciesMatchEnumeration) {
  const JointInstrument j = discretize(driven_decay(1.0, 2.0, 0.5, 0.08));
  const Instrument alice = alice_marginal(j);
  const DensityOperator rho0(diag({0.0, 1.0}));
  std::mt19937_64 a(3), b(3);
  EXPECT_EQ(sample_record(alice, rho0, 4, a).record, sample_record(alice, rho0, 4, b).record);

  constexpr int kSamples = 60000;
  std::map<Record, int> counts;
  std::mt19937_64 rng(8);
  for (int i = 0; i < kSamples; ++i) ++counts[sample_record(alice, rho0, 3, rng).record];
  for (const auto& rp : enumerate_records(alice, rho0, 3)) {
    const double sigma = std::sqrt(rp.probability * (1.0 - rp.probability) / kSamples);
    const double freq = static_cast<double>(counts[rp.record]) / kSamples;
    EXPECT_LE(std::abs(freq - rp.probability), 3.0 * sigma + 1e-12);
  }
}

TEST(SampleJointRecord, AliceMarginalFrequencies) {
  const JointInstrument j = discretize(driven_decay(1.0, 2.0, 0.5, 0.08));
  const Instrument alice = alice_marginal(j);
  const DensityOperator rho0(diag({0.0, 1.0}));
  constexpr int kSamples = 60000;
  std::map<Record, int> counts;
  std::mt19937_64 rng(21);
  for (int i = 0; i < kSamples; ++i) {
    const JointRecord r = sample_joint_record(j, rho0, 3, rng);
    ASSERT_EQ(r.alice.size(), 3u);
    ASSERT_EQ(r.bob.size(), 3u);
    ++counts[r.alice];
  }
  for (const auto& rp : enumerate_records(alice, rho0, 3)) {
    const double sigma = std::sqrt(rp.probability * (1.0 - rp.probability) / kSamples);
    const double freq = static_cast<double>(counts[rp.record]) / kSamples;
    EXPECT_LE(std::abs(freq - rp.probability), 3.0 * sigma + 1e-12);
  }
}
