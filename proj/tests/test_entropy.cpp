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

#include "retrosmooth/entropy.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "retrosmooth/error.hpp"
#include "retrosmooth/sampling.hpp"
#include "retrosmooth/smoothers.hpp"
#include "test_helpers.hpp"

using namespace retrosmooth;
using retrosmooth::testing::diag;
using retrosmooth::testing::driven_decay;
using retrosmooth::testing::max_abs_diff;

namespace {

POVM random_rank_one_povm(Eigen::Index d, std::mt19937_64& rng) { return POVM::from_basis(sampling::random_unitary(d, rng)); }

POVM random_general_povm(Eigen::Index d, std::size_t n, std::mt19937_64& rng) {
  return POVM(sampling::random_povm(d, n, rng));
}

}  // namespace

TEST(POVMType, Validation) {
  EXPECT_THROW(POVM({Effect(diag({1.0, 0.0}))}), Error);
  EXPECT_NO_THROW(POVM({Effect(diag({1.0, 0.0})), Effect(diag({0.0, 1.0}))}));
  EXPECT_EQ(POVM::from_basis(Matrix::Identity(3, 3)).size(), 3u);
}

TEST(AvgEntropy, TrivialExtensionRankOnePovmGivesPureStates) {
  std::mt19937_64 rng(90);
  const DensityOperator gamma = sampling::random_density(3, rng);
  const ExtensionScenario s(gamma, build_pf(gamma), random_rank_one_povm(3, rng));
  EXPECT_NEAR(avg_entropy(s), 0.0, 1e-9);
}

TEST(AvgEntropy, PurificationGivesEntropyOfGamma) {
  std::mt19937_64 rng(91);
  const DensityOperator gamma = sampling::random_density(3, rng);
  const ExtensionScenario s(gamma, build_clhs(gamma), random_general_povm(3, 4, rng));
  EXPECT_NEAR(avg_entropy(s), entropy_vn(gamma), 1e-9);
}

TEST(AvgEntropy, SkipsZeroProbabilityOutcomes) {
  const DensityOperator gamma(diag({1.0, 0.0}));
  const ExtensionScenario s(gamma, build_pf(gamma), POVM::from_basis(Matrix::Identity(2, 2)));
  const OutcomeStates states = smoothed_outcome_states(s);
  EXPECT_EQ(states.skipped, 1u);
  EXPECT_FALSE(states.states[1].has_value());
  EXPECT_EQ(avg_entropy(s), 0.0);
}

TEST(Theorem1, OrderingHoldsOnRandomInstances) {
  std::mt19937_64 rng(92);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index d = 2 + trial % 3;
    const DensityOperator gamma = sampling::random_density(d, rng, 1 + trial % d);
    const FilteredGlobalState ext = sampling::random_extension(gamma, 1 + trial % 4, rng);
    const POVM povm = trial % 2 == 0 ? random_rank_one_povm(d, rng)
                                     : random_general_povm(d, 2 + static_cast<std::size_t>(trial % 3), rng);
    const Theorem1Report r = theorem1_check(gamma, ext, povm);
    EXPECT_TRUE(r.ordering_holds) << r.avg_trivial << " " << r.avg_extension << " " << r.entropy_gamma;
  }
}

TEST(NoUniversalQuantifier, ReportedValues) {
  const NoUniversalQuantifierReport r = no_universal_quantifier_demo();
  EXPECT_NEAR(r.g1_z, 0.0, 1e-12);
  EXPECT_NEAR(r.g1_x, std::log(2.0), 1e-12);
  EXPECT_NEAR(r.g2_z, std::log(2.0), 1e-12);
  EXPECT_NEAR(r.g2_x, 0.0, 1e-12);
  EXPECT_TRUE(r.reversal);
}

TEST(ConditionalEntropy, MatchesAverageEntropy) {
  std::mt19937_64 rng(93);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::Index d = 2 + trial % 3;
    const DensityOperator gamma = sampling::random_density(d, rng);
    const ExtensionScenario s(gamma, sampling::random_extension(gamma, 2, rng), random_general_povm(d, 3, rng));
    const OutcomeStates states = smoothed_outcome_states(s);
    std::vector<DensityOperator> list;
    for (const auto& st : states.states) list.push_back(*st);
    EXPECT_NEAR(cq_conditional_entropy(states.probs, list), avg_entropy(s), 1e-9);
  }
}

TEST(SandwichBound, HoldsForFutureRecordsOfDemoSystem) {
  const JointInstrument j = discretize(driven_decay(1.0, 1.0, 0.5, 0.02));
  const Instrument alice = alice_marginal(j);
  const DensityOperator rho0 = DensityOperator::maximally_mixed(2);
  const Record past{0, 1};
  const DensityOperator rho_f = filter(alice, rho0, past).state;
  const std::size_t future_steps = 2;
  for (const FilteredGlobalState& prior :
       {build_pf(rho_f), build_gw(j, rho0, past), build_gw_variant(j, rho0, past),
        build_pf_variant(alice, rho0, past), build_clhs(rho_f)}) {
    std::vector<double> probs;
    double avg = 0.0;
    for (const auto& rp : enumerate_records(alice, rho_f, future_steps)) {
      probs.push_back(rp.probability);
      if (rp.probability <= kMinOutcomeProb) continue;
      avg += rp.probability * entropy_vn(generalized_smooth(prior, retrofilter(alice, rp.record)));
    }
    const SandwichBound b = sandwich_bound(rho_f, probs, avg);
    EXPECT_TRUE(b.holds) << to_string(prior.kind()) << ": " << b.lower << " <= " << avg << " <= " << b.upper;
  }
}

TEST(LambdaMap, IntertwinesAndIsChannel) {
  std::mt19937_64 rng(94);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::Index d = 2 + trial % 3;
    const DensityOperator gamma = sampling::random_density(d, rng, 1 + trial % d);
    const FilteredGlobalState ext = sampling::random_extension(gamma, 1 + trial % 3, rng);
    const LambdaMap lambda = lambda_map(ext, gamma);
    const Matrix root = psd_sqrt(gamma.matrix());
    const Matrix g = sampling::ginibre(d, d, rng);
    const Matrix e = hermitian_part(g * g.adjoint());
    const Matrix direct = partial_trace(
        lambda.extension_sqrt * tensor(e, Matrix::Identity(lambda.dims.a, lambda.dims.a)) * lambda.extension_sqrt,
        lambda.dims, Keep::Q);
    EXPECT_LT(max_abs_diff(lambda.apply(root * e * root), direct), 1e-9);
    EXPECT_LT(max_abs_diff(lambda.apply_direct(root * e * root), direct), 1e-9);
    EXPECT_LT(max_abs_diff(lambda.apply(gamma.matrix()), gamma.matrix()), 1e-9);
    EXPECT_GE(herm_eig(lambda.choi()).values.minCoeff(), -1e-10);
  }
}

TEST(LambdaMap, TrivialExtensionIsIdentity) {
  std::mt19937_64 rng(95);
  const DensityOperator gamma = sampling::random_density(3, rng);
  const LambdaMap lambda = lambda_map(build_pf(gamma), gamma);
  const Matrix y = sampling::random_hermitian(3, rng);
  EXPECT_LT(max_abs_diff(lambda.apply(y), y), 1e-9);
}

TEST(ExtensionScenarioType, RejectsWrongMarginal) {
  const DensityOperator gamma = DensityOperator::maximally_mixed(2);
  const FilteredGlobalState wrong = build_pf(DensityOperator(diag({0.9, 0.1})));
  try {
    ExtensionScenario(gamma, wrong, POVM::from_basis(Matrix::Identity(2, 2)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidExtension);
  }
}
