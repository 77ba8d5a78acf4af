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
#include <random>

#include "retrosmooth/linalg.hpp"
#include "retrosmooth/retrodiction.hpp"
#include "retrosmooth/trajectory.hpp"

// Seeded random generators for property sweeps and the CLI's random
// scenarios. All draws go through the caller's engine.
namespace retrosmooth::sampling {

/// Entries with independent standard normal real and imaginary parts.
Matrix ginibre(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng);

Matrix random_unitary(Eigen::Index d, std::mt19937_64& rng);

/// rows x cols with orthonormal columns (rows >= cols).
Matrix random_isometry(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng);

Matrix random_hermitian(Eigen::Index d, std::mt19937_64& rng);

/// Ginibre-induced density operator of the given rank.
DensityOperator random_density(Eigen::Index d, std::mt19937_64& rng, Eigen::Index rank = 0);

Vector random_pure(Eigen::Index d, std::mt19937_64& rng);

/// n effects from random positive operators normalized by S^{-1/2} . S^{-1/2}.
std::vector<Effect> random_povm(Eigen::Index d, std::size_t n, std::mt19937_64& rng);

ChannelRep random_channel(Eigen::Index d_in, Eigen::Index d_out, std::size_t n_kraus, std::mt19937_64& rng);

/// Instrument whose Kraus operators are slices of one random isometry.
Instrument random_instrument(Eigen::Index d, std::size_t n_outcomes, std::size_t kraus_per_outcome,
                             std::mt19937_64& rng);

/// Joint instrument in which every Alice outcome pairs with every Bob outcome.
JointInstrument random_joint_instrument(Eigen::Index d, std::size_t n_alice, std::size_t n_bob,
                                        std::mt19937_64& rng);

/// Random extension of gamma onto Q (x) A: trace a random pure state on
/// Q (x) A (x) A' down to Q (x) A and correct the marginal to gamma.
FilteredGlobalState random_extension(const DensityOperator& gamma, Eigen::Index d_a, std::mt19937_64& rng,
                                     Eigen::Index d_env = 0);

}  // namespace retrosmooth::sampling
