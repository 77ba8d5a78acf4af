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

#include <algorithm>
#include <cmath>
#include <limits>

#include "retrosmooth/error.hpp"

namespace retrosmooth {

namespace {

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

std::size_t sample_weighted(const std::vector<double>& weights, std::mt19937_64& rng) {
  double total = 0.0;
  for (const double w : weights) total += std::max(0.0, w);
  std::uniform_real_distribution<double> uniform(0.0, total);
  const double u = uniform(rng);
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += std::max(0.0, weights[i]);
    if (u < acc) return i;
  }
  for (std::size_t i = weights.size(); i-- > 0;) {
    if (weights[i] > 0.0) return i;
  }
  return 0;
}

}  // namespace

ConditionalOp::ConditionalOp(std::vector<Matrix> kraus) : kraus_(std::move(kraus)) {
  if (kraus_.empty()) throw Error(ErrorCode::InvalidInstrument, "conditional operation needs a Kraus operator");
  const Eigen::Index d = kraus_.front().cols();
  for (const Matrix& m : kraus_) {
    if (m.rows() != d || m.cols() != d || d == 0) {
      throw Error(ErrorCode::InvalidInstrument, "Kraus operators must share one square dimension");
    }
    if (!m.allFinite()) throw Error(ErrorCode::InvalidInstrument, "non-finite Kraus operator");
  }
  const double top = herm_eig(completeness()).values(0);
  if (top > 1.0 + 1e-10) {
    throw Error(ErrorCode::InvalidInstrument, "conditional operation is not trace non-increasing");
  }
}

Matrix ConditionalOp::apply(const Matrix& rho) const {
  Matrix out = Matrix::Zero(dim(), dim());
  for (const Matrix& m : kraus_) out.noalias() += m * rho * m.adjoint();
  return out;
}

Matrix ConditionalOp::adjoint(const Matrix& effect) const {
  Matrix out = Matrix::Zero(dim(), dim());
  for (const Matrix& m : kraus_) out.noalias() += m.adjoint() * effect * m;
  return out;
}

Matrix ConditionalOp::completeness() const { return adjoint(Matrix::Identity(dim(), dim())); }

WeightedState apply_conditional(const ConditionalOp& op, const DensityOperator& rho) {
  if (rho.dim() != op.dim()) throw Error(ErrorCode::InvalidFactorization, "state and operation dimensions differ");
  WeightedState out{hermitian_part(op.apply(rho.matrix())), 0.0};
  out.weight = out.state.trace().real();
  return out;
}

Instrument::Instrument(std::vector<std::string> labels, std::vector<ConditionalOp> ops, double completeness_tol)
    : labels_(std::move(labels)), ops_(std::move(ops)) {
  if (labels_.empty() || labels_.size() != ops_.size()) {
    throw Error(ErrorCode::InvalidInstrument, "need one label per conditional operation");
  }
  for (const ConditionalOp& op : ops_) {
    if (op.dim() != ops_.front().dim()) throw Error(ErrorCode::InvalidInstrument, "mixed dimensions");
  }
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    for (std::size_t j = i + 1; j < labels_.size(); ++j) {
      if (labels_[i] == labels_[j]) throw Error(ErrorCode::InvalidInstrument, "duplicate label " + labels_[i]);
    }
  }
  const double defect = completeness_defect();
  if (defect > completeness_tol) {
    throw Error(ErrorCode::InvalidInstrument, "completeness defect " + std::to_string(defect));
  }
}

double Instrument::completeness_defect() const {
  Matrix sum = Matrix::Zero(dim(), dim());
  for (const ConditionalOp& op : ops_) sum += op.completeness();
  return max_abs(sum - Matrix::Identity(dim(), dim()));
}

std::size_t Instrument::index_of(const std::string& label) const {
  const auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw Error(ErrorCode::UnknownOutcome, "unknown outcome '" + label + "'");
  return static_cast<std::size_t>(it - labels_.begin());
}

Record Instrument::to_record(const std::vector<std::string>& labels) const {
  Record out;
  out.reserve(labels.size());
  for (const auto& l : labels) out.push_back(index_of(l));
  return out;
}

std::vector<std::string> Instrument::to_labels(const Record& record) const {
  std::vector<std::string> out;
  out.reserve(record.size());
  for (const std::size_t y : record) out.push_back(labels_.at(y));
  return out;
}

JointInstrument::JointInstrument(std::vector<std::string> alice_labels, std::vector<std::string> bob_labels,
                                 std::vector<Entry> entries, double completeness_tol)
    : alice_labels_(std::move(alice_labels)), bob_labels_(std::move(bob_labels)), entries_(std::move(entries)) {
  if (alice_labels_.empty() || bob_labels_.empty() || entries_.empty()) {
    throw Error(ErrorCode::InvalidInstrument, "joint instrument needs outcomes and entries");
  }
  const Eigen::Index d = entries_.front().kraus.cols();
  by_alice_.assign(alice_labels_.size(), {});
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const Entry& e = entries_[i];
    if (e.alice >= alice_labels_.size() || e.bob >= bob_labels_.size()) {
      throw Error(ErrorCode::InvalidInstrument, "entry refers to an unknown outcome");
    }
    if (e.kraus.rows() != d || e.kraus.cols() != d || !e.kraus.allFinite()) {
      throw Error(ErrorCode::InvalidInstrument, "joint Kraus operators must be finite and square");
    }
    for (const std::size_t j : by_alice_[e.alice]) {
      if (entries_[j].bob == e.bob) throw Error(ErrorCode::InvalidInstrument, "duplicate (alice, bob) pair");
    }
    by_alice_[e.alice].push_back(i);
  }
  for (std::size_t y = 0; y < by_alice_.size(); ++y) {
    if (by_alice_[y].empty()) {
      throw Error(ErrorCode::InvalidInstrument, "Alice outcome '" + alice_labels_[y] + "' has no entry");
    }
    std::sort(by_alice_[y].begin(), by_alice_[y].end(), [&](std::size_t a, std::size_t b) {
      return bob_labels_[entries_[a].bob] < bob_labels_[entries_[b].bob];
    });
  }
  Matrix sum = Matrix::Zero(d, d);
  for (const Entry& e : entries_) sum += e.kraus.adjoint() * e.kraus;
  const double defect = max_abs(sum - Matrix::Identity(d, d));
  if (defect > completeness_tol) {
    throw Error(ErrorCode::InvalidInstrument, "joint completeness defect " + std::to_string(defect));
  }
}

std::size_t JointInstrument::alice_index(const std::string& label) const {
  const auto it = std::find(alice_labels_.begin(), alice_labels_.end(), label);
  if (it == alice_labels_.end()) throw Error(ErrorCode::UnknownOutcome, "unknown outcome '" + label + "'");
  return static_cast<std::size_t>(it - alice_labels_.begin());
}

Instrument alice_marginal(const JointInstrument& joint) {
  std::vector<ConditionalOp> ops;
  ops.reserve(joint.alice_labels().size());
  for (std::size_t y = 0; y < joint.alice_labels().size(); ++y) {
    std::vector<Matrix> kraus;
    for (const std::size_t i : joint.entries_for(y)) kraus.push_back(joint.entries()[i].kraus);
    ops.emplace_back(std::move(kraus));
  }
  return Instrument(joint.alice_labels(), std::move(ops));
}

Instrument joint_as_instrument(const JointInstrument& joint) {
  std::vector<std::string> labels;
  std::vector<ConditionalOp> ops;
  for (std::size_t y = 0; y < joint.alice_labels().size(); ++y) {
    for (const std::size_t i : joint.entries_for(y)) {
      const auto& e = joint.entries()[i];
      labels.push_back(joint.alice_labels()[e.alice] + "/" + joint.bob_labels()[e.bob]);
      ops.emplace_back(std::vector<Matrix>{e.kraus});
    }
  }
  return Instrument(std::move(labels), std::move(ops));
}

JointInstrument discretize(const LindbladSpec& spec) {
  const Matrix& h = spec.hamiltonian;
  if (h.rows() == 0 || h.rows() != h.cols() || !h.allFinite()) {
    throw Error(ErrorCode::InvalidMatrix, "Hamiltonian must be a finite square matrix");
  }
  if (hermiticity_defect(h) > tol::kHermitian * std::max(1.0, max_abs(h))) {
    throw Error(ErrorCode::InvalidMatrix, "Hamiltonian is not Hermitian");
  }
  if (!(spec.dt > 0.0) || !std::isfinite(spec.dt)) throw Error(ErrorCode::StepTooCoarse, "dt must be positive");
  const Eigen::Index d = h.rows();
  const double dt = spec.dt;
  const Matrix id = Matrix::Identity(d, d);

  std::vector<std::string> alice{"0"};
  std::vector<std::string> bob{"0"};
  std::vector<JointInstrument::Entry> entries;
  Matrix rate = Matrix::Zero(d, d);

  for (std::size_t c = 0; c < spec.channels.size(); ++c) {
    const JumpChannel& ch = spec.channels[c];
    if (ch.op.rows() != d || ch.op.cols() != d || !ch.op.allFinite()) {
      throw Error(ErrorCode::InvalidMatrix, "jump operator has the wrong shape");
    }
    if (!(ch.efficiency >= 0.0 && ch.efficiency <= 1.0)) {
      throw Error(ErrorCode::InvalidInstrument, "efficiency must lie in [0, 1]");
    }
    if (ch.detection != Detection::JumpLike) {
      throw Error(ErrorCode::InvalidInstrument, "only jump-like unravelings are supported");
    }
    const std::string name = ch.name.empty() ? std::to_string(c + 1) : ch.name;
    if (name == "0" || std::find(alice.begin(), alice.end(), name) != alice.end() ||
        std::find(bob.begin(), bob.end(), name) != bob.end()) {
      throw Error(ErrorCode::InvalidInstrument, "channel name '" + name + "' is not unique");
    }
    rate += ch.op.adjoint() * ch.op;
    if (ch.efficiency > 0.0) {
      alice.push_back(name);
      entries.push_back({alice.size() - 1, 0, std::sqrt(ch.efficiency * dt) * ch.op});
    }
    if (ch.efficiency < 1.0) {
      bob.push_back(name);
      entries.push_back({0, bob.size() - 1, std::sqrt((1.0 - ch.efficiency) * dt) * ch.op});
    }
  }

  const Matrix generator = Complex(0.0, 1.0) * h + 0.5 * rate;
  Matrix no_jump = id - generator * dt;

  const Matrix target = hermitian_part(id - dt * rate);
  const double raw_defect = herm_eig(hermitian_part(no_jump.adjoint() * no_jump - target)).values.cwiseAbs().maxCoeff();
  if (raw_defect > kMaxRawDefect) {
    throw Error(ErrorCode::StepTooCoarse, "first-order completeness defect " + std::to_string(raw_defect));
  }
  if (herm_eig(target).values.minCoeff() <= 0.0) {
    throw Error(ErrorCode::StepTooCoarse, "jump probability per step reaches 1");
  }
  // Polar repair: M0 <- U sqrt(I - dt K) with U the unitary polar factor of M0.
  const Matrix gram = hermitian_part(no_jump.adjoint() * no_jump);
  no_jump = no_jump * support_inv_sqrt(gram) * psd_sqrt(target);

  entries.insert(entries.begin(), JointInstrument::Entry{0, 0, no_jump});

  Matrix sum = Matrix::Zero(d, d);
  for (const auto& e : entries) sum += e.kraus.adjoint() * e.kraus;
  const double defect = max_abs(sum - id);
  if (defect > 1e-6) {
    throw Error(ErrorCode::StepTooCoarse, "completeness defect after repair " + std::to_string(defect));
  }
  return JointInstrument(std::move(alice), std::move(bob), std::move(entries));
}

FilterResult filter(const Instrument& instrument, const DensityOperator& rho0, const Record& past) {
  if (rho0.dim() != instrument.dim()) throw Error(ErrorCode::InvalidFactorization, "state dimension mismatch");
  Matrix state = rho0.matrix();
  double log_prob = 0.0;
  for (std::size_t step = 0; step < past.size(); ++step) {
    if (past[step] >= instrument.size()) throw Error(ErrorCode::UnknownOutcome, "outcome index out of range");
    Matrix next = instrument.op(past[step]).apply(state);
    const double weight = next.trace().real();
    if (!(weight > kZeroWeight)) {
      throw Error(ErrorCode::ZeroProbabilityRecord, "outcome at step " + std::to_string(step) + " is impossible");
    }
    state = hermitian_part(next / weight);
    log_prob += std::log(weight);
  }
  return FilterResult{DensityOperator(state), log_prob};
}

Effect retrofilter(const Instrument& instrument, const Record& future) {
  const Eigen::Index d = instrument.dim();
  Matrix effect = Matrix::Identity(d, d);
  for (auto it = future.rbegin(); it != future.rend(); ++it) {
    if (*it >= instrument.size()) throw Error(ErrorCode::UnknownOutcome, "outcome index out of range");
    effect = hermitian_part(instrument.op(*it).adjoint(effect));
  }
  return Effect(effect);
}

void check_enumeration_size(std::size_t alphabet, std::size_t steps, std::size_t cap) {
  std::size_t count = 1;
  for (std::size_t s = 0; s < steps; ++s) {
    if (alphabet != 0 && count > cap / alphabet) {
      throw Error(ErrorCode::EnumerationTooLarge, std::to_string(alphabet) + "^" + std::to_string(steps) +
                                                      " records exceed the cap " + std::to_string(cap));
    }
    count *= alphabet;
  }
  if (count > cap) throw Error(ErrorCode::EnumerationTooLarge, "record count exceeds the cap");
}

std::vector<RecordProbability> enumerate_records(const Instrument& instrument, const DensityOperator& rho0,
                                                 std::size_t steps, std::size_t cap) {
  check_enumeration_size(instrument.size(), steps, cap);
  if (rho0.dim() != instrument.dim()) throw Error(ErrorCode::InvalidFactorization, "state dimension mismatch");
  std::vector<RecordProbability> out;
  // Depth-first over index tuples; stack[k] holds Phi_{y_{k-1}..y_0}(rho0).
  std::vector<Matrix> stack(steps + 1);
  stack[0] = rho0.matrix();
  Record record(steps, 0);
  std::size_t depth = 0;
  while (true) {
    if (depth == steps) {
      out.push_back({record, std::max(0.0, stack[steps].trace().real())});
      // Advance to the next tuple.
      while (depth > 0 && record[depth - 1] + 1 == instrument.size()) {
        record[depth - 1] = 0;
        --depth;
      }
      if (depth == 0) break;
      ++record[depth - 1];
      stack[depth] = instrument.op(record[depth - 1]).apply(stack[depth - 1]);
      continue;
    }
    stack[depth + 1] = instrument.op(record[depth]).apply(stack[depth]);
    ++depth;
  }
  return out;
}

SampledRecord sample_record(const Instrument& instrument, const DensityOperator& rho0, std::size_t steps,
                            std::mt19937_64& rng) {
  if (rho0.dim() != instrument.dim()) throw Error(ErrorCode::InvalidFactorization, "state dimension mismatch");
  SampledRecord out;
  out.path.push_back(rho0);
  Matrix state = rho0.matrix();
  std::vector<Matrix> candidates(instrument.size());
  std::vector<double> weights(instrument.size());
  for (std::size_t step = 0; step < steps; ++step) {
    for (std::size_t y = 0; y < instrument.size(); ++y) {
      candidates[y] = instrument.op(y).apply(state);
      weights[y] = candidates[y].trace().real();
    }
    const std::size_t y = sample_weighted(weights, rng);
    state = hermitian_part(candidates[y] / weights[y]);
    out.record.push_back(y);
    out.path.emplace_back(state);
  }
  return out;
}

JointRecord sample_joint_record(const JointInstrument& joint, const DensityOperator& rho0, std::size_t steps,
                                std::mt19937_64& rng) {
  if (rho0.dim() != joint.dim()) throw Error(ErrorCode::InvalidFactorization, "state dimension mismatch");
  JointRecord out;
  Matrix state = rho0.matrix();
  const auto& entries = joint.entries();
  std::vector<Matrix> candidates(entries.size());
  std::vector<double> weights(entries.size());
  for (std::size_t step = 0; step < steps; ++step) {
    for (std::size_t i = 0; i < entries.size(); ++i) {
      candidates[i] = entries[i].kraus * state * entries[i].kraus.adjoint();
      weights[i] = candidates[i].trace().real();
    }
    const std::size_t i = sample_weighted(weights, rng);
    state = hermitian_part(candidates[i] / weights[i]);
    out.alice.push_back(entries[i].alice);
    out.bob.push_back(entries[i].bob);
  }
  return out;
}

}  // namespace retrosmooth
