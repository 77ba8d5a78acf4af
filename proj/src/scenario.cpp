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

#include "retrosmooth/scenario.hpp"

#include <cmath>
#include <cstdlib>

#include "retrosmooth/error.hpp"

namespace retrosmooth {

namespace {

using io::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::ConfigError, where + ": " + what);
}

const json& field(const json& j, const std::string& key, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  if (!j.contains(key)) fail(where, "missing field '" + key + "'");
  return j.at(key);
}

std::string get_string(const json& j, const std::string& where) {
  if (!j.is_string()) fail(where, "expected a string");
  return j.get<std::string>();
}

double get_number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

std::uint64_t get_unsigned(const json& j, const std::string& where) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
    fail(where, "expected a non-negative integer");
  }
  return j.get<std::uint64_t>();
}

std::vector<std::string> get_labels(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where, "expected a non-empty array of labels");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_string(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

classical::RealMatrix real_matrix(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where, "expected a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  Eigen::Index cols = -1;
  classical::RealMatrix out;
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    const std::string at = where + "[" + std::to_string(i) + "]";
    if (!row.is_array() || row.empty()) fail(at, "expected an array");
    if (cols < 0) {
      cols = static_cast<Eigen::Index>(row.size());
      out.resize(rows, cols);
    }
    if (static_cast<Eigen::Index>(row.size()) != cols) fail(at, "ragged matrix");
    for (Eigen::Index k = 0; k < cols; ++k) out(i, k) = get_number(row[static_cast<std::size_t>(k)], at);
  }
  return out;
}

// Wraps library validation errors so they point at the config field.
template <typename F>
auto at_field(const std::string& where, F f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    fail(where, e.what());
  }
}

JointInstrument parse_lindblad(const json& j, const std::string& where) {
  LindbladSpec spec;
  spec.hamiltonian = io::matrix_from_json(field(j, "hamiltonian", where), where + ".hamiltonian");
  spec.dt = get_number(field(j, "dt", where), where + ".dt");
  if (j.contains("channels")) {
    const json& chans = j.at("channels");
    if (!chans.is_array()) fail(where + ".channels", "expected an array");
    for (std::size_t c = 0; c < chans.size(); ++c) {
      const std::string at = where + ".channels[" + std::to_string(c) + "]";
      JumpChannel ch;
      ch.name = chans[c].contains("name") ? get_string(chans[c].at("name"), at + ".name") : "";
      ch.op = io::matrix_from_json(field(chans[c], "operator", at), at + ".operator");
      if (chans[c].contains("efficiency")) ch.efficiency = get_number(chans[c].at("efficiency"), at + ".efficiency");
      if (chans[c].contains("detection")) {
        const std::string det = get_string(chans[c].at("detection"), at + ".detection");
        if (det == "jump") ch.detection = Detection::JumpLike;
        else if (det == "homodyne") ch.detection = Detection::HomodyneLike;
        else fail(at + ".detection", "expected \"jump\" or \"homodyne\"");
      }
      spec.channels.push_back(std::move(ch));
    }
  }
  return at_field(where, [&] { return discretize(spec); });
}

Instrument parse_instrument(const json& j, const std::string& where) {
  const json& outs = field(j, "outcomes", where);
  if (!outs.is_array() || outs.empty()) fail(where + ".outcomes", "expected a non-empty array");
  std::vector<std::string> labels;
  std::vector<ConditionalOp> ops;
  for (std::size_t y = 0; y < outs.size(); ++y) {
    const std::string at = where + ".outcomes[" + std::to_string(y) + "]";
    labels.push_back(get_string(field(outs[y], "label", at), at + ".label"));
    const json& kraus = field(outs[y], "kraus", at);
    if (!kraus.is_array() || kraus.empty()) fail(at + ".kraus", "expected a non-empty array of matrices");
    std::vector<Matrix> ks;
    for (std::size_t k = 0; k < kraus.size(); ++k) {
      ks.push_back(io::matrix_from_json(kraus[k], at + ".kraus[" + std::to_string(k) + "]"));
    }
    ops.push_back(at_field(at, [&] { return ConditionalOp(std::move(ks)); }));
  }
  return at_field(where, [&] { return Instrument(std::move(labels), std::move(ops)); });
}

JointInstrument parse_joint(const json& j, const std::string& where) {
  const std::vector<std::string> alice = get_labels(field(j, "alice_labels", where), where + ".alice_labels");
  const std::vector<std::string> bob = get_labels(field(j, "bob_labels", where), where + ".bob_labels");
  const json& entries = field(j, "entries", where);
  if (!entries.is_array() || entries.empty()) fail(where + ".entries", "expected a non-empty array");
  auto find = [](const std::vector<std::string>& v, const std::string& s, const std::string& at) {
    const auto it = std::find(v.begin(), v.end(), s);
    if (it == v.end()) fail(at, "unknown label '" + s + "'");
    return static_cast<std::size_t>(it - v.begin());
  };
  std::vector<JointInstrument::Entry> es;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::string at = where + ".entries[" + std::to_string(i) + "]";
    JointInstrument::Entry e;
    e.alice = find(alice, get_string(field(entries[i], "alice", at), at + ".alice"), at + ".alice");
    e.bob = find(bob, get_string(field(entries[i], "bob", at), at + ".bob"), at + ".bob");
    e.kraus = io::matrix_from_json(field(entries[i], "kraus", at), at + ".kraus");
    es.push_back(std::move(e));
  }
  return at_field(where, [&] { return JointInstrument(alice, bob, std::move(es)); });
}

DensityOperator named_state(const std::string& name, Eigen::Index d, const std::string& where) {
  if (name == "maximally_mixed") return DensityOperator::maximally_mixed(d);
  Vector v = Vector::Zero(d);
  if (name == "ground") {
    v(0) = 1.0;
  } else if (name == "plus") {
    v.setConstant(1.0 / std::sqrt(static_cast<double>(d)));
  } else {
    fail(where, "unknown named state '" + name + "' (expected maximally_mixed, ground, or plus)");
  }
  return DensityOperator::pure(v);
}

bool is_diagonal(const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      if (i != k && std::abs(m(i, k)) > 1e-12) return false;
    }
  }
  return true;
}

}  // namespace

std::vector<PriorKind> all_prior_kinds() {
  return {PriorKind::PF, PriorKind::GW, PriorKind::GWVariant, PriorKind::PFVariant, PriorKind::CLHS};
}

Instrument classical_instrument(const classical::ClassicalModel& model) {
  const auto n = static_cast<Eigen::Index>(model.n_states());
  std::vector<ConditionalOp> ops;
  for (std::size_t y = 0; y < model.n_outcomes(); ++y) {
    std::vector<Matrix> kraus;
    for (Eigen::Index from = 0; from < n; ++from) {
      for (Eigen::Index to = 0; to < n; ++to) {
        const double w = model.transition()(to, from) * model.likelihood()(static_cast<Eigen::Index>(y), from);
        if (w <= 0.0) continue;
        Matrix k = Matrix::Zero(n, n);
        k(to, from) = std::sqrt(w);
        kraus.push_back(std::move(k));
      }
    }
    if (kraus.empty()) kraus.push_back(Matrix::Zero(n, n));
    ops.emplace_back(std::move(kraus));
  }
  return Instrument(model.labels(), std::move(ops));
}

classical::ClassicalModel classical_model_from_instrument(const Instrument& instrument) {
  const Eigen::Index n = instrument.dim();
  const auto m = static_cast<Eigen::Index>(instrument.size());
  // phi_y(x|x') = sum_k |K_k(x, x')|^2 when every column of every K_k has at most one nonzero.
  std::vector<classical::RealMatrix> phi;
  for (std::size_t y = 0; y < instrument.size(); ++y) {
    classical::RealMatrix p = classical::RealMatrix::Zero(n, n);
    for (const Matrix& k : instrument.op(y).kraus()) {
      for (Eigen::Index col = 0; col < n; ++col) {
        int nonzero = 0;
        for (Eigen::Index row = 0; row < n; ++row) {
          if (std::abs(k(row, col)) > 1e-14) ++nonzero;
          p(row, col) += std::norm(k(row, col));
        }
        if (nonzero > 1) {
          throw Error(ErrorCode::NotClassicalLimit, "outcome '" + instrument.labels()[y] +
                                                        "' has a Kraus operator that creates coherence");
        }
      }
    }
    phi.push_back(std::move(p));
  }
  classical::RealMatrix d = classical::RealMatrix::Zero(n, n);
  for (const auto& p : phi) d += p;
  classical::RealMatrix l(m, n);
  for (Eigen::Index y = 0; y < m; ++y) l.row(y) = phi[static_cast<std::size_t>(y)].colwise().sum();
  for (Eigen::Index y = 0; y < m; ++y) {
    const classical::RealMatrix product = d * l.row(y).asDiagonal();
    if ((product - phi[static_cast<std::size_t>(y)]).cwiseAbs().maxCoeff() > 1e-12) {
      throw Error(ErrorCode::NotClassicalLimit,
                  "outcome '" + instrument.labels()[static_cast<std::size_t>(y)] +
                      "' does not factor as transition times likelihood");
    }
  }
  return classical::ClassicalModel(d, l, instrument.labels());
}

Scenario parse_scenario(const json& j, const std::string& source) {
  if (!j.is_object()) fail(source, "scenario must be a JSON object");
  Scenario s;
  s.name = j.contains("name") ? get_string(j.at("name"), source + ".name") : "unnamed";
  const std::string sys_at = source + ".system";
  const json& sys = field(j, "system", source);
  const std::string type = get_string(field(sys, "type", sys_at), sys_at + ".type");

  std::optional<classical::RealVector> classical_prior;
  if (type == "lindblad") {
    s.joint = parse_lindblad(sys, sys_at);
  } else if (type == "joint_instrument") {
    s.joint = parse_joint(sys, sys_at);
  } else if (type == "instrument") {
    s.instrument = parse_instrument(sys, sys_at);
  } else if (type == "classical") {
    const classical::RealMatrix d = real_matrix(field(sys, "transition", sys_at), sys_at + ".transition");
    const classical::RealMatrix l = real_matrix(field(sys, "likelihood", sys_at), sys_at + ".likelihood");
    std::vector<std::string> labels;
    if (sys.contains("labels")) {
      labels = get_labels(sys.at("labels"), sys_at + ".labels");
    } else {
      for (Eigen::Index y = 0; y < l.rows(); ++y) labels.push_back(std::to_string(y));
    }
    s.classical = at_field(sys_at, [&] { return classical::ClassicalModel(d, l, labels); });
    s.instrument = classical_instrument(*s.classical);
    s.diagonal = true;
  } else {
    fail(sys_at + ".type", "expected lindblad, instrument, joint_instrument, or classical");
  }
  if (s.joint) s.instrument = alice_marginal(*s.joint);
  const Eigen::Index d = s.instrument->dim();

  if (sys.contains("diagonal") && sys.at("diagonal").is_boolean() && sys.at("diagonal").get<bool>()) {
    s.diagonal = true;
  }

  const std::string rho_at = source + ".rho0";
  if (j.contains("rho0")) {
    const json& r = j.at("rho0");
    s.rho0 = r.is_string() ? named_state(r.get<std::string>(), d, rho_at) : io::density_from_json(r, rho_at);
  } else if (s.classical && sys.contains("prior")) {
    const classical::RealMatrix p = real_matrix(json::array({sys.at("prior")}), sys_at + ".prior");
    if (p.cols() != d) fail(sys_at + ".prior", "length differs from the number of states");
    s.rho0 = at_field(sys_at + ".prior", [&] { return DensityOperator(p.row(0).transpose().cast<Complex>().asDiagonal()); });
  } else {
    s.rho0 = DensityOperator::maximally_mixed(d);
  }
  if (s.rho0.dim() != d) fail(rho_at, "dimension differs from the system dimension " + std::to_string(d));

  if (s.diagonal) {
    if (!is_diagonal(s.rho0.matrix())) fail(rho_at, "diagonal scenarios need a diagonal initial state");
    if (!s.classical) {
      s.classical = at_field(sys_at, [&] { return classical_model_from_instrument(*s.instrument); });
    }
  }

  s.steps = get_unsigned(field(j, "steps", source), source + ".steps");
  s.smoothing_index = j.contains("smoothing_index")
                          ? get_unsigned(j.at("smoothing_index"), source + ".smoothing_index")
                          : s.steps / 2;
  if (s.smoothing_index > s.steps) fail(source + ".smoothing_index", "exceeds steps");

  if (j.contains("priors")) {
    const json& p = j.at("priors");
    if (!p.is_array() || p.empty()) fail(source + ".priors", "expected a non-empty array");
    for (std::size_t i = 0; i < p.size(); ++i) {
      const std::string at = source + ".priors[" + std::to_string(i) + "]";
      s.priors.push_back(at_field(at, [&] { return parse_prior_kind(get_string(p[i], at)); }));
    }
  } else {
    s.priors = all_prior_kinds();
    if (!s.joint) std::erase_if(s.priors, [](PriorKind k) { return k == PriorKind::GW || k == PriorKind::GWVariant; });
  }
  for (const PriorKind k : s.priors) {
    if ((k == PriorKind::GW || k == PriorKind::GWVariant) && !s.joint) {
      fail(source + ".priors", "prior '" + std::string(to_string(k)) + "' needs a joint instrument or Lindblad system");
    }
  }

  if (j.contains("custom_prior")) {
    const std::string at = source + ".custom_prior";
    const json& c = j.at("custom_prior");
    CustomPriorTemplate t;
    t.state = io::matrix_from_json(field(c, "state", at), at + ".state");
    const json& dims = field(c, "dims", at);
    if (!dims.is_array() || dims.size() != 2) fail(at + ".dims", "expected [d_Q, d_A]");
    t.dims = Dims{static_cast<Eigen::Index>(get_unsigned(dims[0], at + ".dims[0]")),
                  static_cast<Eigen::Index>(get_unsigned(dims[1], at + ".dims[1]"))};
    if (t.dims.q != d || t.dims.total() != t.state.rows()) fail(at + ".dims", "inconsistent with the state or system");
    at_field(at, [&] { return FilteredGlobalState(PriorKind::Custom, t.state, t.dims); });
    s.custom_prior = std::move(t);
  }
  const bool wants_custom = std::find(s.priors.begin(), s.priors.end(), PriorKind::Custom) != s.priors.end();
  if (wants_custom && !s.custom_prior) fail(source + ".priors", "prior 'custom' needs a custom_prior field");

  if (j.contains("seed")) s.seed = get_unsigned(j.at("seed"), source + ".seed");
  if (j.contains("enumeration_cap")) {
    s.enumeration_cap = get_unsigned(j.at("enumeration_cap"), source + ".enumeration_cap");
  }
  if (j.contains("output")) s.output_dir = get_string(j.at("output"), source + ".output");
  return s;
}

void apply_cap_override(Scenario& scenario) {
  const char* env = std::getenv("RETROSMOOTH_CAP");
  if (env == nullptr || *env == '\0') return;
  char* end = nullptr;
  const unsigned long long cap = std::strtoull(env, &end, 10);
  if (end == env || *end != '\0' || cap == 0) fail("RETROSMOOTH_CAP", "expected a positive integer");
  scenario.enumeration_cap = static_cast<std::size_t>(cap);
}

Scenario load_scenario(const std::string& path) {
  Scenario s = parse_scenario(io::read_json_file(path), path);
  apply_cap_override(s);
  return s;
}

io::json demo_scenario_json() {
  // H = (Omega/2) X, L = sqrt(kappa) sigma_-, ground state |0>.
  return json{
      {"name", "driven-damped-qubit"},
      {"system",
       {{"type", "lindblad"},
        {"hamiltonian", {{"real", {{0.0, 0.5}, {0.5, 0.0}}}}},
        {"dt", 0.02},
        {"channels",
         {{{"name", "decay"}, {"operator", {{"real", {{0.0, 1.0}, {0.0, 0.0}}}}}, {"efficiency", 0.5},
           {"detection", "jump"}}}}}},
      {"rho0", "maximally_mixed"},
      {"steps", 4},
      {"smoothing_index", 2},
      {"priors", {"pf", "gw", "gw-variant", "pf-variant", "clhs"}},
      {"seed", 20260101},
      {"enumeration_cap", 1000000}};
}

Scenario demo_scenario() { return parse_scenario(demo_scenario_json(), "builtin:driven-damped-qubit"); }

io::json classical_scenario_json(std::size_t n_states) {
  if (n_states == 2) {
    return json{{"name", "classical-two-state"},
                {"system",
                 {{"type", "classical"},
                  {"transition", {{0.9, 0.2}, {0.1, 0.8}}},
                  {"likelihood", {{0.8, 0.3}, {0.2, 0.7}}},
                  {"labels", {"0", "1"}},
                  {"prior", {0.5, 0.5}}}},
                {"steps", 5},
                {"smoothing_index", 2},
                {"priors", {"pf"}}};
  }
  if (n_states == 3) {
    return json{{"name", "classical-three-state"},
                {"system",
                 {{"type", "classical"},
                  {"transition", {{0.7, 0.1, 0.2}, {0.2, 0.6, 0.1}, {0.1, 0.3, 0.7}}},
                  {"likelihood", {{0.6, 0.2, 0.1}, {0.4, 0.8, 0.9}}},
                  {"labels", {"a", "b"}},
                  {"prior", {0.5, 0.3, 0.2}}}},
                {"steps", 5},
                {"smoothing_index", 2},
                {"priors", {"pf"}}};
  }
  throw Error(ErrorCode::ConfigError, "no built-in classical scenario with " + std::to_string(n_states) + " states");
}

}  // namespace retrosmooth
