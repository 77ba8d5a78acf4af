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

#include "retrosmooth/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "retrosmooth/error.hpp"

namespace retrosmooth::io {

namespace {

[[noreturn]] void config_error(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::ConfigError, where + ": " + what);
}

Eigen::MatrixXd real_block(const json& rows, const std::string& where) {
  if (!rows.is_array() || rows.empty()) config_error(where, "expected a non-empty array of rows");
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const json& row = rows[static_cast<std::size_t>(i)];
    const std::string at = where + "[" + std::to_string(i) + "]";
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) config_error(at, "matrix must be square");
    for (Eigen::Index k = 0; k < n; ++k) {
      const json& v = row[static_cast<std::size_t>(k)];
      if (!v.is_number()) config_error(at + "[" + std::to_string(k) + "]", "expected a number");
      out(i, k) = v.get<double>();
    }
  }
  return out;
}

}  // namespace

json matrix_to_json(const Matrix& m) {
  json real = json::array();
  json imag = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json r = json::array();
    json c = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      r.push_back(m(i, k).real());
      c.push_back(m(i, k).imag());
    }
    real.push_back(std::move(r));
    imag.push_back(std::move(c));
  }
  return json{{"dim", m.rows()}, {"real", std::move(real)}, {"imag", std::move(imag)}};
}

Matrix matrix_from_json(const json& j, const std::string& where) {
  if (j.is_array()) return real_block(j, where).cast<Complex>();
  if (!j.is_object() || !j.contains("real")) config_error(where, "expected {\"real\": [[...]], \"imag\": [[...]]}");
  const Eigen::MatrixXd re = real_block(j.at("real"), where + ".real");
  Eigen::MatrixXd im = Eigen::MatrixXd::Zero(re.rows(), re.cols());
  if (j.contains("imag")) {
    im = real_block(j.at("imag"), where + ".imag");
    if (im.rows() != re.rows()) config_error(where, "real and imaginary parts differ in size");
  }
  if (j.contains("dim") && (!j.at("dim").is_number_integer() || j.at("dim").get<Eigen::Index>() != re.rows())) {
    config_error(where + ".dim", "does not match the matrix size");
  }
  Matrix out(re.rows(), re.cols());
  out.real() = re;
  out.imag() = im;
  return out;
}

json density_to_json(const DensityOperator& rho) { return matrix_to_json(rho.matrix()); }

DensityOperator density_from_json(const json& j, const std::string& where) {
  const Matrix m = matrix_from_json(j, where);
  try {
    return DensityOperator(m);
  } catch (const Error& e) {
    config_error(where, e.what());
  }
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += sep;
    out += parts[i];
  }
  return out;
}

json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t pos = std::min(e.byte == 0 ? 0 : e.byte - 1, text.size());
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < pos; ++i) {
      if (text[i] == '\n') ++line, col = 1;
      else ++col;
    }
    throw Error(ErrorCode::ConfigError, source + ":" + std::to_string(line) + ":" + std::to_string(col) +
                                            ": JSON syntax error");
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json_text(ss.str(), path);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::ConfigError, "cannot write " + path);
  out << content;
  if (!out) throw Error(ErrorCode::ConfigError, "write failed for " + path);
}

void ensure_directory(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) throw Error(ErrorCode::ConfigError, "cannot create directory " + path + ": " + ec.message());
}

}  // namespace retrosmooth::io
