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

#include <string>
#include <vector>

#include <json.hpp>

#include "retrosmooth/linalg.hpp"

namespace retrosmooth::io {

using nlohmann::json;

/// {"dim": n, "real": [[...]], "imag": [[...]]}; "imag" may be omitted on input.
json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const json& j, const std::string& where);

json density_to_json(const DensityOperator& rho);
DensityOperator density_from_json(const json& j, const std::string& where);

/// 17 significant digits, enough to round-trip a double.
std::string format_double(double x);

std::string join(const std::vector<std::string>& parts, const std::string& sep);

/// Parses a JSON file; syntax errors are reported with line and column.
json read_json_file(const std::string& path);

json parse_json_text(const std::string& text, const std::string& source);

void write_text_file(const std::string& path, const std::string& content);

/// Creates the directory (and parents) when missing.
void ensure_directory(const std::string& path);

}  // namespace retrosmooth::io
