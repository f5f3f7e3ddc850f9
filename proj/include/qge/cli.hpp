// Copyright 2026 The qge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "qge/evolution.hpp"
#include "qge/grammar.hpp"
#include "qge/quantum.hpp"

namespace qge::cli {

/// Bad configuration or arguments; maps to exit status 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Everything a solve run depends on.
struct RunConfig {
  /// box, harmonic, harmonic-paper or custom.
  std::string preset = "box";
  quantum::ProblemSpec problem = quantum::box_preset();
  evolution::EvolutionConfig evolution;
  expr::RbfConfig rbf;
  /// Grammar file; empty selects the builtin variant below.
  std::string grammar_path;
  grammar::BuiltinVariant builtin = grammar::BuiltinVariant::x_only;
  /// auto, scalar, avx2 or neon.
  std::string kernel = "auto";

  /// Throws ValidationError.
  void validate() const;
};

nlohmann::ordered_json to_json(const RunConfig& cfg);
/// Keys absent from `j` keep their defaults; the problem preset is applied
/// before the other problem keys. Unknown keys throw ValidationError.
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);

grammar::Grammar load_grammar(const RunConfig& cfg);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

nlohmann::ordered_json report_to_json(const RunConfig& cfg, const evolution::RunReport& r);
/// Header "t,best,mean,worst,pc,invalid_count" and one row per generation.
std::string trace_csv(const evolution::RunReport& r);
/// Writes report.json and trace.csv into `dir` (created if needed).
void write_outputs(const std::filesystem::path& dir, const RunConfig& cfg,
                   const evolution::RunReport& r);

/// Full command line entry point: solve | map | eval | oracle | grammar-check.
/// Returns 0 on success, 2 on validation errors, 1 on runtime failures.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qge::cli
