/*
 * Copyright 2026 The symsurrogate Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SYMSURROGATE_STUDY_HPP_
#define SYMSURROGATE_STUDY_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "symsurrogate/dataset.hpp"
#include "symsurrogate/megp.hpp"
#include "symsurrogate/spfp.hpp"

namespace symsurrogate::study {

// Bad configuration, inconsistent artifacts or unusable data.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An upstream stage has not produced its artifact yet.
class MissingArtifact : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AnalysisSettings {
  std::size_t knots = 20;
  std::size_t bootstrap = 200;
  std::uint64_t seed = 0;
  // Effect curves are drawn for this many of the most important dims.
  std::size_t top_dims = 5;
};

struct StudyConfig {
  std::filesystem::path dataset;
  std::string name = "study";
  double val_fraction = 0.1;
  std::uint64_t split_seed = 0;
  bool pool = false;
  megp::GpConfig gp;
  spfp::SpfpConfig spfp;
  std::vector<std::uint64_t> seeds;  // defaults to 0..29
  std::filesystem::path out = "study_out";
  AnalysisSettings analysis;

  StudyConfig();

  // Relative paths resolve against `base_dir`.
  static StudyConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
  static StudyConfig load(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  // FNV-1a-64 over the canonical JSON of everything that shapes results
  // (data bytes, splits, GP and partition settings); seeds and the output
  // directory are excluded so studies can be extended.
  std::string digest() const;
};

// "a..b" (inclusive) or a single integer.
std::vector<std::uint64_t> parse_seed_range(const std::string& text);

struct Prepared {
  data::EmbeddingDataset dataset;  // standardized; test rows NaN when sealed
  megp::TrainData train;
  Matrix X_test;
  std::vector<std::uint32_t> y_test;
};

// Load, split, optionally pool, and standardize on train statistics. With
// `allow_test` false every test row is overwritten with NaN so that any
// stage touching it produces visibly poisoned output.
Prepared prepare(const StudyConfig& config, bool allow_test);

void cmd_partition(const StudyConfig& config, std::ostream& log);
void cmd_train(const StudyConfig& config, std::size_t jobs, std::ostream& log);
void cmd_select(const StudyConfig& config, std::ostream& log);
void cmd_calibrate(const StudyConfig& config, std::ostream& log);
void cmd_evaluate(const StudyConfig& config, std::ostream& log);
void cmd_analyze(const StudyConfig& config, std::ostream& log);
void cmd_report(const StudyConfig& config, std::ostream& log);

// Artifact locations inside config.out.
std::filesystem::path partition_path(const StudyConfig& config);
std::filesystem::path run_path(const StudyConfig& config, std::uint64_t seed);

}  // namespace symsurrogate::study

#endif  // SYMSURROGATE_STUDY_HPP_
