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

#ifndef SYMSURROGATE_MODELSELECT_HPP_
#define SYMSURROGATE_MODELSELECT_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"
#include "symsurrogate/matrix.hpp"
#include "symsurrogate/megp.hpp"

namespace symsurrogate::select {

// Row-wise argmax; ties go to the lowest class index.
std::vector<std::uint32_t> argmax_rows(const Matrix& scores);

// Unweighted mean of per-class F1. A class with precision + recall = 0
// contributes 0.
double macro_f1(std::span<const std::uint32_t> pred, std::span<const std::uint32_t> truth,
                std::size_t num_classes);

// Standard error of the mean; requires at least two scores.
double se_of_runs(std::span<const double> scores);

// The fields the selection rule looks at.
struct Candidate {
  double score = 0.0;
  std::size_t complexity = 0;
  std::size_t depth = 0;
  std::size_t unique_dims = 0;
  std::uint64_t digest = 0;
};

Candidate candidate_of(const megp::RunRecord& record);

struct SelectionReport {
  double best_score = 0.0;  // m*
  double se = 0.0;
  std::vector<bool> feasible;
  std::size_t chosen = 0;
  std::uint64_t chosen_seed = 0;

  nlohmann::json to_json(std::span<const megp::RunRecord> runs) const;
};

// 1-SE rule: among runs scoring at least m* - SE, the lexicographic minimum
// of (complexity, depth, unique dims, digest). A single run has SE = 0.
SelectionReport select_canonical(std::span<const Candidate> candidates);
SelectionReport select_canonical(std::span<const megp::RunRecord> runs);

const megp::RunRecord& canonical(std::span<const megp::RunRecord> runs);

}  // namespace symsurrogate::select

#endif  // SYMSURROGATE_MODELSELECT_HPP_
