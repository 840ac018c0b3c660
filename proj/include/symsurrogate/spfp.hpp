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

#ifndef SYMSURROGATE_SPFP_HPP_
#define SYMSURROGATE_SPFP_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "symsurrogate/matrix.hpp"
#include "json.hpp"

namespace symsurrogate::spfp {

struct SpfpConfig {
  // View size budget N_F; 0 selects ceil(0.1 * d).
  std::size_t budget = 0;
  // Recorded for provenance; finalized views always leave the pool whole.
  double removal_fraction = 0.2;
  // Coverage level reported by the preservation check.
  double preservation_threshold = 0.9;
  // Cap on the F statistic of perfectly separating features.
  double f_max = 1e12;

  std::size_t effective_budget(std::size_t d) const;
  nlohmann::json to_json() const;
  static SpfpConfig from_json(const nlohmann::json& j);
};

struct ViewPartition {
  std::vector<std::vector<std::size_t>> views;
  std::size_t d = 0;
  SpfpConfig config;
  // Per view: share of the pool's relevance captured when the view closed.
  std::vector<double> coverage;

  std::size_t view_of(std::size_t coordinate) const;
  // Disjoint, exhaustive over [0, d), every view non-empty.
  bool valid() const;
  std::string digest() const;

  nlohmann::json to_json() const;
  static ViewPartition from_json(const nlohmann::json& j);
};

// One-way ANOVA F statistic of `column` grouped by class; 0 for degenerate
// input, capped at f_max.
double relevance(std::span<const double> column, std::span<const std::uint32_t> y,
                 double f_max = 1e12);

double pearson(std::span<const double> a, std::span<const double> b);

// Mean |Pearson| between coordinate j and each member of `view`.
double redundancy(std::size_t j, std::span<const std::size_t> view, const Matrix& X_train);

// Greedy relevance-minus-redundancy growth over `pool` (ascending indices).
// Returns the selected coordinates in selection order.
std::vector<std::size_t> grow_view(std::span<const std::size_t> pool, const Matrix& X_train,
                                   std::span<const std::uint32_t> y, std::size_t budget,
                                   const SpfpConfig& config = {});

ViewPartition partition(const Matrix& X_train, std::span<const std::uint32_t> y,
                        const SpfpConfig& config = {});

}  // namespace symsurrogate::spfp

#endif  // SYMSURROGATE_SPFP_HPP_
