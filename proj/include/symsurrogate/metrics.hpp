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

#ifndef SYMSURROGATE_METRICS_HPP_
#define SYMSURROGATE_METRICS_HPP_

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "symsurrogate/matrix.hpp"

namespace symsurrogate::metrics {

// Rank AUC of `scores` for the positive rows, midranks on ties.
double auc_binary(std::span<const double> scores, std::span<const bool> positive);

struct AucResult {
  double value = 0.0;
  // Classes absent from the labels (or present in every row) are left out
  // of the average.
  std::vector<std::size_t> skipped;
};

// Unweighted one-vs-rest mean over classes.
AucResult auc_macro_ovr(const Matrix& probs, std::span<const std::uint32_t> y,
                        std::size_t num_classes);

// 0.975 quantile of Student's t; tabulated for df 1..120, normal beyond.
double t_quantile_975(std::size_t df);

struct Interval {
  double mean = 0.0;
  double halfwidth = 0.0;
};

// mean +/- t(0.975, R-1) * s / sqrt(R); requires R >= 2.
Interval t_interval(std::span<const double> values);

struct RunSummary {
  std::string name;
  std::vector<double> values;
  Interval interval;
};

RunSummary summarize(std::string name, std::vector<double> values);

// One row per dataset, mean and halfwidth per metric column.
void write_metrics_csv(std::ostream& out, const std::string& dataset,
                       std::span<const RunSummary> columns);

}  // namespace symsurrogate::metrics

#endif  // SYMSURROGATE_METRICS_HPP_
