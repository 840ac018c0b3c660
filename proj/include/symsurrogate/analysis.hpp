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

#ifndef SYMSURROGATE_ANALYSIS_HPP_
#define SYMSURROGATE_ANALYSIS_HPP_

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "symsurrogate/matrix.hpp"
#include "symsurrogate/program.hpp"

namespace symsurrogate::analysis {

using expr::Program;

// One signed summand of a logit after flattening its top-level +/- chain.
struct AdditiveTerm {
  Program term;
  int sign = 1;
  std::set<std::uint32_t> dims;
};

// plus(a, b) contributes the terms of a and b; minus(a, b) flips the sign of
// b's terms. Products, quotients and leaves are atomic.
std::vector<AdditiveTerm> additive_terms(const Program& logit);

// Per-class logit programs with a softmax temperature.
struct Model {
  std::vector<Program> logits;
  double temperature = 1.0;

  std::size_t num_classes() const { return logits.size(); }
  Matrix logit_values(const Matrix& X) const;
  Matrix probabilities(const Matrix& X) const;
};

struct DimImportance {
  std::size_t dim = 0;
  double importance = 0.0;   // mean absolute term contribution
  double pct_logits = 0.0;   // share of logits using the dim, in percent
  std::size_t max_power = 0;
};

// Largest number of times `dim` is multiplied into itself along any path:
// products add their operands' powers, every other operator takes the max.
std::size_t syntactic_power(const Program& program, std::uint32_t dim);

// Importance of every coordinate 0..X.cols()-1 with terms pooled over all
// logits.
std::vector<DimImportance> importance(const Model& model, const Matrix& X);

enum class CurveKind { kPdp, kAle };

struct EffectCurve {
  CurveKind kind = CurveKind::kPdp;
  std::size_t dim = 0;
  std::size_t target_class = 0;
  std::vector<double> grid;
  std::vector<double> values;
  std::vector<double> ci_lo;
  std::vector<double> ci_hi;
  // ALE only: count of rows per bin (bin k spans grid[k-1]..grid[k]).
  std::vector<std::size_t> bin_counts;

  double range() const;         // max - min of values
  double abs_integral() const;  // trapezoid of |values| over the grid
};

// Deduplicated empirical quantiles at levels k/(knots-1), linear
// interpolation between order statistics.
std::vector<double> quantile_grid(std::span<const double> column, std::size_t knots = 20);

struct EffectOptions {
  std::size_t knots = 20;
  std::size_t bootstrap = 200;
  std::uint64_t seed = 0;
};

EffectCurve pdp(const Model& model, const Matrix& X, std::size_t dim, std::size_t target_class,
                const EffectOptions& options = {});

// Centered first-order accumulated local effects.
EffectCurve ale(const Model& model, const Matrix& X, std::size_t dim, std::size_t target_class,
                const EffectOptions& options = {});

// |Spearman rho| between knot order and curve values; a constant curve
// scores 0. Needs at least three knots.
double monotonicity(const EffectCurve& curve);

// (dim, number of logits using it), most used first.
std::vector<std::pair<std::size_t, std::size_t>> usage_histogram(std::span<const Program> logits);

struct OverlapPattern {
  std::vector<std::size_t> logits;  // ids of the logits sharing the dims
  std::size_t dim_count = 0;
};

// Only the membership patterns that actually occur, largest first.
std::vector<OverlapPattern> overlap_sets(std::span<const Program> logits);

void write_importance_csv(std::ostream& out, std::span<const DimImportance> rows);
void write_curves_csv(std::ostream& out, std::span<const EffectCurve> curves);
void write_usage_csv(std::ostream& out,
                     std::span<const std::pair<std::size_t, std::size_t>> histogram);
void write_overlap_csv(std::ostream& out, std::span<const OverlapPattern> patterns);

}  // namespace symsurrogate::analysis

#endif  // SYMSURROGATE_ANALYSIS_HPP_
