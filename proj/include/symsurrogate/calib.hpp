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

#ifndef SYMSURROGATE_CALIB_HPP_
#define SYMSURROGATE_CALIB_HPP_

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <utility>
#include <vector>

#include "json.hpp"
#include "symsurrogate/matrix.hpp"

namespace symsurrogate::calib {

inline constexpr double kProbFloor = 1e-6;
inline constexpr std::size_t kBins = 20;

// Minimizes validation NLL over ln T with golden-section search on
// T in [0.05, 20]. All-equal logits give T = 1.
double fit_temperature(const Matrix& z_val, std::span<const std::uint32_t> y_val);

// Mean clipped NLL of softmax(z / T).
double nll_at(const Matrix& z, std::span<const std::uint32_t> y, double temperature);

// softmax(z / T); throws std::invalid_argument unless T > 0.
Matrix apply_temperature(const Matrix& z, double temperature);

// Clips every entry to [1e-6, 1 - 1e-6] and renormalizes rows.
Matrix clip_renormalize(const Matrix& probs);

// Top-label expected calibration error over equal-width bins.
double ece(const Matrix& probs, std::span<const std::uint32_t> y, std::size_t bins = kBins);
// Sum over classes of squared error, averaged over rows (no 1/K factor).
double brier(const Matrix& probs, std::span<const std::uint32_t> y);
double log_loss(const Matrix& probs, std::span<const std::uint32_t> y);

// Two-sided Clopper-Pearson interval for k successes in n trials.
std::pair<double, double> clopper_pearson(std::size_t successes, std::size_t trials,
                                          double alpha = 0.05);

struct ReliabilityBin {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t count = 0;
  double confidence = 0.0;
  double accuracy = 0.0;
  double cp_lo = 0.0;
  double cp_hi = 0.0;
};

// Non-empty bins only, in increasing confidence.
std::vector<ReliabilityBin> reliability(const Matrix& probs, std::span<const std::uint32_t> y,
                                        std::size_t bins = kBins);

void write_reliability_csv(std::ostream& out, std::span<const ReliabilityBin> bins);

struct ProbabilityScores {
  double log_loss = 0.0;
  double brier = 0.0;
  double ece = 0.0;
  double macro_f1 = 0.0;
};

ProbabilityScores score(const Matrix& probs, std::span<const std::uint32_t> y,
                        std::size_t num_classes);

struct CalibrationReport {
  double temperature = 1.0;
  double val_nll_before = 0.0;
  double val_nll_after = 0.0;
  ProbabilityScores before;
  ProbabilityScores after;
  std::vector<ReliabilityBin> bins_before;
  std::vector<ReliabilityBin> bins_after;

  nlohmann::json to_json() const;
};

// Fits T on validation logits and scores the test logits before and after.
CalibrationReport calibrate(const Matrix& z_val, std::span<const std::uint32_t> y_val,
                            const Matrix& z_test, std::span<const std::uint32_t> y_test);

}  // namespace symsurrogate::calib

#endif  // SYMSURROGATE_CALIB_HPP_
