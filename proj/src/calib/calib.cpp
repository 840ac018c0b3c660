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

#include "symsurrogate/calib.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/special_functions/beta.hpp>

#include "symsurrogate/modelselect.hpp"

namespace symsurrogate::calib {

namespace {

void check(const Matrix& m, std::span<const std::uint32_t> y, const char* what) {
  if (m.rows() != y.size()) throw std::invalid_argument(std::string(what) + ": row count mismatch");
  for (auto label : y) {
    if (label >= m.cols()) throw std::invalid_argument(std::string(what) + ": label out of range");
  }
}

std::size_t top_label(std::span<const double> row) {
  return static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
}

std::size_t bin_of(double confidence, std::size_t bins) {
  const auto b = static_cast<std::size_t>(std::floor(confidence * static_cast<double>(bins)));
  return std::min(b, bins - 1);
}

// Smallest p with f(p) >= target for an increasing f on [0, 1].
template <typename F>
double bisect(F f, double target) {
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double nll_at(const Matrix& z, std::span<const std::uint32_t> y, double temperature) {
  check(z, y, "nll_at");
  if (z.rows() == 0) throw std::invalid_argument("nll_at: no rows");
  double total = 0.0;
  for (std::size_t i = 0; i < z.rows(); ++i) {
    const auto zi = z.row(i);
    const double m = *std::max_element(zi.begin(), zi.end());
    double sum = 0.0;
    for (double v : zi) sum += std::exp((v - m) / temperature);
    const double p = std::exp((zi[y[i]] - m) / temperature) / sum;
    total -= std::log(std::clamp(p, kProbFloor, 1.0 - kProbFloor));
  }
  return total / static_cast<double>(z.rows());
}

double fit_temperature(const Matrix& z_val, std::span<const std::uint32_t> y_val) {
  check(z_val, y_val, "fit_temperature");
  if (z_val.cols() < 2) throw std::invalid_argument("fit_temperature: need two classes");
  bool degenerate = true;
  for (std::size_t i = 0; i < z_val.rows() && degenerate; ++i) {
    const auto zi = z_val.row(i);
    degenerate = std::all_of(zi.begin(), zi.end(), [&](double v) { return v == zi[0]; });
  }
  if (degenerate) return 1.0;

  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = std::log(0.05);
  double b = std::log(20.0);
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = nll_at(z_val, y_val, std::exp(c));
  double fd = nll_at(z_val, y_val, std::exp(d));
  while (b - a > 1e-4) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = nll_at(z_val, y_val, std::exp(c));
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = nll_at(z_val, y_val, std::exp(d));
    }
  }
  // Never hand back a temperature that does worse than leaving logits alone.
  const double t = std::exp(0.5 * (a + b));
  return nll_at(z_val, y_val, t) <= nll_at(z_val, y_val, 1.0) ? t : 1.0;
}

Matrix apply_temperature(const Matrix& z, double temperature) {
  if (!(temperature > 0.0)) throw std::invalid_argument("apply_temperature: T must be positive");
  Matrix p(z.rows(), z.cols());
  for (std::size_t i = 0; i < z.rows(); ++i) {
    const auto zi = z.row(i);
    const double m = *std::max_element(zi.begin(), zi.end());
    double sum = 0.0;
    for (std::size_t c = 0; c < z.cols(); ++c) sum += p(i, c) = std::exp((zi[c] - m) / temperature);
    for (std::size_t c = 0; c < z.cols(); ++c) p(i, c) /= sum;
  }
  return p;
}

Matrix clip_renormalize(const Matrix& probs) {
  Matrix out(probs.rows(), probs.cols());
  for (std::size_t i = 0; i < probs.rows(); ++i) {
    double sum = 0.0;
    for (std::size_t c = 0; c < probs.cols(); ++c) {
      sum += out(i, c) = std::clamp(probs(i, c), kProbFloor, 1.0 - kProbFloor);
    }
    for (std::size_t c = 0; c < probs.cols(); ++c) out(i, c) /= sum;
  }
  return out;
}

double ece(const Matrix& probs, std::span<const std::uint32_t> y, std::size_t bins) {
  check(probs, y, "ece");
  if (bins == 0) throw std::invalid_argument("ece: no bins");
  std::vector<double> conf(bins, 0.0), hits(bins, 0.0), count(bins, 0.0);
  for (std::size_t i = 0; i < probs.rows(); ++i) {
    const auto row = probs.row(i);
    const std::size_t top = top_label(row);
    const std::size_t b = bin_of(row[top], bins);
    conf[b] += row[top];
    hits[b] += top == y[i] ? 1.0 : 0.0;
    count[b] += 1.0;
  }
  double total = 0.0;
  for (std::size_t b = 0; b < bins; ++b) {
    if (count[b] == 0.0) continue;
    total += count[b] / static_cast<double>(probs.rows()) *
             std::fabs(hits[b] / count[b] - conf[b] / count[b]);
  }
  return total;
}

double brier(const Matrix& probs, std::span<const std::uint32_t> y) {
  check(probs, y, "brier");
  double total = 0.0;
  for (std::size_t i = 0; i < probs.rows(); ++i) {
    for (std::size_t c = 0; c < probs.cols(); ++c) {
      const double e = probs(i, c) - (c == y[i] ? 1.0 : 0.0);
      total += e * e;
    }
  }
  return total / static_cast<double>(probs.rows());
}

double log_loss(const Matrix& probs, std::span<const std::uint32_t> y) {
  check(probs, y, "log_loss");
  double total = 0.0;
  for (std::size_t i = 0; i < probs.rows(); ++i) {
    total -= std::log(std::clamp(probs(i, y[i]), kProbFloor, 1.0 - kProbFloor));
  }
  return total / static_cast<double>(probs.rows());
}

std::pair<double, double> clopper_pearson(std::size_t successes, std::size_t trials,
                                          double alpha) {
  if (trials == 0 || successes > trials) {
    throw std::invalid_argument("clopper_pearson: need 0 <= k <= n with n > 0");
  }
  const auto k = static_cast<double>(successes);
  const auto n = static_cast<double>(trials);
  // P(X >= k | p) = I_p(k, n-k+1) and P(X <= k | p) = 1 - I_p(k+1, n-k).
  const double lo = successes == 0 ? 0.0 : bisect([&](double p) {
    return boost::math::ibeta(k, n - k + 1.0, p);
  }, alpha / 2.0);
  const double hi = successes == trials ? 1.0 : bisect([&](double p) {
    return boost::math::ibeta(k + 1.0, n - k, p);
  }, 1.0 - alpha / 2.0);
  return {lo, hi};
}

std::vector<ReliabilityBin> reliability(const Matrix& probs, std::span<const std::uint32_t> y,
                                        std::size_t bins) {
  check(probs, y, "reliability");
  std::vector<ReliabilityBin> all(bins);
  std::vector<std::size_t> hits(bins, 0);
  for (std::size_t b = 0; b < bins; ++b) {
    all[b].lower = static_cast<double>(b) / static_cast<double>(bins);
    all[b].upper = static_cast<double>(b + 1) / static_cast<double>(bins);
  }
  for (std::size_t i = 0; i < probs.rows(); ++i) {
    const auto row = probs.row(i);
    const std::size_t top = top_label(row);
    auto& bin = all[bin_of(row[top], bins)];
    ++bin.count;
    bin.confidence += row[top];
    if (top == y[i]) ++hits[static_cast<std::size_t>(&bin - all.data())];
  }
  std::vector<ReliabilityBin> out;
  for (std::size_t b = 0; b < bins; ++b) {
    auto bin = all[b];
    if (bin.count == 0) continue;
    bin.confidence /= static_cast<double>(bin.count);
    bin.accuracy = static_cast<double>(hits[b]) / static_cast<double>(bin.count);
    std::tie(bin.cp_lo, bin.cp_hi) = clopper_pearson(hits[b], bin.count);
    out.push_back(bin);
  }
  return out;
}

void write_reliability_csv(std::ostream& out, std::span<const ReliabilityBin> bins) {
  out << "bin_lo,bin_hi,n,conf,acc,cp_lo,cp_hi\n";
  out.precision(17);
  for (const auto& b : bins) {
    out << b.lower << ',' << b.upper << ',' << b.count << ',' << b.confidence << ','
        << b.accuracy << ',' << b.cp_lo << ',' << b.cp_hi << '\n';
  }
}

ProbabilityScores score(const Matrix& probs, std::span<const std::uint32_t> y,
                        std::size_t num_classes) {
  return {log_loss(probs, y), brier(probs, y), ece(probs, y),
          select::macro_f1(select::argmax_rows(probs), y, num_classes)};
}

namespace {

nlohmann::json scores_json(const ProbabilityScores& s) {
  return {{"log_loss", s.log_loss}, {"brier", s.brier}, {"ece", s.ece}, {"macro_f1", s.macro_f1}};
}

nlohmann::json bins_json(std::span<const ReliabilityBin> bins) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& b : bins) {
    out.push_back({{"bin_lo", b.lower}, {"bin_hi", b.upper}, {"n", b.count},
                   {"conf", b.confidence}, {"acc", b.accuracy},
                   {"cp_lo", b.cp_lo}, {"cp_hi", b.cp_hi}});
  }
  return out;
}

}  // namespace

nlohmann::json CalibrationReport::to_json() const {
  return {{"temperature", temperature},
          {"val_nll_before", val_nll_before},
          {"val_nll_after", val_nll_after},
          {"test_before", scores_json(before)},
          {"test_after", scores_json(after)},
          {"bins_before", bins_json(bins_before)},
          {"bins_after", bins_json(bins_after)}};
}

CalibrationReport calibrate(const Matrix& z_val, std::span<const std::uint32_t> y_val,
                            const Matrix& z_test, std::span<const std::uint32_t> y_test) {
  CalibrationReport r;
  r.temperature = fit_temperature(z_val, y_val);
  r.val_nll_before = nll_at(z_val, y_val, 1.0);
  r.val_nll_after = nll_at(z_val, y_val, r.temperature);
  const Matrix pre = clip_renormalize(apply_temperature(z_test, 1.0));
  const Matrix post = clip_renormalize(apply_temperature(z_test, r.temperature));
  r.before = score(pre, y_test, z_test.cols());
  r.after = score(post, y_test, z_test.cols());
  r.bins_before = reliability(pre, y_test);
  r.bins_after = reliability(post, y_test);
  return r;
}

}  // namespace symsurrogate::calib
