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

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "symsurrogate/megp.hpp"

namespace symsurrogate::megp {

namespace {

constexpr std::size_t kRowBlock = 256;

std::size_t team_classes(const Team& team) {
  if (team.empty() || team.front().empty()) {
    throw std::invalid_argument("team: no programs");
  }
  const std::size_t k = team.front().size();
  for (const auto& view : team) {
    if (view.size() != k) throw std::invalid_argument("team: ragged class count");
  }
  return k;
}

void check_width(const Team& team, const Matrix& X) {
  for (const auto& view : team) {
    for (const auto& p : view) {
      if (p.min_width() > X.cols()) {
        throw expr::StructuralError("team references a coordinate beyond the input width");
      }
    }
  }
}

double row_ce(std::span<const double> z, std::uint32_t y) {
  const double m = *std::max_element(z.begin(), z.end());
  double total = 0.0;
  for (double v : z) total += std::exp(v - m);
  const double p = std::clamp(std::exp(z[y] - m) / total, kProbFloor, 1.0 - kProbFloor);
  return -std::log(p);
}

}  // namespace

Matrix team_logits(const Team& team, const Matrix& X, double epsilon) {
  const std::size_t k = team_classes(team);
  check_width(team, X);
  const std::size_t n = X.rows();
  Matrix z(n, k, 0.0);
  const auto blocks = static_cast<std::ptrdiff_t>((n + kRowBlock - 1) / kRowBlock);
#pragma omp parallel
  {
    std::vector<double> scratch;
    std::vector<double> out(kRowBlock);
#pragma omp for schedule(static)
    for (std::ptrdiff_t b = 0; b < blocks; ++b) {
      const std::size_t first = static_cast<std::size_t>(b) * kRowBlock;
      const std::size_t count = std::min(kRowBlock, n - first);
      for (const auto& view : team) {
        for (std::size_t c = 0; c < k; ++c) {
          expr::eval_range(view[c], X, first, count, out.data(), scratch, epsilon);
          for (std::size_t i = 0; i < count; ++i) z(first + i, c) += out[i];
        }
      }
    }
  }
  return z;
}

namespace reference {

Matrix team_logits(const Team& team, const Matrix& X, double epsilon) {
  const std::size_t k = team_classes(team);
  Matrix z(X.rows(), k, 0.0);
  for (std::size_t i = 0; i < X.rows(); ++i) {
    for (std::size_t c = 0; c < k; ++c) {
      double acc = 0.0;
      for (const auto& view : team) acc += expr::eval(view[c], X.row(i), epsilon);
      z(i, c) = acc;
    }
  }
  return z;
}

}  // namespace reference

Matrix softmax(const Matrix& z) {
  Matrix p(z.rows(), z.cols());
  for (std::size_t i = 0; i < z.rows(); ++i) {
    const auto zi = z.row(i);
    const double m = *std::max_element(zi.begin(), zi.end());
    double total = 0.0;
    for (std::size_t c = 0; c < z.cols(); ++c) total += p(i, c) = std::exp(zi[c] - m);
    for (std::size_t c = 0; c < z.cols(); ++c) p(i, c) /= total;
  }
  return p;
}

double softmax_ce(const Matrix& z, std::span<const std::uint32_t> y) {
  if (y.size() != z.rows()) throw std::invalid_argument("softmax_ce: label count mismatch");
  if (z.rows() == 0) throw std::invalid_argument("softmax_ce: empty batch");
  double total = 0.0;
  for (std::size_t i = 0; i < z.rows(); ++i) {
    if (y[i] >= z.cols()) throw std::invalid_argument("softmax_ce: label out of range");
    total += row_ce(z.row(i), y[i]);
  }
  return total / static_cast<double>(z.rows());
}

TeamContext::TeamContext(const Team& partners, const Batch& batch, double epsilon)
    : batch_(&batch), num_classes_(team_classes(partners)), epsilon_(epsilon) {
  check_width(partners, batch.X);
  const std::size_t n = batch.X.rows();
  outputs_.resize(partners.size());
  std::vector<double> scratch;
  for (std::size_t v = 0; v < partners.size(); ++v) {
    outputs_[v].resize(num_classes_);
    for (std::size_t c = 0; c < num_classes_; ++c) {
      outputs_[v][c].resize(n);
      expr::eval_range(partners[v][c], batch.X, 0, n, outputs_[v][c].data(), scratch, epsilon);
    }
  }
}

double TeamContext::fitness(const Individual& ind, EvalMode mode, double parsimony) const {
  std::vector<double> scratch;
  return fitness(ind, mode, parsimony, scratch);
}

double TeamContext::fitness(const Individual& ind, EvalMode mode, double parsimony,
                            std::vector<double>& scratch) const {
  if (ind.genes.size() != num_classes_) {
    throw std::invalid_argument("fitness: gene count differs from class count");
  }
  if (ind.view >= outputs_.size()) throw std::invalid_argument("fitness: view out of range");
  const Matrix& X = batch_->X;
  const std::size_t n = X.rows();
  Matrix z(n, num_classes_, 0.0);
  std::vector<double> own(n);
  for (std::size_t c = 0; c < num_classes_; ++c) {
    if (ind.genes[c].min_width() > X.cols()) {
      throw expr::StructuralError("individual references a coordinate beyond the input width");
    }
    expr::eval_range(ind.genes[c], X, 0, n, own.data(), scratch, epsilon_);
    if (mode == EvalMode::kIsolated) {
      for (std::size_t i = 0; i < n; ++i) z(i, c) += own[i];
      continue;
    }
    // Same summation order as team_logits so scores match the assembled team.
    for (std::size_t v = 0; v < outputs_.size(); ++v) {
      const std::vector<double>& src = v == ind.view ? own : outputs_[v][c];
      for (std::size_t i = 0; i < n; ++i) z(i, c) += src[i];
    }
  }
  return softmax_ce(z, batch_->y) +
         parsimony * static_cast<double>(ind.node_count()) / 1000.0;
}

double fitness(const Individual& ind, EvalMode mode, const Team& partners, const Batch& batch,
               double parsimony, double epsilon) {
  return TeamContext(partners, batch, epsilon).fitness(ind, mode, parsimony);
}

}  // namespace symsurrogate::megp
