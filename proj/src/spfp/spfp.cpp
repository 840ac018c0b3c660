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
#include <numeric>
#include <stdexcept>

#include "symsurrogate/hash.hpp"
#include "symsurrogate/spfp.hpp"

namespace symsurrogate::spfp {

namespace {

// Centered training columns with their norms, so that Pearson correlation is
// a dot product over norms.
class ColumnTable {
 public:
  explicit ColumnTable(const Matrix& X) : n_(X.rows()), cols_(X.cols()) {
    centered_.resize(n_ * cols_);
    norm_.resize(cols_);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t jj = 0; jj < static_cast<std::ptrdiff_t>(cols_); ++jj) {
      const auto j = static_cast<std::size_t>(jj);
      double mean = 0.0;
      for (std::size_t i = 0; i < n_; ++i) mean += X(i, j);
      mean /= static_cast<double>(n_);
      double ss = 0.0;
      double* dst = centered_.data() + j * n_;
      for (std::size_t i = 0; i < n_; ++i) {
        dst[i] = X(i, j) - mean;
        ss += dst[i] * dst[i];
      }
      norm_[j] = std::sqrt(ss);
    }
  }

  double abs_corr(std::size_t a, std::size_t b) const {
    if (norm_[a] == 0.0 || norm_[b] == 0.0) return 0.0;
    const double* pa = centered_.data() + a * n_;
    const double* pb = centered_.data() + b * n_;
    double dot = 0.0;
    for (std::size_t i = 0; i < n_; ++i) dot += pa[i] * pb[i];
    return std::min(1.0, std::fabs(dot / (norm_[a] * norm_[b])));
  }

 private:
  std::size_t n_;
  std::size_t cols_;
  std::vector<double> centered_;  // column-major
  std::vector<double> norm_;
};

std::vector<double> all_relevance(const Matrix& X, std::span<const std::uint32_t> y,
                                  double f_max) {
  std::vector<double> rel(X.cols());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t jj = 0; jj < static_cast<std::ptrdiff_t>(X.cols()); ++jj) {
    const auto j = static_cast<std::size_t>(jj);
    rel[j] = relevance(X.column(j), y, f_max);
  }
  return rel;
}

std::vector<std::size_t> grow(std::span<const std::size_t> pool, const ColumnTable& table,
                              std::span<const double> rel, std::size_t budget) {
  if (pool.empty()) throw std::invalid_argument("grow_view: empty pool");
  double scale = 0.0;
  for (std::size_t j : pool) scale += rel[j];
  scale /= static_cast<double>(pool.size());

  const std::size_t target = std::min(budget, pool.size());
  std::vector<std::size_t> candidates(pool.begin(), pool.end());
  std::sort(candidates.begin(), candidates.end());
  std::vector<double> red_sum(candidates.size(), 0.0);
  std::vector<char> taken(candidates.size(), 0);
  std::vector<std::size_t> view;
  view.reserve(target);

  while (view.size() < target) {
    std::size_t best = candidates.size();
    double best_score = 0.0;
    for (std::size_t k = 0; k < candidates.size(); ++k) {
      if (taken[k]) continue;
      const double penalty =
          view.empty() ? 0.0 : red_sum[k] / static_cast<double>(view.size()) * scale;
      const double score = rel[candidates[k]] - penalty;
      // Strict '>' keeps the smallest index on ties.
      if (best == candidates.size() || score > best_score) {
        best = k;
        best_score = score;
      }
    }
    taken[best] = 1;
    const std::size_t chosen = candidates[best];
    view.push_back(chosen);
    if (view.size() == target) break;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t kk = 0; kk < static_cast<std::ptrdiff_t>(candidates.size()); ++kk) {
      const auto k = static_cast<std::size_t>(kk);
      if (!taken[k]) red_sum[k] += table.abs_corr(candidates[k], chosen);
    }
  }
  return view;
}

}  // namespace

std::size_t SpfpConfig::effective_budget(std::size_t d) const {
  if (budget > 0) return budget;
  return std::max<std::size_t>(1, (d + 9) / 10);
}

nlohmann::json SpfpConfig::to_json() const {
  return {{"budget", budget},
          {"removal_fraction", removal_fraction},
          {"preservation_threshold", preservation_threshold},
          {"f_max", f_max}};
}

SpfpConfig SpfpConfig::from_json(const nlohmann::json& j) {
  SpfpConfig c;
  c.budget = j.value("budget", c.budget);
  c.removal_fraction = j.value("removal_fraction", c.removal_fraction);
  c.preservation_threshold = j.value("preservation_threshold", c.preservation_threshold);
  c.f_max = j.value("f_max", c.f_max);
  if (!(c.removal_fraction > 0.0 && c.removal_fraction <= 1.0)) {
    throw std::invalid_argument("spfp removal_fraction must lie in (0, 1]");
  }
  return c;
}

std::size_t ViewPartition::view_of(std::size_t coordinate) const {
  for (std::size_t v = 0; v < views.size(); ++v) {
    if (std::find(views[v].begin(), views[v].end(), coordinate) != views[v].end()) return v;
  }
  throw std::out_of_range("coordinate not in any view");
}

bool ViewPartition::valid() const {
  std::vector<int> seen(d, 0);
  for (const auto& view : views) {
    if (view.empty()) return false;
    for (std::size_t j : view) {
      if (j >= d || seen[j]++ > 0) return false;
    }
  }
  return std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; });
}

std::string ViewPartition::digest() const {
  const nlohmann::json j = {{"views", views}, {"d", d}, {"config", config.to_json()}};
  return to_hex(fnv1a64(j.dump()));
}

nlohmann::json ViewPartition::to_json() const {
  return {{"views", views},
          {"d", d},
          {"config", config.to_json()},
          {"coverage", coverage},
          {"digest", digest()}};
}

ViewPartition ViewPartition::from_json(const nlohmann::json& j) {
  ViewPartition p;
  p.views = j.at("views").get<std::vector<std::vector<std::size_t>>>();
  p.d = j.at("d").get<std::size_t>();
  p.config = SpfpConfig::from_json(j.at("config"));
  p.coverage = j.value("coverage", std::vector<double>{});
  if (!p.valid()) throw std::invalid_argument("partition is not disjoint and exhaustive");
  if (j.contains("digest") && j.at("digest").get<std::string>() != p.digest()) {
    throw std::invalid_argument("partition digest mismatch");
  }
  return p;
}

double relevance(std::span<const double> column, std::span<const std::uint32_t> y,
                 double f_max) {
  const std::size_t n = column.size();
  if (n == 0 || y.size() != n) return 0.0;
  std::uint32_t K = 0;
  for (std::uint32_t c : y) K = std::max(K, c + 1);
  std::vector<double> sum(K, 0.0);
  std::vector<std::size_t> count(K, 0);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sum[y[i]] += column[i];
    ++count[y[i]];
    total += column[i];
  }
  const double grand = total / static_cast<double>(n);
  std::size_t groups = 0;
  double ssb = 0.0;
  for (std::uint32_t c = 0; c < K; ++c) {
    if (count[c] == 0) continue;
    ++groups;
    const double mean = sum[c] / static_cast<double>(count[c]);
    ssb += static_cast<double>(count[c]) * (mean - grand) * (mean - grand);
  }
  double ssw = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dev = column[i] - sum[y[i]] / static_cast<double>(count[y[i]]);
    ssw += dev * dev;
  }
  if (groups < 2 || n <= groups) return 0.0;
  if (ssb + ssw <= 0.0) return 0.0;
  if (ssw <= 0.0) return f_max;
  const double f = (ssb / static_cast<double>(groups - 1)) /
                   (ssw / static_cast<double>(n - groups));
  return std::min(f, f_max);
}

double pearson(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  if (n == 0 || b.size() != n) return 0.0;
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / static_cast<double>(n);
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / static_cast<double>(n);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

double redundancy(std::size_t j, std::span<const std::size_t> view, const Matrix& X_train) {
  if (view.empty()) return 0.0;
  const auto col = X_train.column(j);
  double acc = 0.0;
  for (std::size_t v : view) acc += std::fabs(pearson(col, X_train.column(v)));
  return acc / static_cast<double>(view.size());
}

std::vector<std::size_t> grow_view(std::span<const std::size_t> pool, const Matrix& X_train,
                                   std::span<const std::uint32_t> y, std::size_t budget,
                                   const SpfpConfig& config) {
  if (pool.empty()) throw std::invalid_argument("grow_view: empty pool");
  const ColumnTable table(X_train);
  const auto rel = all_relevance(X_train, y, config.f_max);
  return grow(pool, table, rel, budget);
}

ViewPartition partition(const Matrix& X_train, std::span<const std::uint32_t> y,
                        const SpfpConfig& config) {
  const std::size_t d = X_train.cols();
  if (d == 0) throw std::invalid_argument("partition: no coordinates");
  if (y.size() != X_train.rows()) throw std::invalid_argument("partition: label count mismatch");
  ViewPartition out;
  out.d = d;
  out.config = config;
  const std::size_t budget = config.effective_budget(d);
  const ColumnTable table(X_train);
  const auto rel = all_relevance(X_train, y, config.f_max);

  std::vector<std::size_t> pool(d);
  std::iota(pool.begin(), pool.end(), 0);
  while (!pool.empty()) {
    auto view = grow(pool, table, rel, budget);
    double pool_rel = 0.0, view_rel = 0.0;
    for (std::size_t j : pool) pool_rel += rel[j];
    for (std::size_t j : view) view_rel += rel[j];
    out.coverage.push_back(pool_rel > 0.0 ? view_rel / pool_rel : 1.0);

    std::vector<std::size_t> sorted = view;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::size_t> rest;
    std::set_difference(pool.begin(), pool.end(), sorted.begin(), sorted.end(),
                        std::back_inserter(rest));
    pool = std::move(rest);
    out.views.push_back(std::move(sorted));
  }
  return out;
}

}  // namespace symsurrogate::spfp
