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

#include "symsurrogate/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "symsurrogate/calib.hpp"
#include "symsurrogate/rng.hpp"

namespace symsurrogate::analysis {

namespace {

void collect_terms(const Program& p, std::size_t i, int sign, std::vector<AdditiveTerm>& out) {
  const auto op = p.nodes()[i].op;
  if (op == expr::Op::kAdd || op == expr::Op::kSub) {
    const std::size_t right = p.subtree_end(i + 1);
    collect_terms(p, i + 1, sign, out);
    collect_terms(p, right, op == expr::Op::kAdd ? sign : -sign, out);
    return;
  }
  AdditiveTerm t{p.subtree(i), sign, {}};
  t.dims = expr::stats(t.term).used_dims;
  out.push_back(std::move(t));
}

std::size_t power_at(const Program& p, std::size_t i, std::uint32_t dim) {
  const auto& n = p.nodes()[i];
  if (n.op == expr::Op::kDim) return n.dim == dim ? 1 : 0;
  if (n.op == expr::Op::kConst) return 0;
  const std::size_t a = power_at(p, i + 1, dim);
  const std::size_t b = power_at(p, p.subtree_end(i + 1), dim);
  return n.op == expr::Op::kMul ? a + b : std::max(a, b);
}

// Type-7 sample quantile of sorted data.
double quantile_sorted(std::span<const double> sorted, double level) {
  const double h = level * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

// probs(i, g): target-class probability of row i with `dim` set to grid[g].
Matrix probability_grid(const Model& model, const Matrix& X, std::size_t dim,
                        std::size_t target, std::span<const double> grid) {
  Matrix out(X.rows(), grid.size());
  Matrix Xg = X;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    for (std::size_t i = 0; i < X.rows(); ++i) Xg(i, dim) = grid[g];
    const Matrix p = model.probabilities(Xg);
    for (std::size_t i = 0; i < X.rows(); ++i) out(i, g) = p(i, target);
  }
  return out;
}

// Percentile interval per knot from bootstrap replicates (reps x knots).
void percentile_ci(std::vector<std::vector<double>>& reps, EffectCurve& curve) {
  const std::size_t knots = curve.values.size();
  curve.ci_lo.assign(knots, 0.0);
  curve.ci_hi.assign(knots, 0.0);
  if (reps.empty()) {
    curve.ci_lo = curve.values;
    curve.ci_hi = curve.values;
    return;
  }
  std::vector<double> column(reps.size());
  for (std::size_t g = 0; g < knots; ++g) {
    for (std::size_t r = 0; r < reps.size(); ++r) column[r] = reps[r][g];
    std::sort(column.begin(), column.end());
    curve.ci_lo[g] = quantile_sorted(column, 0.025);
    curve.ci_hi[g] = quantile_sorted(column, 0.975);
  }
}

void check_args(const Model& model, const Matrix& X, std::size_t dim, std::size_t target) {
  if (dim >= X.cols()) throw std::invalid_argument("effect curve: dim out of range");
  if (target >= model.num_classes()) throw std::invalid_argument("effect curve: bad class");
  if (X.rows() == 0) throw std::invalid_argument("effect curve: no rows");
}

// Centered accumulated effects from per-row local differences.
std::vector<double> accumulate(std::span<const std::size_t> bin_of,
                               std::span<const double> local, std::span<const std::size_t> rows,
                               std::size_t knots, std::vector<std::size_t>* counts_out) {
  std::vector<double> sum(knots, 0.0);
  std::vector<std::size_t> count(knots, 0);
  for (std::size_t r : rows) {
    sum[bin_of[r]] += local[r];
    ++count[bin_of[r]];
  }
  std::vector<double> acc(knots, 0.0);
  for (std::size_t k = 1; k < knots; ++k) {
    acc[k] = acc[k - 1] + (count[k] > 0 ? sum[k] / static_cast<double>(count[k]) : 0.0);
  }
  double weighted = 0.0;
  std::size_t total = 0;
  for (std::size_t k = 1; k < knots; ++k) {
    weighted += static_cast<double>(count[k]) * 0.5 * (acc[k - 1] + acc[k]);
    total += count[k];
  }
  const double centre = total > 0 ? weighted / static_cast<double>(total) : 0.0;
  for (double& a : acc) a -= centre;
  if (counts_out) counts_out->assign(count.begin() + 1, count.end());
  return acc;
}

std::vector<double> midranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < v.size();) {
    std::size_t j = i;
    while (j < v.size() && v[order[j]] == v[order[i]]) ++j;
    for (std::size_t t = i; t < j; ++t) ranks[order[t]] = 0.5 * static_cast<double>(i + j + 1);
    i = j;
  }
  return ranks;
}

}  // namespace

std::vector<AdditiveTerm> additive_terms(const Program& logit) {
  std::vector<AdditiveTerm> out;
  collect_terms(logit, 0, 1, out);
  return out;
}

Matrix Model::logit_values(const Matrix& X) const {
  Matrix z(X.rows(), logits.size());
  for (std::size_t c = 0; c < logits.size(); ++c) {
    const auto col = expr::eval_matrix(logits[c], X);
    for (std::size_t i = 0; i < X.rows(); ++i) z(i, c) = col[i];
  }
  return z;
}

Matrix Model::probabilities(const Matrix& X) const {
  return calib::apply_temperature(logit_values(X), temperature);
}

std::size_t syntactic_power(const Program& program, std::uint32_t dim) {
  return power_at(program, 0, dim);
}

std::vector<DimImportance> importance(const Model& model, const Matrix& X) {
  const std::size_t d = X.cols();
  std::vector<DimImportance> out(d);
  for (std::size_t j = 0; j < d; ++j) out[j].dim = j;
  if (X.rows() == 0) throw std::invalid_argument("importance: no rows");
  for (const auto& logit : model.logits) {
    for (const auto& term : additive_terms(logit)) {
      if (term.dims.empty()) continue;
      const auto values = expr::eval_matrix(term.term, X);
      double mass = 0.0;
      for (double v : values) mass += std::fabs(static_cast<double>(term.sign) * v);
      for (auto j : term.dims) out[j].importance += mass;
    }
    for (auto j : expr::stats(logit).used_dims) {
      out[j].pct_logits += 1.0;
      out[j].max_power = std::max(out[j].max_power, syntactic_power(logit, j));
    }
  }
  const double n = static_cast<double>(X.rows());
  const double k = static_cast<double>(std::max<std::size_t>(1, model.num_classes()));
  for (auto& row : out) {
    row.importance /= n;
    row.pct_logits = 100.0 * row.pct_logits / k;
  }
  return out;
}

double EffectCurve::range() const {
  if (values.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return *hi - *lo;
}

double EffectCurve::abs_integral() const {
  double total = 0.0;
  for (std::size_t k = 1; k < grid.size(); ++k) {
    total += 0.5 * (std::fabs(values[k - 1]) + std::fabs(values[k])) * (grid[k] - grid[k - 1]);
  }
  return total;
}

std::vector<double> quantile_grid(std::span<const double> column, std::size_t knots) {
  if (column.empty()) throw std::invalid_argument("quantile_grid: empty column");
  if (knots < 2) throw std::invalid_argument("quantile_grid: need two knots");
  std::vector<double> sorted(column.begin(), column.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> grid;
  for (std::size_t k = 0; k < knots; ++k) {
    const double q = quantile_sorted(sorted, static_cast<double>(k) /
                                                 static_cast<double>(knots - 1));
    if (grid.empty() || q > grid.back()) grid.push_back(q);
  }
  return grid;
}

EffectCurve pdp(const Model& model, const Matrix& X, std::size_t dim, std::size_t target_class,
                const EffectOptions& options) {
  check_args(model, X, dim, target_class);
  EffectCurve curve;
  curve.kind = CurveKind::kPdp;
  curve.dim = dim;
  curve.target_class = target_class;
  curve.grid = quantile_grid(X.column(dim), options.knots);
  const Matrix probs = probability_grid(model, X, dim, target_class, curve.grid);
  const std::size_t n = X.rows();
  const std::size_t m = curve.grid.size();
  curve.values.assign(m, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t g = 0; g < m; ++g) curve.values[g] += probs(i, g);
  }
  for (double& v : curve.values) v /= static_cast<double>(n);

  Rng rng(options.seed);
  std::vector<std::vector<double>> reps(options.bootstrap, std::vector<double>(m, 0.0));
  for (auto& rep : reps) {
    for (std::size_t t = 0; t < n; ++t) {
      const std::size_t i = uniform_index(rng, n);
      for (std::size_t g = 0; g < m; ++g) rep[g] += probs(i, g);
    }
    for (double& v : rep) v /= static_cast<double>(n);
  }
  percentile_ci(reps, curve);
  return curve;
}

EffectCurve ale(const Model& model, const Matrix& X, std::size_t dim, std::size_t target_class,
                const EffectOptions& options) {
  check_args(model, X, dim, target_class);
  EffectCurve curve;
  curve.kind = CurveKind::kAle;
  curve.dim = dim;
  curve.target_class = target_class;
  const auto column = X.column(dim);
  curve.grid = quantile_grid(column, options.knots);
  const std::size_t m = curve.grid.size();
  if (m < 2) {
    curve.values.assign(m, 0.0);
    curve.ci_lo.assign(m, 0.0);
    curve.ci_hi.assign(m, 0.0);
    return curve;
  }
  const Matrix probs = probability_grid(model, X, dim, target_class, curve.grid);
  const std::size_t n = X.rows();
  // Bin k (1..m-1) holds rows with grid[k-1] < x <= grid[k]; the minimum
  // joins bin 1.
  std::vector<std::size_t> bin_of(n);
  std::vector<double> local(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto it = std::lower_bound(curve.grid.begin(), curve.grid.end(), column[i]);
    const std::size_t k = std::clamp<std::size_t>(
        static_cast<std::size_t>(it - curve.grid.begin()), 1, m - 1);
    bin_of[i] = k;
    local[i] = probs(i, k) - probs(i, k - 1);
  }
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  curve.values = accumulate(bin_of, local, rows, m, &curve.bin_counts);

  Rng rng(options.seed);
  std::vector<std::vector<double>> reps;
  reps.reserve(options.bootstrap);
  for (std::size_t b = 0; b < options.bootstrap; ++b) {
    for (auto& r : rows) r = uniform_index(rng, n);
    reps.push_back(accumulate(bin_of, local, rows, m, nullptr));
  }
  percentile_ci(reps, curve);
  return curve;
}

double monotonicity(const EffectCurve& curve) {
  const std::size_t m = curve.values.size();
  if (m < 3) throw std::invalid_argument("monotonicity: need at least three knots");
  const auto rv = midranks(curve.values);
  std::vector<double> rp(m);
  for (std::size_t i = 0; i < m; ++i) rp[i] = static_cast<double>(i + 1);
  const double mean = 0.5 * static_cast<double>(m + 1);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxy += (rp[i] - mean) * (rv[i] - mean);
    sxx += (rp[i] - mean) * (rp[i] - mean);
    syy += (rv[i] - mean) * (rv[i] - mean);
  }
  if (syy == 0.0) return 0.0;
  return std::min(1.0, std::fabs(sxy / std::sqrt(sxx * syy)));
}

std::vector<std::pair<std::size_t, std::size_t>> usage_histogram(std::span<const Program> logits) {
  std::map<std::size_t, std::size_t> freq;
  for (const auto& logit : logits) {
    for (auto j : expr::stats(logit).used_dims) ++freq[j];
  }
  std::vector<std::pair<std::size_t, std::size_t>> out(freq.begin(), freq.end());
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return out;
}

std::vector<OverlapPattern> overlap_sets(std::span<const Program> logits) {
  std::map<std::size_t, std::vector<std::size_t>> members;
  for (std::size_t l = 0; l < logits.size(); ++l) {
    for (auto j : expr::stats(logits[l]).used_dims) members[j].push_back(l);
  }
  std::map<std::vector<std::size_t>, std::size_t> patterns;
  for (const auto& [dim, ids] : members) ++patterns[ids];
  std::vector<OverlapPattern> out;
  for (const auto& [ids, count] : patterns) out.push_back({ids, count});
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.dim_count > b.dim_count; });
  return out;
}

void write_importance_csv(std::ostream& out, std::span<const DimImportance> rows) {
  std::vector<DimImportance> sorted(rows.begin(), rows.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto& a, const auto& b) { return a.importance > b.importance; });
  out << "dim,importance,pct_logits,max_power\n";
  out.precision(17);
  for (const auto& r : sorted) {
    out << r.dim << ',' << r.importance << ',' << r.pct_logits << ',' << r.max_power << '\n';
  }
}

void write_curves_csv(std::ostream& out, std::span<const EffectCurve> curves) {
  out << "dim,class,kind,knot,value,ci_lo,ci_hi\n";
  out.precision(17);
  for (const auto& c : curves) {
    for (std::size_t g = 0; g < c.grid.size(); ++g) {
      out << c.dim << ',' << c.target_class << ',' << (c.kind == CurveKind::kPdp ? "pdp" : "ale")
          << ',' << c.grid[g] << ',' << c.values[g] << ',' << c.ci_lo[g] << ',' << c.ci_hi[g]
          << '\n';
    }
  }
}

void write_usage_csv(std::ostream& out,
                     std::span<const std::pair<std::size_t, std::size_t>> histogram) {
  out << "dim,frequency\n";
  for (const auto& [dim, count] : histogram) out << dim << ',' << count << '\n';
}

void write_overlap_csv(std::ostream& out, std::span<const OverlapPattern> patterns) {
  out << "logits,count\n";
  for (const auto& p : patterns) {
    for (std::size_t i = 0; i < p.logits.size(); ++i) out << (i ? ";" : "") << p.logits[i];
    out << ',' << p.dim_count << '\n';
  }
}

}  // namespace symsurrogate::analysis
