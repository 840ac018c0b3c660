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


#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "support/fixtures.hpp"
#include "symsurrogate/analysis.hpp"

namespace symsurrogate::analysis {
namespace {

using expr::Op;
using expr::parse;

// Independent flattening over prefix positions: (start, sign) of every
// atomic summand.
void flatten(const Program& p, std::size_t i, int sign, std::vector<std::pair<std::size_t, int>>& out) {
  const auto op = p.nodes()[i].op;
  if (op == Op::kAdd || op == Op::kSub) {
    const std::size_t right = p.subtree_end(i + 1);
    flatten(p, i + 1, sign, out);
    flatten(p, right, op == Op::kSub ? -sign : sign, out);
    return;
  }
  out.emplace_back(i, sign);
}

double oracle_importance(const std::vector<Program>& logits, const Matrix& X, std::uint32_t dim) {
  double total = 0.0;
  for (const auto& logit : logits) {
    std::vector<std::pair<std::size_t, int>> terms;
    flatten(logit, 0, 1, terms);
    for (const auto& [start, sign] : terms) {
      const Program t = logit.subtree(start);
      if (expr::stats(t).used_dims.count(dim) == 0) continue;
      for (std::size_t r = 0; r < X.rows(); ++r) {
        total += std::fabs(sign * testing::oracle_eval(t, X.row(r)));
      }
    }
  }
  return total / static_cast<double>(X.rows());
}

Model two_class(const std::string& a, const std::string& b, double t = 1.0) {
  return Model{{parse(a), parse(b)}, t};
}

TEST(AdditiveTerms, SignsFollowSubtraction) {
  const auto terms = additive_terms(parse("plus(d1, minus(d2, d3))"));
  ASSERT_EQ(terms.size(), 3u);
  EXPECT_EQ(expr::serialize(terms[0].term), "d1");
  EXPECT_EQ(terms[0].sign, 1);
  EXPECT_EQ(expr::serialize(terms[1].term), "d2");
  EXPECT_EQ(terms[1].sign, 1);
  EXPECT_EQ(expr::serialize(terms[2].term), "d3");
  EXPECT_EQ(terms[2].sign, -1);
}

TEST(AdditiveTerms, ProductIsAtomic) {
  const auto terms = additive_terms(parse("times(d1, d2)"));
  ASSERT_EQ(terms.size(), 1u);
  EXPECT_EQ(terms[0].sign, 1);
  EXPECT_EQ(terms[0].dims, (std::set<std::uint32_t>{1, 2}));
}

TEST(AdditiveTerms, NestedSubtractionFlipsTwice) {
  const auto terms = additive_terms(parse("minus(d0, minus(d1, plus(d2, [3.0])))"));
  std::vector<int> signs;
  for (const auto& t : terms) signs.push_back(t.sign);
  EXPECT_EQ(signs, (std::vector<int>{1, -1, 1, 1}));
}

TEST(AdditiveTerms, ResummationIsExactOnRandomPrograms) {
  Rng rng(1);
  for (int rep = 0; rep < 100; ++rep) {
    const auto p = testing::random_program(rng, 7, 6);
    const auto terms = additive_terms(p);
    for (int r = 0; r < 100; ++r) {
      std::vector<double> row(6);
      for (double& v : row) v = standard_normal(rng);
      double sum = 0.0;
      for (const auto& t : terms) sum += t.sign * expr::eval(t.term, row);
      const double direct = expr::eval(p, row);
      EXPECT_NEAR(sum, direct, 1e-9 * (1.0 + std::fabs(direct)));
    }
  }
}

TEST(Importance, ConstantRowsOfTwo) {
  const Model m{{parse("d0")}, 1.0};
  const Matrix X(5, 2, 2.0);
  const auto imp = importance(m, X);
  ASSERT_EQ(imp.size(), 2u);
  EXPECT_EQ(imp[0].importance, 2.0);
  EXPECT_EQ(imp[1].importance, 0.0);
  EXPECT_EQ(imp[0].pct_logits, 100.0);
  EXPECT_EQ(imp[1].pct_logits, 0.0);
}

TEST(Importance, MatchesTermOracle) {
  Rng rng(2);
  for (int rep = 0; rep < 20; ++rep) {
    Model m;
    for (int c = 0; c < 3; ++c) m.logits.push_back(testing::random_program(rng, 5, 5));
    const Matrix X = testing::random_matrix(rng, 40, 5);
    const auto imp = importance(m, X);
    for (std::uint32_t j = 0; j < 5; ++j) {
      const double oracle = oracle_importance(m.logits, X, j);
      EXPECT_NEAR(imp[j].importance, oracle, 1e-12 * (1.0 + oracle));
    }
  }
}

TEST(Importance, SyntacticPower) {
  EXPECT_EQ(syntactic_power(parse("times(d1, times(d1, d1))"), 1), 3u);
  EXPECT_EQ(syntactic_power(parse("plus(times(d1, d1), d1)"), 1), 2u);
  EXPECT_EQ(syntactic_power(parse("divide(d1, d1)"), 1), 1u);
  EXPECT_EQ(syntactic_power(parse("d2"), 1), 0u);
}

TEST(QuantileGrid, LevelsAndDedup) {
  std::vector<double> col(101);
  for (std::size_t i = 0; i <= 100; ++i) col[i] = static_cast<double>(100 - i);
  const auto g = quantile_grid(col, 5);
  EXPECT_EQ(g, (std::vector<double>{0, 25, 50, 75, 100}));
  const std::vector<double> flat(10, 1.5);
  EXPECT_EQ(quantile_grid(flat, 20), (std::vector<double>{1.5}));
}

TEST(Pdp, ConstantModelIsFlat) {
  Rng rng(3);
  const Matrix X = testing::random_matrix(rng, 50, 2);
  const auto c = pdp(two_class("[0.3]", "[1.0]"), X, 0, 0);
  EXPECT_EQ(c.range(), 0.0);
  EXPECT_EQ(c.grid.size(), 20u);
}

TEST(Pdp, SigmoidClosedForm) {
  Rng rng(4);
  const Matrix X = testing::random_matrix(rng, 200, 1, 2.0);
  for (double t : {1.0, 1.7}) {
    const auto c = pdp(two_class("d0", "[0.0]", t), X, 0, 0);
    for (std::size_t k = 0; k < c.grid.size(); ++k) {
      EXPECT_NEAR(c.values[k], 1.0 / (1.0 + std::exp(-c.grid[k] / t)), 1e-12);
    }
    EXPECT_EQ(monotonicity(c), 1.0);
  }
}

TEST(Pdp, RowOrderInvariant) {
  Rng rng(5);
  const Matrix X = testing::random_matrix(rng, 80, 3);
  std::vector<std::size_t> perm(80);
  for (std::size_t i = 0; i < 80; ++i) perm[i] = 79 - i;
  const Model m = two_class("times(d0, d1)", "minus(d2, d0)");
  const auto a = pdp(m, X, 0, 1);
  const auto b = pdp(m, X.select_rows(perm), 0, 1);
  EXPECT_NEAR(a.range(), b.range(), 1e-12);
}

TEST(Pdp, BootstrapBandHoldsPointCurve) {
  Rng rng(6);
  const Matrix X = testing::random_matrix(rng, 300, 2);
  const auto c = pdp(two_class("times(d0, d1)", "d1"), X, 0, 0, {20, 200, 9});
  std::size_t inside = 0;
  for (std::size_t k = 0; k < c.values.size(); ++k) {
    inside += c.ci_lo[k] <= c.values[k] && c.values[k] <= c.ci_hi[k] ? 1 : 0;
  }
  EXPECT_GE(inside * 10, c.values.size() * 9);
}

TEST(Ale, UnusedDimIsFlatZero) {
  Rng rng(7);
  const Matrix X = testing::random_matrix(rng, 100, 2);
  const auto c = ale(two_class("d1", "[0.0]"), X, 0, 0);
  for (double v : c.values) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(c.abs_integral(), 0.0);
  const auto p = pdp(two_class("d1", "[0.0]"), X, 0, 0);
  EXPECT_EQ(p.range(), 0.0);
}

TEST(Ale, CenteredByCount) {
  Rng rng(8);
  for (int rep = 0; rep < 10; ++rep) {
    const Matrix X = testing::random_matrix(rng, 150, 3);
    const auto c = ale(two_class("times(d0, plus(d1, d0))", "divide(d2, d0)"), X, 0, 1,
                       {20, 20, static_cast<std::uint64_t>(rep)});
    ASSERT_EQ(c.bin_counts.size() + 1, c.grid.size());
    double weighted = 0.0;
    std::size_t total = 0;
    for (std::size_t k = 1; k < c.grid.size(); ++k) {
      weighted += static_cast<double>(c.bin_counts[k - 1]) * 0.5 * (c.values[k - 1] + c.values[k]);
      total += c.bin_counts[k - 1];
    }
    EXPECT_EQ(total, 150u);
    EXPECT_NEAR(weighted / static_cast<double>(total), 0.0, 1e-9);
  }
}

TEST(Ale, LinearLogitIsMonotone) {
  Rng rng(9);
  const Matrix X = testing::random_matrix(rng, 200, 2);
  const auto c = ale(two_class("times([0.8], d0)", "[0.0]"), X, 0, 0);
  EXPECT_EQ(monotonicity(c), 1.0);
  EXPECT_GT(c.abs_integral(), 0.0);
}

TEST(Ale, ConstantColumnIsFlat) {
  Matrix X(30, 1, 4.0);
  const auto c = ale(two_class("d0", "[0.0]"), X, 0, 0);
  ASSERT_EQ(c.values.size(), 1u);
  EXPECT_EQ(c.values[0], 0.0);
}

TEST(Ale, AdditiveModelMatchesCenteredPdp) {
  // Additive logit on independent coordinates with K = 2 in logit space:
  // use a small slope so the probability is near-linear and the two effect
  // notions agree after centering.
  Rng rng(10);
  const Matrix X = testing::random_matrix(rng, 2000, 2);
  const Model m = two_class("plus(times([0.2], d0), times([0.3], d1))", "[0.0]");
  const auto a = ale(m, X, 0, 0, {20, 200, 1});
  const auto p = pdp(m, X, 0, 0, {20, 0, 1});
  double weighted = 0.0;
  std::size_t total = 0;
  for (std::size_t k = 1; k < p.grid.size(); ++k) {
    weighted += static_cast<double>(a.bin_counts[k - 1]) * 0.5 * (p.values[k - 1] + p.values[k]);
    total += a.bin_counts[k - 1];
  }
  const double centre = weighted / static_cast<double>(total);
  std::size_t inside = 0;
  for (std::size_t k = 0; k < p.grid.size(); ++k) {
    const double v = p.values[k] - centre;
    inside += a.ci_lo[k] - 1e-3 <= v && v <= a.ci_hi[k] + 1e-3 ? 1 : 0;
  }
  EXPECT_GE(inside * 10, p.grid.size() * 9);
}

TEST(Monotonicity, Examples) {
  EffectCurve up, down, flat, bumpy;
  up.values = {0.1, 0.2, 0.5, 0.9};
  down.values = {3, 2, 1, 0};
  flat.values = {1, 1, 1};
  bumpy.values = {0, 1, 0};
  EXPECT_EQ(monotonicity(up), 1.0);
  EXPECT_EQ(monotonicity(down), 1.0);
  EXPECT_EQ(monotonicity(flat), 0.0);
  EXPECT_EQ(monotonicity(bumpy), 0.0);
  EffectCurve two;
  two.values = {0, 1};
  EXPECT_THROW(monotonicity(two), std::invalid_argument);
}

TEST(Monotonicity, MatchesRankOracle) {
  Rng rng(11);
  for (int rep = 0; rep < 50; ++rep) {
    EffectCurve c;
    c.values.resize(12);
    for (double& v : c.values) v = std::round(4.0 * standard_normal(rng)) / 4.0;
    // Midranks by counting.
    std::vector<double> rank(12);
    for (std::size_t i = 0; i < 12; ++i) {
      double less = 0, equal = 0;
      for (double w : c.values) {
        less += w < c.values[i];
        equal += w == c.values[i];
      }
      rank[i] = less + (equal + 1.0) / 2.0;
    }
    double mr = 6.5, sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < 12; ++i) {
      const double x = static_cast<double>(i + 1) - mr, y = rank[i] - mr;
      sxy += x * y;
      sxx += x * x;
      syy += y * y;
    }
    const double oracle = syy == 0 ? 0.0 : std::fabs(sxy / std::sqrt(sxx * syy));
    EXPECT_NEAR(monotonicity(c), oracle, 1e-12);
  }
}

std::vector<Program> appendix_model(const std::string& dataset) {
  std::vector<Program> logits;
  for (const auto& e : testing::appendix_for(dataset)) {
    logits.push_back(expr::parse_recovering(e.text).program);
  }
  return logits;
}

TEST(Usage, MnistAppendixHistogram) {
  const auto logits = appendix_model("MNIST");
  ASSERT_EQ(logits.size(), 10u);
  const auto hist = usage_histogram(logits);
  EXPECT_EQ(hist.size(), 17u);
  std::map<std::size_t, std::size_t> nu(hist.begin(), hist.end());
  EXPECT_EQ(nu[618], 10u);
  EXPECT_EQ(nu[303], 10u);
  for (std::size_t i = 1; i < hist.size(); ++i) EXPECT_GE(hist[i - 1].second, hist[i].second);
}

TEST(Usage, DisjointLogitsGiveSingletonPatterns) {
  const std::vector<Program> logits = {parse("plus(d0, d1)"), parse("d2"), parse("times(d3, d4)")};
  const auto patterns = overlap_sets(logits);
  ASSERT_EQ(patterns.size(), 3u);
  std::size_t dims = 0;
  for (const auto& p : patterns) {
    EXPECT_EQ(p.logits.size(), 1u);
    dims += p.dim_count;
  }
  EXPECT_EQ(dims, 5u);
}

TEST(Usage, SharedDimsFormOnePattern) {
  const std::vector<Program> logits = {parse("plus(d0, d1)"), parse("minus(d1, d0)"), parse("d2")};
  const auto patterns = overlap_sets(logits);
  ASSERT_EQ(patterns.size(), 2u);
  EXPECT_EQ(patterns[0].logits, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(patterns[0].dim_count, 2u);
}

TEST(Csv, WritersEmitHeaders) {
  const Model m = two_class("times(d0, d0)", "d1");
  Rng rng(12);
  const Matrix X = testing::random_matrix(rng, 40, 2);
  std::ostringstream a, b, c, d;
  write_importance_csv(a, importance(m, X));
  const std::vector<EffectCurve> curves = {pdp(m, X, 0, 0, {20, 10, 0}), ale(m, X, 0, 0, {20, 10, 0})};
  write_curves_csv(b, curves);
  write_usage_csv(c, usage_histogram(m.logits));
  write_overlap_csv(d, overlap_sets(m.logits));
  for (auto* s : {&a, &b, &c, &d}) {
    const auto text = s->str();
    EXPECT_NE(text.find('\n'), std::string::npos);
    EXPECT_GT(std::count(text.begin(), text.end(), '\n'), 1);
  }
  EXPECT_NE(a.str().find("max_power"), std::string::npos);
}

}  // namespace
}  // namespace symsurrogate::analysis
