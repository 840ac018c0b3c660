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

// Fixtures and independent oracles shared by the unit and acceptance tests.

#ifndef SYMSURROGATE_TESTS_SUPPORT_FIXTURES_HPP_
#define SYMSURROGATE_TESTS_SUPPORT_FIXTURES_HPP_

#include <cmath>
#include <cstdint>
#include <fstream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "symsurrogate/matrix.hpp"
#include "symsurrogate/program.hpp"
#include "symsurrogate/rng.hpp"

namespace symsurrogate::testing {

struct AppendixEntry {
  std::string dataset;
  int index = 0;
  std::string text;
};

inline std::vector<AppendixEntry> load_appendix() {
  std::ifstream in(std::string(SYMSUR_TEST_DATA) + "/appendix_logits.tsv");
  if (!in) throw std::runtime_error("appendix fixture missing");
  std::vector<AppendixEntry> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto a = line.find('\t');
    const auto b = line.find('\t', a + 1);
    out.push_back({line.substr(0, a), std::stoi(line.substr(a + 1, b - a - 1)),
                   line.substr(b + 1)});
  }
  return out;
}

inline std::vector<AppendixEntry> appendix_for(const std::string& dataset) {
  std::vector<AppendixEntry> out;
  for (auto& e : load_appendix()) {
    if (e.dataset == dataset) out.push_back(e);
  }
  return out;
}

// Random tree built through the public constructors only; depth counts
// edges, so max_depth 0 is a single leaf.
inline expr::Program random_program(Rng& rng, std::size_t max_depth, std::uint32_t width,
                                    double p_leaf = 0.3, double p_const = 0.3) {
  if (max_depth == 0 || uniform01(rng) < p_leaf) {
    if (uniform01(rng) < p_const) {
      // Mix in the neutral values so simplification rules actually fire.
      const double pick = uniform01(rng);
      if (pick < 0.15) return expr::Program::constant(0.0);
      if (pick < 0.3) return expr::Program::constant(1.0);
      return expr::Program::constant(uniform_real(rng, -10.0, 10.0));
    }
    return expr::Program::dim(static_cast<std::uint32_t>(uniform_index(rng, width)));
  }
  const auto op = static_cast<expr::Op>(uniform_index(rng, 4));
  auto left = random_program(rng, max_depth - 1, width, p_leaf, p_const);
  auto right = uniform01(rng) < 0.1 ? left : random_program(rng, max_depth - 1, width, p_leaf, p_const);
  return expr::Program::binary(op, left, right);
}

inline Matrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols, double scale = 1.0) {
  Matrix m(rows, cols);
  for (double& v : m.data()) v = scale * standard_normal(rng);
  return m;
}

inline std::vector<std::uint32_t> random_labels(Rng& rng, std::size_t n, std::size_t k) {
  std::vector<std::uint32_t> y(n);
  for (auto& v : y) v = static_cast<std::uint32_t>(uniform_index(rng, k));
  return y;
}

// Tree walk straight off the textual structure: parse-free recursion over
// the prefix nodes with its own division rule.
inline double oracle_eval(std::span<const expr::Node> nodes, std::size_t& i,
                          std::span<const double> row, double eps) {
  const auto& n = nodes[i++];
  if (n.op == expr::Op::kConst) return n.value;
  if (n.op == expr::Op::kDim) return row[n.dim];
  const double a = oracle_eval(nodes, i, row, eps);
  const double b = oracle_eval(nodes, i, row, eps);
  switch (n.op) {
    case expr::Op::kAdd: return a + b;
    case expr::Op::kSub: return a - b;
    case expr::Op::kMul: return a * b;
    default: return std::fabs(b) >= eps ? a / b : a / (b < 0.0 ? -eps : eps);
  }
}

inline double oracle_eval(const expr::Program& p, std::span<const double> row,
                          double eps = expr::kDefaultEpsilon) {
  std::size_t i = 0;
  return oracle_eval(p.nodes(), i, row, eps);
}

inline bool close_rel(double a, double b, double tol) {
  return std::fabs(a - b) <= tol * (1.0 + std::fabs(b));
}

}  // namespace symsurrogate::testing

#endif  // SYMSURROGATE_TESTS_SUPPORT_FIXTURES_HPP_
