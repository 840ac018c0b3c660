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
#include <string>

#include "symsurrogate/program.hpp"

namespace symsurrogate::expr {

namespace {

constexpr std::size_t kBlockRows = 256;

[[noreturn]] void dim_out_of_range(std::uint32_t dim, std::size_t width) {
  throw StructuralError("program references d" + std::to_string(dim) +
                        " but rows have " + std::to_string(width) + " columns");
}

double eval_at(std::span<const Node> nodes, std::size_t& i,
               std::span<const double> row, double epsilon) {
  const Node& n = nodes[i++];
  switch (n.op) {
    case Op::kConst:
      return n.value;
    case Op::kDim:
      if (n.dim >= row.size()) dim_out_of_range(n.dim, row.size());
      return row[n.dim];
    default: {
      const double a = eval_at(nodes, i, row, epsilon);
      const double b = eval_at(nodes, i, row, epsilon);
      return apply_op(n.op, a, b, epsilon);
    }
  }
}

template <class RowIndex>
void eval_columns(const Program& program, const Matrix& X, RowIndex row_of,
                  std::size_t count, double* out, std::vector<double>& scratch,
                  double epsilon) {
  if (count == 0) return;
  const auto nodes = program.nodes();
  const std::size_t width = X.cols();
  // Reverse prefix order needs at most depth + 1 live values.
  const std::size_t max_stack = program.depth() + 2;
  scratch.resize(max_stack * count);
  std::size_t top = 0;  // number of live slots
  for (std::size_t k = nodes.size(); k-- > 0;) {
    const Node& n = nodes[k];
    if (n.op == Op::kConst) {
      std::fill_n(scratch.data() + top * count, count, n.value);
      ++top;
    } else if (n.op == Op::kDim) {
      if (n.dim >= width) dim_out_of_range(n.dim, width);
      double* slot = scratch.data() + top * count;
      for (std::size_t r = 0; r < count; ++r) slot[r] = X(row_of(r), n.dim);
      ++top;
    } else {
      // Left child result is on top, right child just below it.
      const double* left = scratch.data() + (top - 1) * count;
      double* right = scratch.data() + (top - 2) * count;
      switch (n.op) {
        case Op::kAdd:
          for (std::size_t r = 0; r < count; ++r) right[r] = left[r] + right[r];
          break;
        case Op::kSub:
          for (std::size_t r = 0; r < count; ++r) right[r] = left[r] - right[r];
          break;
        case Op::kMul:
          for (std::size_t r = 0; r < count; ++r) right[r] = left[r] * right[r];
          break;
        default:
          for (std::size_t r = 0; r < count; ++r) {
            right[r] = protected_div(left[r], right[r], epsilon);
          }
          break;
      }
      --top;
    }
  }
  std::copy_n(scratch.data(), count, out);
}

}  // namespace

double eval(const Program& program, std::span<const double> row, double epsilon) {
  std::size_t i = 0;
  return eval_at(program.nodes(), i, row, epsilon);
}

void eval_block(const Program& program, const Matrix& X, const std::size_t* rows,
                std::size_t count, double* out, std::vector<double>& scratch,
                double epsilon) {
  eval_columns(program, X, [rows](std::size_t r) { return rows[r]; }, count, out,
               scratch, epsilon);
}

void eval_range(const Program& program, const Matrix& X, std::size_t first,
                std::size_t count, double* out, std::vector<double>& scratch,
                double epsilon) {
  eval_columns(program, X, [first](std::size_t r) { return first + r; }, count,
               out, scratch, epsilon);
}

std::vector<double> eval_matrix(const Program& program, const Matrix& X,
                                double epsilon) {
  if (program.min_width() > X.cols()) {
    dim_out_of_range(static_cast<std::uint32_t>(program.min_width() - 1), X.cols());
  }
  const std::size_t n = X.rows();
  std::vector<double> out(n);
  const auto blocks = static_cast<std::ptrdiff_t>((n + kBlockRows - 1) / kBlockRows);
#pragma omp parallel
  {
    std::vector<double> scratch;
#pragma omp for schedule(static)
    for (std::ptrdiff_t b = 0; b < blocks; ++b) {
      const std::size_t first = static_cast<std::size_t>(b) * kBlockRows;
      const std::size_t count = std::min(kBlockRows, n - first);
      eval_range(program, X, first, count, out.data() + first, scratch, epsilon);
    }
  }
  return out;
}

namespace reference {

std::vector<double> eval_matrix(const Program& program, const Matrix& X,
                                double epsilon) {
  std::vector<double> out(X.rows());
  for (std::size_t r = 0; r < X.rows(); ++r) out[r] = eval(program, X.row(r), epsilon);
  return out;
}

}  // namespace reference

}  // namespace symsurrogate::expr
