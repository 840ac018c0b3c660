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

#ifndef SYMSURROGATE_PROGRAM_HPP_
#define SYMSURROGATE_PROGRAM_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "symsurrogate/matrix.hpp"

namespace symsurrogate::expr {

inline constexpr double kDefaultEpsilon = 1e-6;

enum class Op : std::uint8_t { kAdd, kSub, kMul, kDiv, kDim, kConst };

inline constexpr bool is_binary(Op op) { return op <= Op::kDiv; }

// Index into ProgramStats::op_counts.
inline constexpr std::size_t op_slot(Op op) { return static_cast<std::size_t>(op); }

struct Node {
  Op op = Op::kConst;
  std::uint32_t dim = 0;  // valid for kDim
  double value = 0.0;     // valid for kConst

  friend bool operator==(const Node&, const Node&) = default;
};

// Raised when a program or its input is structurally inconsistent, e.g. a
// terminal references a coordinate the row does not have.
class StructuralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Immutable arithmetic expression tree stored in prefix order. A subtree
// rooted at position i occupies the contiguous range [i, subtree_end(i)).
class Program {
 public:
  // Constant zero.
  Program() : nodes_{Node{}} {}
  // Throws StructuralError unless `prefix` encodes exactly one full tree.
  explicit Program(std::vector<Node> prefix);

  static Program constant(double value);
  static Program dim(std::uint32_t index);
  static Program binary(Op op, const Program& left, const Program& right);

  std::span<const Node> nodes() const { return nodes_; }
  const Node& root() const { return nodes_.front(); }
  std::size_t size() const { return nodes_.size(); }

  std::size_t subtree_end(std::size_t i) const;
  Program subtree(std::size_t i) const;
  // Copy of this program with the subtree at i replaced by `replacement`.
  Program replace_subtree(std::size_t i, const Program& replacement) const;

  // Edge count of the longest root-to-leaf path (a lone terminal is 0).
  std::size_t depth() const;

  std::size_t constant_count() const;
  std::vector<double> constants() const;
  // Replaces constants in prefix order; `values.size()` must match.
  Program with_constants(std::span<const double> values) const;

  // Largest dim index + 1, or 0 when no dims are used.
  std::size_t min_width() const;

  friend bool operator==(const Program&, const Program&) = default;

 private:
  std::vector<Node> nodes_;
};

struct ProgramStats {
  std::size_t node_count = 0;
  std::size_t depth = 0;
  std::set<std::uint32_t> used_dims;
  std::array<std::size_t, 4> op_counts{};  // +, -, *, /
  std::size_t const_count = 0;
  // Sum over nodes of their subtree sizes.
  std::size_t visitation_length = 0;

  std::size_t internal_count() const {
    return op_counts[0] + op_counts[1] + op_counts[2] + op_counts[3];
  }
};

ProgramStats stats(const Program& program);

inline double protected_div(double a, double b, double epsilon) {
  if (b >= epsilon || b <= -epsilon) return a / b;
  return a / (b >= 0.0 ? epsilon : -epsilon);
}

inline double apply_op(Op op, double a, double b, double epsilon) {
  switch (op) {
    case Op::kAdd: return a + b;
    case Op::kSub: return a - b;
    case Op::kMul: return a * b;
    default: return protected_div(a, b, epsilon);
  }
}

double eval(const Program& program, std::span<const double> row,
            double epsilon = kDefaultEpsilon);

// Evaluates `program` over rows[0..count) of X into out[0..count), column-wise
// with a value stack in `scratch`. Single-threaded building block for the
// parallel drivers.
void eval_block(const Program& program, const Matrix& X,
                const std::size_t* rows, std::size_t count, double* out,
                std::vector<double>& scratch, double epsilon = kDefaultEpsilon);

// Same as eval_block over the contiguous rows [first, first + count).
void eval_range(const Program& program, const Matrix& X, std::size_t first,
                std::size_t count, double* out, std::vector<double>& scratch,
                double epsilon = kDefaultEpsilon);

// All rows of X, OpenMP-parallel over row blocks.
std::vector<double> eval_matrix(const Program& program, const Matrix& X,
                                double epsilon = kDefaultEpsilon);

namespace reference {

// Row-at-a-time recursive evaluation; kept as the oracle for the batched
// kernels.
std::vector<double> eval_matrix(const Program& program, const Matrix& X,
                                double epsilon = kDefaultEpsilon);

}  // namespace reference

// ---- text form ----------------------------------------------------------

class ParseError : public std::runtime_error {
 public:
  enum class Kind { kMalformedToken, kArity, kUnbalanced, kBadConstant };

  ParseError(Kind kind, std::size_t offset, const std::string& message);

  Kind kind() const { return kind_; }
  std::size_t offset() const { return offset_; }

 private:
  Kind kind_;
  std::size_t offset_;
};

// Prefix notation: plus|minus|times|divide(expr, expr), terminals d<int>,
// constants [<real>]. Whitespace is free.
Program parse(std::string_view text);

struct RecoveredProgram {
  Program program;
  std::size_t dropped_closers = 0;
};

// Like parse(), but accepts surplus ')' after a complete expression and
// reports how many were dropped. Any other defect still throws.
RecoveredProgram parse_recovering(std::string_view text);

std::string serialize(const Program& program);

// Shortest round-trip decimal, always with a '.' or exponent ("3.0").
std::string format_constant(double value);

// Removes all whitespace; the comparison key for text round-trips.
std::string strip_whitespace(std::string_view text);

// ---- simplification -----------------------------------------------------

// Constant folding, neutral/annihilator elimination, negation collapse and
// x-x / x+x rewrites, iterated to a fixpoint. Constants within `tol` of 0
// or 1 are treated as that neutral element; tol = 0 keeps every rewrite
// exact in floating point. Never increases node count.
Program simplify(const Program& program, double tol = 0.0,
                 double epsilon = kDefaultEpsilon);

}  // namespace symsurrogate::expr

#endif  // SYMSURROGATE_PROGRAM_HPP_
