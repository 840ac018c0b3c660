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

#include <cmath>

#include "symsurrogate/program.hpp"

namespace symsurrogate::expr {

namespace {

class Simplifier {
 public:
  Simplifier(double tol, double epsilon) : tol_(tol), epsilon_(epsilon) {}

  Program run(const Program& p, std::size_t i) {
    const Node& n = p.nodes()[i];
    if (!is_binary(n.op)) return p.subtree(i);
    const std::size_t right = p.subtree_end(i + 1);
    return combine(n.op, run(p, i + 1), run(p, right));
  }

 private:
  static bool is_const(const Program& p) { return p.size() == 1 && p.root().op == Op::kConst; }
  static bool is_terminal(const Program& p) { return p.size() == 1; }

  bool is_zero(const Program& p) const {
    return is_const(p) && std::fabs(p.root().value) <= tol_;
  }
  bool is_one(const Program& p) const {
    return is_const(p) && std::fabs(p.root().value - 1.0) <= tol_;
  }
  // Matches minus(<0>, b) and returns b.
  const Program* negated(const Program& p, Program& holder) const {
    if (p.root().op != Op::kSub) return nullptr;
    const std::size_t right = p.subtree_end(1);
    if (!is_zero(p.subtree(1))) return nullptr;
    holder = p.subtree(right);
    return &holder;
  }

  Program combine(Op op, const Program& a, const Program& b) {
    if (is_const(a) && is_const(b)) {
      return Program::constant(apply_op(op, a.root().value, b.root().value, epsilon_));
    }
    Program inner;
    switch (op) {
      case Op::kAdd:
        if (is_zero(b)) return a;
        if (is_zero(a)) return b;
        if (negated(b, inner)) return combine(Op::kSub, a, inner);
        if (negated(a, inner)) return combine(Op::kSub, b, inner);
        if (a == b && !is_terminal(a)) {
          return Program::binary(Op::kMul, Program::constant(2.0), a);
        }
        break;
      case Op::kSub:
        if (is_zero(b)) return a;
        if (a == b) return Program::constant(0.0);
        if (negated(b, inner)) return combine(Op::kAdd, a, inner);
        break;
      case Op::kMul:
        if (is_zero(a) || is_zero(b)) return Program::constant(0.0);
        if (is_one(b)) return a;
        if (is_one(a)) return b;
        break;
      case Op::kDiv:
        if (is_one(b)) return a;
        if (is_zero(a)) return Program::constant(0.0);
        break;
      default:
        break;
    }
    return Program::binary(op, a, b);
  }

  double tol_;
  double epsilon_;
};

}  // namespace

Program simplify(const Program& program, double tol, double epsilon) {
  Simplifier s(tol, epsilon);
  Program current = program;
  for (;;) {
    Program next = s.run(current, 0);
    if (next == current) return next;
    current = std::move(next);
  }
}

}  // namespace symsurrogate::expr
