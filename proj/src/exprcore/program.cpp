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
#include <utility>

#include "symsurrogate/program.hpp"

namespace symsurrogate::expr {

namespace {

// Returns the end of the subtree starting at `i`, or nodes.size() + 1 if the
// sequence runs out before the subtree is complete.
std::size_t scan_subtree(std::span<const Node> nodes, std::size_t i) {
  std::size_t pending = 1;
  while (pending > 0) {
    if (i >= nodes.size()) return nodes.size() + 1;
    pending += is_binary(nodes[i].op) ? 2 : 0;
    --pending;
    ++i;
  }
  return i;
}

}  // namespace

Program::Program(std::vector<Node> prefix) : nodes_(std::move(prefix)) {
  if (nodes_.empty()) throw StructuralError("empty program");
  if (scan_subtree(nodes_, 0) != nodes_.size()) {
    throw StructuralError("prefix sequence is not a single complete tree");
  }
}

Program Program::constant(double value) {
  return Program(std::vector<Node>{Node{Op::kConst, 0, value}});
}

Program Program::dim(std::uint32_t index) {
  return Program(std::vector<Node>{Node{Op::kDim, index, 0.0}});
}

Program Program::binary(Op op, const Program& left, const Program& right) {
  if (!is_binary(op)) throw StructuralError("binary() needs an operator");
  std::vector<Node> nodes;
  nodes.reserve(1 + left.size() + right.size());
  nodes.push_back(Node{op, 0, 0.0});
  nodes.insert(nodes.end(), left.nodes_.begin(), left.nodes_.end());
  nodes.insert(nodes.end(), right.nodes_.begin(), right.nodes_.end());
  return Program(std::move(nodes));
}

std::size_t Program::subtree_end(std::size_t i) const {
  return scan_subtree(nodes_, i);
}

Program Program::subtree(std::size_t i) const {
  return Program(std::vector<Node>(nodes_.begin() + static_cast<std::ptrdiff_t>(i),
                                   nodes_.begin() + static_cast<std::ptrdiff_t>(subtree_end(i))));
}

Program Program::replace_subtree(std::size_t i, const Program& replacement) const {
  const std::size_t end = subtree_end(i);
  std::vector<Node> nodes;
  nodes.reserve(nodes_.size() - (end - i) + replacement.size());
  nodes.insert(nodes.end(), nodes_.begin(), nodes_.begin() + static_cast<std::ptrdiff_t>(i));
  nodes.insert(nodes.end(), replacement.nodes_.begin(), replacement.nodes_.end());
  nodes.insert(nodes.end(), nodes_.begin() + static_cast<std::ptrdiff_t>(end), nodes_.end());
  return Program(std::move(nodes));
}

std::size_t Program::depth() const {
  // Depth of each pending child slot along the prefix walk.
  std::vector<std::size_t> slots{0};
  std::size_t best = 0;
  for (const Node& n : nodes_) {
    const std::size_t d = slots.back();
    slots.pop_back();
    best = std::max(best, d);
    if (is_binary(n.op)) {
      slots.push_back(d + 1);
      slots.push_back(d + 1);
    }
  }
  return best;
}

std::size_t Program::constant_count() const {
  return static_cast<std::size_t>(std::count_if(
      nodes_.begin(), nodes_.end(), [](const Node& n) { return n.op == Op::kConst; }));
}

std::vector<double> Program::constants() const {
  std::vector<double> out;
  for (const Node& n : nodes_) {
    if (n.op == Op::kConst) out.push_back(n.value);
  }
  return out;
}

Program Program::with_constants(std::span<const double> values) const {
  if (values.size() != constant_count()) {
    throw std::invalid_argument("with_constants: constant count mismatch");
  }
  std::vector<Node> nodes = nodes_;
  std::size_t k = 0;
  for (Node& n : nodes) {
    if (n.op == Op::kConst) n.value = values[k++];
  }
  return Program(std::move(nodes));
}

std::size_t Program::min_width() const {
  std::size_t width = 0;
  for (const Node& n : nodes_) {
    if (n.op == Op::kDim) width = std::max<std::size_t>(width, n.dim + 1);
  }
  return width;
}

ProgramStats stats(const Program& program) {
  ProgramStats s;
  const auto nodes = program.nodes();
  s.node_count = nodes.size();
  s.depth = program.depth();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Node& n = nodes[i];
    if (is_binary(n.op)) {
      ++s.op_counts[op_slot(n.op)];
    } else if (n.op == Op::kDim) {
      s.used_dims.insert(n.dim);
    } else {
      ++s.const_count;
    }
    s.visitation_length += program.subtree_end(i) - i;
  }
  return s;
}

}  // namespace symsurrogate::expr
