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

#include <stdexcept>

#include "symsurrogate/megp.hpp"

namespace symsurrogate::megp {

std::pair<Program, Program> crossover(const Program& a, const Program& b,
                                      std::size_t max_depth, Rng& rng) {
  const std::size_t i = uniform_index(rng, a.size());
  const std::size_t j = uniform_index(rng, b.size());
  Program first = a.replace_subtree(i, b.subtree(j));
  Program second = b.replace_subtree(j, a.subtree(i));
  if (first.depth() > max_depth) first = a;
  if (second.depth() > max_depth) second = b;
  return {std::move(first), std::move(second)};
}

Program point_mutate(const Program& p, std::span<const std::size_t> view_dims,
                     const GpConfig& config, Rng& rng) {
  if (view_dims.empty()) throw std::invalid_argument("point_mutate: empty view");
  std::vector<expr::Node> nodes(p.nodes().begin(), p.nodes().end());
  expr::Node& node = nodes[uniform_index(rng, nodes.size())];
  switch (node.op) {
    case expr::Op::kConst:
      node.value = uniform_real(rng, config.const_min, config.const_max);
      break;
    case expr::Op::kDim:
      if (view_dims.size() > 1) {
        // Draw among the other coordinates so the mutation is never a no-op.
        std::size_t pick = view_dims[uniform_index(rng, view_dims.size() - 1)];
        if (pick == node.dim) pick = view_dims.back();
        node.dim = static_cast<std::uint32_t>(pick);
      }
      break;
    default: {
      const auto shift = 1 + uniform_index(rng, 3);
      node.op = static_cast<expr::Op>((expr::op_slot(node.op) + shift) % 4);
      break;
    }
  }
  return Program(std::move(nodes));
}

}  // namespace symsurrogate::megp
