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

namespace {

// Accumulates d(seed-weighted output)/d constant over all rows for one
// program, writing into grad at the program's constant offsets.
class Backprop {
 public:
  Backprop(const Program& program, double epsilon) : nodes_(program.nodes()), eps_(epsilon) {
    right_.resize(nodes_.size(), 0);
    slot_.resize(nodes_.size(), 0);
    std::size_t k = 0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (expr::is_binary(nodes_[i].op)) right_[i] = program.subtree_end(i + 1);
      if (nodes_[i].op == expr::Op::kConst) slot_[i] = k++;
    }
    vals_.resize(nodes_.size());
    adj_.resize(nodes_.size());
  }

  void accumulate(std::span<const double> row, double seed, double* grad) {
    for (std::size_t i = nodes_.size(); i-- > 0;) {
      const auto& n = nodes_[i];
      switch (n.op) {
        case expr::Op::kConst: vals_[i] = n.value; break;
        case expr::Op::kDim: vals_[i] = row[n.dim]; break;
        default: vals_[i] = expr::apply_op(n.op, vals_[i + 1], vals_[right_[i]], eps_);
      }
    }
    std::fill(adj_.begin(), adj_.end(), 0.0);
    adj_[0] = seed;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const auto& n = nodes_[i];
      const double g = adj_[i];
      if (n.op == expr::Op::kConst) {
        grad[slot_[i]] += g;
        continue;
      }
      if (!expr::is_binary(n.op) || g == 0.0) continue;
      const std::size_t l = i + 1;
      const std::size_t r = right_[i];
      const double a = vals_[l];
      const double b = vals_[r];
      switch (n.op) {
        case expr::Op::kAdd: adj_[l] += g; adj_[r] += g; break;
        case expr::Op::kSub: adj_[l] += g; adj_[r] -= g; break;
        case expr::Op::kMul: adj_[l] += g * b; adj_[r] += g * a; break;
        default:
          if (b >= eps_ || b <= -eps_) {
            adj_[l] += g / b;
            adj_[r] -= g * a / (b * b);
          } else {
            adj_[l] += g / (b >= 0.0 ? eps_ : -eps_);
          }
      }
    }
  }

 private:
  std::span<const expr::Node> nodes_;
  double eps_;
  std::vector<std::size_t> right_;
  std::vector<std::size_t> slot_;
  std::vector<double> vals_;
  std::vector<double> adj_;
};

}  // namespace

std::vector<double> team_constants(const Team& team) {
  std::vector<double> out;
  for (const auto& view : team) {
    for (const auto& p : view) {
      const auto c = p.constants();
      out.insert(out.end(), c.begin(), c.end());
    }
  }
  return out;
}

Team with_team_constants(const Team& team, std::span<const double> values) {
  Team out = team;
  std::size_t offset = 0;
  for (auto& view : out) {
    for (auto& p : view) {
      const std::size_t k = p.constant_count();
      if (offset + k > values.size()) {
        throw std::invalid_argument("with_team_constants: too few values");
      }
      p = p.with_constants(values.subspan(offset, k));
      offset += k;
    }
  }
  if (offset != values.size()) throw std::invalid_argument("with_team_constants: too many values");
  return out;
}

std::vector<double> constant_gradient(const Team& team, const Batch& batch, double epsilon) {
  const Matrix z = team_logits(team, batch.X, epsilon);
  const std::size_t n = z.rows();
  const std::size_t k = z.cols();
  if (batch.y.size() != n || n == 0) throw std::invalid_argument("constant_gradient: bad batch");
  const Matrix p = softmax(z);
  // dCE/dz; rows whose true-class probability sits on the clip have none.
  Matrix dz(n, k, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double py = p(i, batch.y[i]);
    if (py < kProbFloor || py > 1.0 - kProbFloor) continue;
    for (std::size_t c = 0; c < k; ++c) {
      dz(i, c) = (p(i, c) - (c == batch.y[i] ? 1.0 : 0.0)) / static_cast<double>(n);
    }
  }
  std::vector<double> grad;
  for (const auto& view : team) {
    for (std::size_t c = 0; c < k; ++c) {
      const Program& prog = view[c];
      const std::size_t offset = grad.size();
      grad.resize(offset + prog.constant_count(), 0.0);
      if (prog.constant_count() == 0) continue;
      Backprop bp(prog, epsilon);
      for (std::size_t i = 0; i < n; ++i) {
        if (dz(i, c) != 0.0) bp.accumulate(batch.X.row(i), dz(i, c), grad.data() + offset);
      }
    }
  }
  return grad;
}

TuneResult tune_constants(const Team& team, const Batch& batch, double learning_rate,
                          std::size_t steps, double epsilon) {
  TuneResult result;
  result.team = team;
  result.initial_ce = softmax_ce(team_logits(team, batch.X, epsilon), batch.y);
  result.final_ce = result.initial_ce;
  std::vector<double> theta = team_constants(team);
  if (theta.empty()) return result;
  for (std::size_t s = 0; s < steps; ++s) {
    const auto grad = constant_gradient(result.team, batch, epsilon);
    double rate = learning_rate;
    for (int attempt = 0; attempt <= 3; ++attempt, rate *= 0.5) {
      std::vector<double> cand(theta.size());
      for (std::size_t i = 0; i < theta.size(); ++i) cand[i] = theta[i] - rate * grad[i];
      Team trial = with_team_constants(result.team, cand);
      const double ce = softmax_ce(team_logits(trial, batch.X, epsilon), batch.y);
      if (ce <= result.final_ce) {
        theta = std::move(cand);
        result.team = std::move(trial);
        result.final_ce = ce;
        ++result.accepted_steps;
        break;
      }
    }
  }
  return result;
}

}  // namespace symsurrogate::megp
