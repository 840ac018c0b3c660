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

#include "symsurrogate/modelselect.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

#include "symsurrogate/hash.hpp"

namespace symsurrogate::select {

std::vector<std::uint32_t> argmax_rows(const Matrix& scores) {
  std::vector<std::uint32_t> out(scores.rows(), 0);
  for (std::size_t i = 0; i < scores.rows(); ++i) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < scores.cols(); ++c) {
      if (scores(i, c) > scores(i, best)) best = c;
    }
    out[i] = static_cast<std::uint32_t>(best);
  }
  return out;
}

double macro_f1(std::span<const std::uint32_t> pred, std::span<const std::uint32_t> truth,
                std::size_t num_classes) {
  if (pred.size() != truth.size()) throw std::invalid_argument("macro_f1: length mismatch");
  if (num_classes == 0) throw std::invalid_argument("macro_f1: no classes");
  std::vector<std::size_t> tp(num_classes, 0), fp(num_classes, 0), fn(num_classes, 0);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i] >= num_classes || truth[i] >= num_classes) {
      throw std::invalid_argument("macro_f1: label out of range");
    }
    if (pred[i] == truth[i]) {
      ++tp[pred[i]];
    } else {
      ++fp[pred[i]];
      ++fn[truth[i]];
    }
  }
  double total = 0.0;
  for (std::size_t c = 0; c < num_classes; ++c) {
    // 2PR/(P+R) reduces to 2tp/(2tp+fp+fn), which is 0 whenever tp is.
    if (tp[c] == 0) continue;
    total += 2.0 * static_cast<double>(tp[c]) /
             static_cast<double>(2 * tp[c] + fp[c] + fn[c]);
  }
  return total / static_cast<double>(num_classes);
}

double se_of_runs(std::span<const double> scores) {
  const std::size_t r = scores.size();
  if (r < 2) throw std::invalid_argument("se_of_runs: need at least two runs");
  double mean = 0.0;
  for (double s : scores) mean += s;
  mean /= static_cast<double>(r);
  double ss = 0.0;
  for (double s : scores) ss += (s - mean) * (s - mean);
  return std::sqrt(ss / (static_cast<double>(r) * static_cast<double>(r - 1)));
}

Candidate candidate_of(const megp::RunRecord& record) {
  return {record.val_macro_f1, record.complexity, record.depth, record.unique_dims,
          record.program_digest()};
}

SelectionReport select_canonical(std::span<const Candidate> candidates) {
  if (candidates.empty()) throw std::invalid_argument("select_canonical: no runs");
  SelectionReport report;
  std::vector<double> scores;
  for (const auto& c : candidates) scores.push_back(c.score);
  report.best_score = *std::max_element(scores.begin(), scores.end());
  report.se = scores.size() >= 2 ? se_of_runs(scores) : 0.0;
  const double cut = report.best_score - report.se;
  report.feasible.resize(candidates.size());
  bool have = false;
  auto key = [](const Candidate& c) {
    return std::tie(c.complexity, c.depth, c.unique_dims, c.digest);
  };
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    report.feasible[i] = candidates[i].score >= cut;
    if (!report.feasible[i]) continue;
    if (!have || key(candidates[i]) < key(candidates[report.chosen])) {
      report.chosen = i;
      have = true;
    }
  }
  return report;
}

SelectionReport select_canonical(std::span<const megp::RunRecord> runs) {
  std::vector<Candidate> candidates;
  candidates.reserve(runs.size());
  for (const auto& r : runs) candidates.push_back(candidate_of(r));
  SelectionReport report = select_canonical(std::span<const Candidate>(candidates));
  report.chosen_seed = runs[report.chosen].seed;
  return report;
}

const megp::RunRecord& canonical(std::span<const megp::RunRecord> runs) {
  return runs[select_canonical(runs).chosen];
}

nlohmann::json SelectionReport::to_json(std::span<const megp::RunRecord> runs) const {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < runs.size(); ++i) {
    rows.push_back({{"seed", runs[i].seed},
                    {"val_macro_f1", runs[i].val_macro_f1},
                    {"complexity", runs[i].complexity},
                    {"depth", runs[i].depth},
                    {"unique_dims", runs[i].unique_dims},
                    {"program_digest", to_hex(runs[i].program_digest())},
                    {"feasible", i < feasible.size() && feasible[i]}});
  }
  return {{"m_star", best_score},
          {"se", se},
          {"threshold", best_score - se},
          {"chosen_index", chosen},
          {"chosen_seed", chosen_seed},
          {"runs", rows}};
}

}  // namespace symsurrogate::select
