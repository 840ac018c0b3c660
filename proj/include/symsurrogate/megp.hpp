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

#ifndef SYMSURROGATE_MEGP_HPP_
#define SYMSURROGATE_MEGP_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "symsurrogate/matrix.hpp"
#include "symsurrogate/program.hpp"
#include "symsurrogate/rng.hpp"
#include "symsurrogate/spfp.hpp"

namespace symsurrogate::megp {

using expr::Program;

// Per-view, per-class programs: team[v][c] is class c's contribution from
// view v.
using Team = std::vector<std::vector<Program>>;

struct GpConfig {
  std::size_t pop_size = 30;
  std::size_t max_generations = 150;
  std::size_t stall_generations = 30;
  // Genes per individual; 0 means "one per class".
  std::size_t genes = 0;
  std::size_t max_depth = 10;
  std::size_t init_min_depth = 2;
  std::size_t init_max_depth = 6;
  double p_crossover = 0.84;
  double p_mutation = 0.14;
  double p_reproduction = 0.02;
  double const_min = -10.0;
  double const_max = 10.0;
  // Elite fractions for isolated and ensemble evaluation, and the
  // probability of evaluating an individual inside a team.
  double elite_isolated = 0.033;
  double elite_ensemble = 0.10;
  double p_ensemble = 0.75;
  std::size_t batch_divisor = 50;
  // Total constant-tuning step budget per run.
  std::size_t epochs = 1000;
  double learning_rate = 0.001;
  std::size_t tune_steps = 5;
  double parsimony = 1e-4;
  std::size_t tournament_size = 3;
  // Probability that a generated terminal is an ephemeral constant.
  double p_constant_terminal = 0.25;
  double stall_tolerance = 1e-6;
  double epsilon = expr::kDefaultEpsilon;

  // Throws std::invalid_argument on inconsistent settings.
  void validate() const;
  nlohmann::json to_json() const;
  static GpConfig from_json(const nlohmann::json& j);
  std::string digest() const;
};

struct Individual {
  std::vector<Program> genes;
  double fitness = 0.0;
  std::size_t view = 0;
  bool ensemble_eval = false;

  std::size_t node_count() const;
};

using Population = std::vector<Individual>;

// ---- tree generation and variation --------------------------------------

enum class InitMethod { kFull, kGrow };

Program random_tree(std::span<const std::size_t> view_dims, std::size_t depth,
                    InitMethod method, const GpConfig& config, Rng& rng);

// Ramped half-and-half: individual i uses depth init_min + (i mod ramp) and
// alternates full/grow. One population per view, each on its own RNG stream.
std::vector<Population> init_populations(const spfp::ViewPartition& partition,
                                         std::size_t num_classes, const GpConfig& config,
                                         std::uint64_t seed);

// Subtree crossover; an offspring deeper than max_depth is replaced by its
// parent.
std::pair<Program, Program> crossover(const Program& a, const Program& b,
                                      std::size_t max_depth, Rng& rng);

// Replaces one node by a same-kind node: operator for operator, view
// coordinate for coordinate, fresh uniform constant for constant.
Program point_mutate(const Program& p, std::span<const std::size_t> view_dims,
                     const GpConfig& config, Rng& rng);

// ---- evaluation ---------------------------------------------------------

// z[i][c] = sum over views (ascending) of team[v][c] evaluated on row i.
// OpenMP-parallel over row blocks.
Matrix team_logits(const Team& team, const Matrix& X, double epsilon = expr::kDefaultEpsilon);

namespace reference {
Matrix team_logits(const Team& team, const Matrix& X, double epsilon = expr::kDefaultEpsilon);
}

inline constexpr double kProbFloor = 1e-6;

// Row-wise softmax with max subtraction.
Matrix softmax(const Matrix& z);

// Mean of -ln clip(p_y) with clip to [1e-6, 1 - 1e-6].
double softmax_ce(const Matrix& z, std::span<const std::uint32_t> y);

struct Batch {
  Matrix X;
  std::vector<std::uint32_t> y;
};

enum class EvalMode { kIsolated, kEnsemble };

// Partner outputs on a fixed batch, so that many individuals can be scored
// against the same team without re-evaluating it.
class TeamContext {
 public:
  TeamContext(const Team& partners, const Batch& batch, double epsilon);

  // Cross-entropy on the batch plus parsimony * nodes / 1000. In ensemble
  // mode the individual replaces its view's partner.
  double fitness(const Individual& ind, EvalMode mode, double parsimony) const;
  double fitness(const Individual& ind, EvalMode mode, double parsimony,
                 std::vector<double>& scratch) const;

 private:
  const Batch* batch_;
  std::size_t num_classes_;
  double epsilon_;
  // outputs_[v][c] = batch values of partners[v][c].
  std::vector<std::vector<std::vector<double>>> outputs_;
};

double fitness(const Individual& ind, EvalMode mode, const Team& partners, const Batch& batch,
               double parsimony, double epsilon = expr::kDefaultEpsilon);

// ---- constant tuning ----------------------------------------------------

std::vector<double> team_constants(const Team& team);
Team with_team_constants(const Team& team, std::span<const double> values);

// d CE / d constant for every constant of the team, in team_constants()
// order, by reverse-mode accumulation. The protected branch of division is
// treated as a constant denominator.
std::vector<double> constant_gradient(const Team& team, const Batch& batch,
                                      double epsilon = expr::kDefaultEpsilon);

struct TuneResult {
  Team team;
  double initial_ce = 0.0;
  double final_ce = 0.0;
  std::size_t accepted_steps = 0;
};

// Gradient descent on all constants; a step that raises the batch CE is
// retried with the rate halved up to three times and dropped otherwise.
TuneResult tune_constants(const Team& team, const Batch& batch, double learning_rate,
                          std::size_t steps, double epsilon = expr::kDefaultEpsilon);

// ---- runs ---------------------------------------------------------------

struct TrainData {
  Matrix X_train;
  std::vector<std::uint32_t> y_train;
  Matrix X_val;
  std::vector<std::uint32_t> y_val;
  std::size_t num_classes = 0;
};

struct RunRecord {
  std::uint64_t seed = 0;
  std::string config_digest;
  std::string partition_digest;
  std::size_t num_classes = 0;
  Team team;
  double val_macro_f1 = 0.0;
  std::size_t complexity = 0;  // total nodes over every (view, class) program
  std::size_t depth = 0;       // deepest program
  std::size_t unique_dims = 0;
  std::size_t generations = 0;
  double train_ce = 0.0;
  std::vector<double> ce_history;  // champion full-train CE per generation

  // Per-class logits assembled as left-nested sums over views.
  std::vector<Program> logit_programs() const;
  // Serializations in (class, view) order joined by '\n'.
  std::string canonical_text() const;
  std::uint64_t program_digest() const;

  nlohmann::json to_json() const;
  static RunRecord from_json(const nlohmann::json& j);
};

// Fills complexity, depth and unique_dims from the team.
void compute_structure(RunRecord& record);

RunRecord run(const TrainData& data, const spfp::ViewPartition& partition,
              const GpConfig& config, std::uint64_t seed);

}  // namespace symsurrogate::megp

#endif  // SYMSURROGATE_MEGP_HPP_
