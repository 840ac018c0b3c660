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
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

#include "symsurrogate/hash.hpp"
#include "symsurrogate/megp.hpp"
#include "symsurrogate/modelselect.hpp"

namespace symsurrogate::megp {

namespace {

std::size_t ceil_fraction(double f, std::size_t n) {
  return static_cast<std::size_t>(std::ceil(f * static_cast<double>(n) - 1e-9));
}

void check_labels(std::span<const std::uint32_t> y, std::size_t k, const char* what) {
  for (auto label : y) {
    if (label >= k) throw std::invalid_argument(std::string(what) + ": label out of range");
  }
}

const Individual& tournament(const Population& pop, std::size_t size, Rng& rng) {
  const Individual* best = &pop[uniform_index(rng, pop.size())];
  for (std::size_t t = 1; t < size; ++t) {
    const Individual& other = pop[uniform_index(rng, pop.size())];
    if (other.fitness < best->fitness) best = &other;
  }
  return *best;
}

// Indices of the `count` fittest members in the given mode; ties keep
// population order.
std::vector<std::size_t> elites(const Population& pop, bool ensemble, std::size_t count) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    if (pop[i].ensemble_eval == ensemble) idx.push_back(i);
  }
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return pop[a].fitness < pop[b].fitness; });
  if (idx.size() > count) idx.resize(count);
  return idx;
}

// Crossover picks the gene of each parent independently, so a useful
// subtree found for one class can seed another class's logit.
Population breed(const Population& pop, std::span<const std::size_t> dims,
                 const GpConfig& config, Rng& rng) {
  Population next;
  next.reserve(config.pop_size);
  for (bool ensemble : {true, false}) {
    const double frac = ensemble ? config.elite_ensemble : config.elite_isolated;
    for (auto i : elites(pop, ensemble, ceil_fraction(frac, config.pop_size))) {
      if (next.size() < config.pop_size) next.push_back(pop[i]);
    }
  }
  const std::size_t genes = pop.front().genes.size();
  while (next.size() < config.pop_size) {
    const double r = uniform01(rng);
    if (r < config.p_crossover) {
      Individual a = tournament(pop, config.tournament_size, rng);
      Individual b = tournament(pop, config.tournament_size, rng);
      const std::size_t c = uniform_index(rng, genes);
      const std::size_t d = uniform_index(rng, genes);
      auto [x, y] = crossover(a.genes[c], b.genes[d], config.max_depth, rng);
      a.genes[c] = std::move(x);
      b.genes[d] = std::move(y);
      next.push_back(std::move(a));
      if (next.size() < config.pop_size) next.push_back(std::move(b));
    } else if (r < config.p_crossover + config.p_mutation) {
      Individual a = tournament(pop, config.tournament_size, rng);
      const std::size_t c = uniform_index(rng, genes);
      a.genes[c] = point_mutate(a.genes[c], dims, config, rng);
      next.push_back(std::move(a));
    } else {
      next.push_back(tournament(pop, config.tournament_size, rng));
    }
  }
  return next;
}

// Best team seen so far with its per-view outputs on the full training
// split cached, so a single-view swap costs one view's evaluation. Logits
// are re-summed over views in ascending order, matching team_logits.
class Incumbent {
 public:
  Incumbent(const Matrix& X, std::span<const std::uint32_t> y, const Team& team, double epsilon)
      : X_(&X), y_(y), epsilon_(epsilon), team_(team), outputs_(team.size()) {
    for (std::size_t v = 0; v < team.size(); ++v) outputs_[v] = view_outputs(team[v]);
    ce_ = score(outputs_);
  }

  const Team& team() const { return team_; }
  double ce() const { return ce_; }

  void offer(const Team& team) {
    if (team == team_) return;
    std::vector<Matrix> outs(team.size());
    for (std::size_t v = 0; v < team.size(); ++v) {
      outs[v] = team[v] == team_[v] ? outputs_[v] : view_outputs(team[v]);
    }
    const double ce = score(outs);
    if (ce < ce_) {
      team_ = team;
      outputs_ = std::move(outs);
      ce_ = ce;
    }
  }

  void offer(std::size_t v, const std::vector<Program>& genes) {
    if (genes == team_[v]) return;
    Matrix out = view_outputs(genes);
    std::swap(outputs_[v], out);
    const double ce = score(outputs_);
    if (ce < ce_) {
      team_[v] = genes;
      ce_ = ce;
    } else {
      std::swap(outputs_[v], out);
    }
  }

 private:
  Matrix view_outputs(const std::vector<Program>& genes) const {
    const std::size_t n = X_->rows();
    Matrix out(genes.size(), n);
    for (std::size_t c = 0; c < genes.size(); ++c) {
      expr::eval_range(genes[c], *X_, 0, n, out.row(c).data(), scratch_, epsilon_);
    }
    return out;
  }

  double score(const std::vector<Matrix>& outs) const {
    const std::size_t k = outs.front().rows();
    const std::size_t n = X_->rows();
    Matrix z(n, k, 0.0);
    for (const auto& out : outs) {
      for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t i = 0; i < n; ++i) z(i, c) += out(c, i);
      }
    }
    return softmax_ce(z, y_);
  }

  const Matrix* X_;
  std::span<const std::uint32_t> y_;
  double epsilon_;
  Team team_;
  std::vector<Matrix> outputs_;  // outputs_[v](c, i)
  double ce_ = 0.0;
  mutable std::vector<double> scratch_;
};

nlohmann::json team_json(const Team& team) {
  nlohmann::json views = nlohmann::json::array();
  for (const auto& view : team) {
    nlohmann::json genes = nlohmann::json::array();
    for (const auto& p : view) genes.push_back(expr::serialize(p));
    views.push_back(genes);
  }
  return views;
}

}  // namespace

std::vector<Program> RunRecord::logit_programs() const {
  std::vector<Program> out;
  if (team.empty()) return out;
  for (std::size_t c = 0; c < team.front().size(); ++c) {
    Program acc = team[0][c];
    for (std::size_t v = 1; v < team.size(); ++v) {
      acc = Program::binary(expr::Op::kAdd, acc, team[v][c]);
    }
    out.push_back(std::move(acc));
  }
  return out;
}

std::string RunRecord::canonical_text() const {
  std::string text;
  if (team.empty()) return text;
  for (std::size_t c = 0; c < team.front().size(); ++c) {
    for (std::size_t v = 0; v < team.size(); ++v) {
      if (!text.empty()) text += '\n';
      text += expr::serialize(team[v][c]);
    }
  }
  return text;
}

std::uint64_t RunRecord::program_digest() const { return fnv1a64(canonical_text()); }

nlohmann::json RunRecord::to_json() const {
  return {{"seed", seed},
          {"config_digest", config_digest},
          {"partition_digest", partition_digest},
          {"num_classes", num_classes},
          {"views", team_json(team)},
          {"val_macro_f1", val_macro_f1},
          {"complexity", complexity},
          {"depth", depth},
          {"unique_dims", unique_dims},
          {"generations", generations},
          {"train_ce", train_ce},
          {"ce_history", ce_history},
          {"program_digest", to_hex(program_digest())}};
}

RunRecord RunRecord::from_json(const nlohmann::json& j) {
  RunRecord r;
  r.seed = j.at("seed").get<std::uint64_t>();
  r.config_digest = j.at("config_digest").get<std::string>();
  r.partition_digest = j.at("partition_digest").get<std::string>();
  r.num_classes = j.at("num_classes").get<std::size_t>();
  for (const auto& view : j.at("views")) {
    std::vector<Program> genes;
    for (const auto& text : view) genes.push_back(expr::parse(text.get<std::string>()));
    if (genes.size() != r.num_classes) {
      throw std::invalid_argument("RunRecord: view gene count differs from num_classes");
    }
    r.team.push_back(std::move(genes));
  }
  r.val_macro_f1 = j.at("val_macro_f1").get<double>();
  r.generations = j.at("generations").get<std::size_t>();
  r.train_ce = j.at("train_ce").get<double>();
  r.ce_history = j.at("ce_history").get<std::vector<double>>();
  compute_structure(r);
  return r;
}

void compute_structure(RunRecord& record) {
  record.complexity = 0;
  record.depth = 0;
  std::set<std::uint32_t> dims;
  for (const auto& view : record.team) {
    for (const auto& p : view) {
      const auto s = expr::stats(p);
      record.complexity += s.node_count;
      record.depth = std::max(record.depth, s.depth);
      dims.insert(s.used_dims.begin(), s.used_dims.end());
    }
  }
  record.unique_dims = dims.size();
}

RunRecord run(const TrainData& data, const spfp::ViewPartition& partition,
              const GpConfig& config, std::uint64_t seed) {
  config.validate();
  const std::size_t k = data.num_classes;
  if (k < 2) throw std::invalid_argument("run: need at least two classes");
  const std::size_t n = data.X_train.rows();
  if (n == 0 || data.y_train.size() != n) throw std::invalid_argument("run: empty train split");
  if (data.X_val.rows() == 0 || data.y_val.size() != data.X_val.rows()) {
    throw std::invalid_argument("run: empty validation split");
  }
  if (!partition.valid() || partition.d != data.X_train.cols()) {
    throw std::invalid_argument("run: partition does not match the data");
  }
  check_labels(data.y_train, k, "run");
  check_labels(data.y_val, k, "run");

  auto pops = init_populations(partition, k, config, seed);
  const std::size_t views = pops.size();
  std::vector<Rng> rngs;
  for (std::size_t v = 0; v < views; ++v) rngs.emplace_back(derive_seed(seed, 2000 + v));
  Rng batch_rng(derive_seed(seed, 1));

  const std::size_t batch_size = std::max<std::size_t>(1, (n + config.batch_divisor - 1) /
                                                              config.batch_divisor);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t offered = std::max<std::size_t>(1, ceil_fraction(config.elite_ensemble,
                                                                     config.pop_size));

  Team partners(views);
  for (std::size_t v = 0; v < views; ++v) partners[v] = pops[v][0].genes;
  Incumbent champion(data.X_train, data.y_train, partners, config.epsilon);

  RunRecord record;
  record.seed = seed;
  record.config_digest = config.digest();
  record.partition_digest = partition.digest();
  record.num_classes = k;
  std::size_t tune_left = config.epochs;
  std::size_t stall = 0;

  for (std::size_t gen = 0; gen < config.max_generations; ++gen) {
    // Partial Fisher-Yates draw of the generation's mini-batch.
    for (std::size_t i = 0; i < batch_size; ++i) {
      std::swap(order[i], order[i + uniform_index(batch_rng, n - i)]);
    }
    std::vector<std::size_t> rows(order.begin(), order.begin() + batch_size);
    std::sort(rows.begin(), rows.end());
    Batch batch{data.X_train.select_rows(rows), {}};
    for (auto r : rows) batch.y.push_back(data.y_train[r]);

    for (std::size_t v = 0; v < views; ++v) {
      for (auto& ind : pops[v]) ind.ensemble_eval = uniform01(rngs[v]) < config.p_ensemble;
    }
    const TeamContext ctx(partners, batch, config.epsilon);
    const auto total = static_cast<std::ptrdiff_t>(views * config.pop_size);
#pragma omp parallel
    {
      std::vector<double> scratch;
#pragma omp for schedule(dynamic, 4)
      for (std::ptrdiff_t t = 0; t < total; ++t) {
        Individual& ind = pops[static_cast<std::size_t>(t) / config.pop_size]
                              [static_cast<std::size_t>(t) % config.pop_size];
        ind.fitness = ctx.fitness(ind, ind.ensemble_eval ? EvalMode::kEnsemble
                                                         : EvalMode::kIsolated,
                                  config.parsimony, scratch);
      }
    }

    // Best of each population, preferring team-evaluated members.
    std::vector<std::size_t> best(views);
    for (std::size_t v = 0; v < views; ++v) {
      auto team_best = elites(pops[v], true, 1);
      if (team_best.empty()) team_best = elites(pops[v], false, 1);
      best[v] = team_best.front();
      partners[v] = pops[v][best[v]].genes;
    }

    const std::size_t steps = std::min(config.tune_steps, tune_left);
    tune_left -= steps;
    if (steps > 0) {
      auto tuned = tune_constants(partners, batch, config.learning_rate, steps, config.epsilon);
      partners = std::move(tuned.team);
      for (std::size_t v = 0; v < views; ++v) pops[v][best[v]].genes = partners[v];
    }

    // The incumbent absorbs the tuned team whole, then single-view swaps
    // from each population's leaders, whenever full-train CE drops.
    const double before = champion.ce();
    champion.offer(partners);
    for (std::size_t v = 0; v < views; ++v) {
      champion.offer(v, partners[v]);
      std::vector<std::size_t> leaders(pops[v].size());
      std::iota(leaders.begin(), leaders.end(), std::size_t{0});
      std::stable_sort(leaders.begin(), leaders.end(), [&](std::size_t a, std::size_t b) {
        return pops[v][a].fitness < pops[v][b].fitness;
      });
      for (std::size_t m = 0; m < std::min(offered, leaders.size()); ++m) {
        champion.offer(v, pops[v][leaders[m]].genes);
      }
    }
    stall = before - champion.ce() > config.stall_tolerance ? 0 : stall + 1;
    record.ce_history.push_back(champion.ce());
    record.generations = gen + 1;
    if (stall >= config.stall_generations || gen + 1 == config.max_generations) break;

    for (std::size_t v = 0; v < views; ++v) {
      pops[v] = breed(pops[v], partition.views[v], config, rngs[v]);
    }
  }

  record.team = champion.team();
  record.train_ce = champion.ce();
  const Matrix z_val = team_logits(record.team, data.X_val, config.epsilon);
  record.val_macro_f1 = select::macro_f1(select::argmax_rows(z_val), data.y_val, k);
  compute_structure(record);
  return record;
}

}  // namespace symsurrogate::megp
