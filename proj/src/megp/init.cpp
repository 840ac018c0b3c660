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
#include <stdexcept>

#include "symsurrogate/hash.hpp"
#include "symsurrogate/megp.hpp"

namespace symsurrogate::megp {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("GpConfig: ") + what);
}

expr::Node random_terminal(std::span<const std::size_t> view_dims, const GpConfig& config,
                           Rng& rng) {
  if (uniform01(rng) < config.p_constant_terminal) {
    return {expr::Op::kConst, 0, uniform_real(rng, config.const_min, config.const_max)};
  }
  const auto dim = view_dims[uniform_index(rng, view_dims.size())];
  return {expr::Op::kDim, static_cast<std::uint32_t>(dim), 0.0};
}

void build(std::vector<expr::Node>& out, std::span<const std::size_t> view_dims,
           std::size_t depth, std::size_t target, InitMethod method, const GpConfig& config,
           Rng& rng) {
  bool function = depth < target;
  if (function && method == InitMethod::kGrow && depth > 0) function = uniform01(rng) < 0.5;
  if (!function) {
    out.push_back(random_terminal(view_dims, config, rng));
    return;
  }
  out.push_back({static_cast<expr::Op>(uniform_index(rng, 4)), 0, 0.0});
  build(out, view_dims, depth + 1, target, method, config, rng);
  build(out, view_dims, depth + 1, target, method, config, rng);
}

}  // namespace

void GpConfig::validate() const {
  require(pop_size >= 2, "pop_size must be at least 2");
  require(max_generations >= 1, "max_generations must be positive");
  require(max_depth >= 1, "max_depth must be positive");
  require(init_min_depth <= init_max_depth, "init depth range is empty");
  require(init_max_depth <= max_depth, "init_max_depth exceeds max_depth");
  for (double p : {p_crossover, p_mutation, p_reproduction, elite_isolated, elite_ensemble,
                   p_ensemble, p_constant_terminal}) {
    require(p >= 0.0 && p <= 1.0, "probabilities must lie in [0, 1]");
  }
  require(std::fabs(p_crossover + p_mutation + p_reproduction - 1.0) <= 1e-9,
          "p_c + p_m + p_r must equal 1");
  require(const_min <= const_max, "constant range is empty");
  require(batch_divisor >= 1, "batch_divisor must be positive");
  require(tournament_size >= 1, "tournament_size must be positive");
  require(learning_rate > 0.0, "learning_rate must be positive");
  require(parsimony >= 0.0, "parsimony must be non-negative");
  require(epsilon > 0.0, "epsilon must be positive");
}

nlohmann::json GpConfig::to_json() const {
  return {{"pop_size", pop_size},
          {"max_generations", max_generations},
          {"stall_generations", stall_generations},
          {"genes", genes},
          {"max_depth", max_depth},
          {"init_min_depth", init_min_depth},
          {"init_max_depth", init_max_depth},
          {"p_crossover", p_crossover},
          {"p_mutation", p_mutation},
          {"p_reproduction", p_reproduction},
          {"const_min", const_min},
          {"const_max", const_max},
          {"elite_isolated", elite_isolated},
          {"elite_ensemble", elite_ensemble},
          {"p_ensemble", p_ensemble},
          {"batch_divisor", batch_divisor},
          {"epochs", epochs},
          {"learning_rate", learning_rate},
          {"tune_steps", tune_steps},
          {"parsimony", parsimony},
          {"tournament_size", tournament_size},
          {"p_constant_terminal", p_constant_terminal},
          {"stall_tolerance", stall_tolerance},
          {"epsilon", epsilon}};
}

GpConfig GpConfig::from_json(const nlohmann::json& j) {
  GpConfig c;
  const nlohmann::json known = c.to_json();
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.contains(it.key())) {
      throw std::invalid_argument("GpConfig: unknown key '" + it.key() + "'");
    }
  }
  nlohmann::json merged = known;
  merged.update(j);
  c.pop_size = merged["pop_size"];
  c.max_generations = merged["max_generations"];
  c.stall_generations = merged["stall_generations"];
  c.genes = merged["genes"];
  c.max_depth = merged["max_depth"];
  c.init_min_depth = merged["init_min_depth"];
  c.init_max_depth = merged["init_max_depth"];
  c.p_crossover = merged["p_crossover"];
  c.p_mutation = merged["p_mutation"];
  c.p_reproduction = merged["p_reproduction"];
  c.const_min = merged["const_min"];
  c.const_max = merged["const_max"];
  c.elite_isolated = merged["elite_isolated"];
  c.elite_ensemble = merged["elite_ensemble"];
  c.p_ensemble = merged["p_ensemble"];
  c.batch_divisor = merged["batch_divisor"];
  c.epochs = merged["epochs"];
  c.learning_rate = merged["learning_rate"];
  c.tune_steps = merged["tune_steps"];
  c.parsimony = merged["parsimony"];
  c.tournament_size = merged["tournament_size"];
  c.p_constant_terminal = merged["p_constant_terminal"];
  c.stall_tolerance = merged["stall_tolerance"];
  c.epsilon = merged["epsilon"];
  c.validate();
  return c;
}

std::string GpConfig::digest() const { return to_hex(fnv1a64(to_json().dump())); }

std::size_t Individual::node_count() const {
  std::size_t n = 0;
  for (const auto& g : genes) n += g.size();
  return n;
}

Program random_tree(std::span<const std::size_t> view_dims, std::size_t depth,
                    InitMethod method, const GpConfig& config, Rng& rng) {
  if (view_dims.empty()) throw std::invalid_argument("random_tree: empty view");
  std::vector<expr::Node> nodes;
  build(nodes, view_dims, 0, depth, method, config, rng);
  return Program(std::move(nodes));
}

std::vector<Population> init_populations(const spfp::ViewPartition& partition,
                                         std::size_t num_classes, const GpConfig& config,
                                         std::uint64_t seed) {
  config.validate();
  if (num_classes < 2) throw std::invalid_argument("init_populations: K < 2");
  const std::size_t genes = config.genes == 0 ? num_classes : config.genes;
  if (genes != num_classes) {
    throw std::invalid_argument("init_populations: genes per individual must equal K");
  }
  const std::size_t ramp = config.init_max_depth - config.init_min_depth + 1;
  std::vector<Population> pops(partition.views.size());
  for (std::size_t v = 0; v < partition.views.size(); ++v) {
    const auto& dims = partition.views[v];
    if (dims.empty()) throw std::invalid_argument("init_populations: empty view");
    Rng rng(derive_seed(seed, 1000 + v));
    pops[v].resize(config.pop_size);
    for (std::size_t i = 0; i < config.pop_size; ++i) {
      Individual& ind = pops[v][i];
      ind.view = v;
      const std::size_t depth = config.init_min_depth + i % ramp;
      const InitMethod method = i % 2 == 0 ? InitMethod::kFull : InitMethod::kGrow;
      ind.genes.reserve(genes);
      for (std::size_t c = 0; c < genes; ++c) {
        ind.genes.push_back(random_tree(dims, depth, method, config, rng));
      }
    }
  }
  return pops;
}

}  // namespace symsurrogate::megp
