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
#include <numeric>
#include <stdexcept>

#include "symsurrogate/rng.hpp"
#include "symsurrogate/synth.hpp"

namespace symsurrogate::synth {

BlobLayout blob_layout(const BlobSpec& spec) {
  if (spec.num_classes < 2 || spec.informative < spec.num_classes ||
      spec.informative > spec.d) {
    throw std::invalid_argument("blob spec: need 2 <= K <= informative <= d");
  }
  // Informative coordinates are scattered over the embedding.
  std::vector<std::size_t> coords(spec.d);
  std::iota(coords.begin(), coords.end(), 0);
  Rng rng(derive_seed(spec.seed, 0x1a7));
  shuffle(coords, rng);
  BlobLayout layout;
  layout.blocks.resize(spec.num_classes);
  for (std::size_t k = 0; k < spec.informative; ++k) {
    layout.blocks[k % spec.num_classes].push_back(coords[k]);
  }
  return layout;
}

data::EmbeddingDataset make_blobs(const BlobSpec& spec) {
  const BlobLayout layout = blob_layout(spec);
  Rng rng(derive_seed(spec.seed, 0xb10b));
  data::EmbeddingDataset ds;
  ds.meta.name = "blobs";
  ds.meta.num_classes = spec.num_classes;
  ds.X = Matrix(spec.n, spec.d);
  ds.y.resize(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) ds.y[i] = static_cast<std::uint32_t>(i % spec.num_classes);
  shuffle(ds.y, rng);
  for (std::size_t i = 0; i < spec.n; ++i) {
    auto row = ds.X.row(i);
    for (double& v : row) v = standard_normal(rng);
    for (std::size_t j : layout.blocks[ds.y[i]]) row[j] += spec.separation;
    // Round to f32 so EMBD save/load is lossless.
    for (double& v : row) v = static_cast<double>(static_cast<float>(v));
  }
  std::vector<std::size_t> order(spec.n);
  std::iota(order.begin(), order.end(), 0);
  shuffle(order, rng);
  const auto n_test = static_cast<std::size_t>(std::llround(spec.test_fraction * static_cast<double>(spec.n)));
  ds.split.assign(spec.n, data::Split::kTrain);
  for (std::size_t k = 0; k < n_test; ++k) ds.split[order[k]] = data::Split::kTest;
  return ds;
}

Matrix bayes_logits(const BlobSpec& spec, const Matrix& X) {
  const BlobLayout layout = blob_layout(spec);
  const double s = spec.separation;
  Matrix z(X.rows(), spec.num_classes);
  for (std::size_t i = 0; i < X.rows(); ++i) {
    for (std::size_t c = 0; c < spec.num_classes; ++c) {
      double acc = 0.0;
      for (std::size_t j : layout.blocks[c]) acc += X(i, j);
      z(i, c) = s * acc - 0.5 * s * s * static_cast<double>(layout.blocks[c].size());
    }
  }
  return z;
}

}  // namespace symsurrogate::synth
