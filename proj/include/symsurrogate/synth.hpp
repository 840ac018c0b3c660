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

#ifndef SYMSURROGATE_SYNTH_HPP_
#define SYMSURROGATE_SYNTH_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "symsurrogate/dataset.hpp"

namespace symsurrogate::synth {

// Gaussian class blobs: class c is shifted by `separation` on its own block
// of informative coordinates; all other coordinates are N(0, 1) noise.
struct BlobSpec {
  std::size_t n = 1200;
  std::size_t d = 64;
  std::uint32_t num_classes = 3;
  std::size_t informative = 8;
  double separation = 3.0;
  double test_fraction = 0.25;
  std::uint64_t seed = 0;
};

struct BlobLayout {
  // blocks[c] = informative coordinates raised for class c.
  std::vector<std::vector<std::size_t>> blocks;
};

BlobLayout blob_layout(const BlobSpec& spec);

// Rows carry train/test tags only; labels are balanced (row i has class
// i mod K before shuffling).
data::EmbeddingDataset make_blobs(const BlobSpec& spec);

// Exact log-posterior logits (up to a per-row constant) of the generator on
// unstandardized rows; softmax of these is the true conditional.
Matrix bayes_logits(const BlobSpec& spec, const Matrix& X);

}  // namespace symsurrogate::synth

#endif  // SYMSURROGATE_SYNTH_HPP_
