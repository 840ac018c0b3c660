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

#ifndef SYMSURROGATE_DATASET_HPP_
#define SYMSURROGATE_DATASET_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "symsurrogate/matrix.hpp"

namespace symsurrogate::data {

enum class Split : std::uint8_t { kTrain = 0, kVal = 1, kTest = 2 };

const char* split_name(Split s);

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DatasetMeta {
  std::string name;
  std::uint32_t num_classes = 0;
  // First coordinate of the second tower; 0 means a single tower.
  std::uint32_t tower_boundary = 0;

  friend bool operator==(const DatasetMeta&, const DatasetMeta&) = default;
};

struct EmbeddingDataset {
  Matrix X;
  std::vector<std::uint32_t> y;
  std::vector<Split> split;
  DatasetMeta meta;

  std::size_t size() const { return X.rows(); }
  std::size_t dim() const { return X.cols(); }

  std::vector<std::size_t> indices(Split s) const;
  Matrix rows(Split s) const { return X.select_rows(indices(s)); }
  std::vector<std::uint32_t> labels(Split s) const;
  std::size_t count(Split s) const;

  // Shape and label checks; with `require_all_splits` also demands
  // non-empty train/val/test.
  void validate(bool require_all_splits) const;

  friend bool operator==(const EmbeddingDataset&, const EmbeddingDataset&) = default;
};

// EMBD when the file starts with the magic, otherwise the CSV fallback.
EmbeddingDataset load(const std::filesystem::path& path);
EmbeddingDataset load_embd(const std::filesystem::path& path);
EmbeddingDataset load_csv(const std::filesystem::path& path);

// Values are stored as f32; datasets whose entries are f32-representable
// survive save/load bit-exactly.
void save_embd(const EmbeddingDataset& ds, const std::filesystem::path& path);
void save_csv(const EmbeddingDataset& ds, const std::filesystem::path& path);

struct ZScoreStats {
  std::vector<double> mu;
  std::vector<double> sigma;  // population standard deviation
  double epsilon = 1e-8;
};

// Statistics over the given rows only.
ZScoreStats zscore_fit(const Matrix& X, std::span<const std::size_t> rows,
                       double epsilon = 1e-8);
ZScoreStats zscore_fit(const EmbeddingDataset& ds, double epsilon = 1e-8);
Matrix zscore_apply(const ZScoreStats& stats, const Matrix& X);

// Non-overlapping 2:1 mean pooling within each tower. A boundary of 0 treats
// the whole row as one tower.
Matrix pool_2to1(const Matrix& X, std::size_t tower_boundary);

// Re-tags ceil(val_fraction * n_train) training rows as validation,
// stratified by class and deterministic in `seed`.
EmbeddingDataset make_splits(const EmbeddingDataset& ds, double val_fraction,
                             std::uint64_t seed);

}  // namespace symsurrogate::data

#endif  // SYMSURROGATE_DATASET_HPP_
