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
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

#include "symsurrogate/dataset.hpp"
#include "symsurrogate/rng.hpp"

namespace symsurrogate::data {

namespace {

constexpr char kMagic[4] = {'E', 'M', 'B', 'D'};
constexpr std::uint16_t kVersion = 1;
constexpr std::size_t kHeaderBytes = 4 + 2 + 8 + 4 + 4 + 4;

template <class T>
void put_le(std::string& out, T value) {
  using U = std::make_unsigned_t<T>;
  auto u = static_cast<U>(value);
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>(u & 0xffu));
    u = static_cast<U>(u >> 8);
  }
}

template <class T>
T get_le(const unsigned char* p) {
  using U = std::make_unsigned_t<T>;
  U u = 0;
  for (std::size_t i = sizeof(T); i-- > 0;) u = static_cast<U>((u << 8) | p[i]);
  return static_cast<T>(u);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("write failed for " + path.string());
}

Split parse_split(std::string_view s, std::size_t line) {
  if (s == "train" || s == "0") return Split::kTrain;
  if (s == "val" || s == "1") return Split::kVal;
  if (s == "test" || s == "2") return Split::kTest;
  throw DataError("line " + std::to_string(line) + ": bad split tag '" + std::string(s) + "'");
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <class T>
T parse_number(std::string_view s, std::size_t line) {
  s = trim(s);
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw DataError("line " + std::to_string(line) + ": bad number '" + std::string(s) + "'");
  }
  return value;
}

}  // namespace

const char* split_name(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    default: return "test";
  }
}

std::vector<std::size_t> EmbeddingDataset::indices(Split s) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < split.size(); ++i) {
    if (split[i] == s) out.push_back(i);
  }
  return out;
}

std::vector<std::uint32_t> EmbeddingDataset::labels(Split s) const {
  std::vector<std::uint32_t> out;
  for (std::size_t i = 0; i < split.size(); ++i) {
    if (split[i] == s) out.push_back(y[i]);
  }
  return out;
}

std::size_t EmbeddingDataset::count(Split s) const {
  return static_cast<std::size_t>(std::count(split.begin(), split.end(), s));
}

void EmbeddingDataset::validate(bool require_all_splits) const {
  if (y.size() != X.rows() || split.size() != X.rows()) {
    throw DataError("label/split count does not match row count");
  }
  if (meta.num_classes == 0) throw DataError("dataset declares zero classes");
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] >= meta.num_classes) {
      throw DataError("row " + std::to_string(i) + ": label " + std::to_string(y[i]) +
                      " >= K=" + std::to_string(meta.num_classes));
    }
    if (static_cast<unsigned>(split[i]) > 2) {
      throw DataError("row " + std::to_string(i) + ": invalid split tag");
    }
  }
  if (meta.tower_boundary > X.cols()) throw DataError("tower boundary beyond width");
  if (require_all_splits) {
    for (Split s : {Split::kTrain, Split::kVal, Split::kTest}) {
      if (count(s) == 0) throw DataError(std::string("empty ") + split_name(s) + " split");
    }
  }
}

// ---- EMBD ---------------------------------------------------------------

void save_embd(const EmbeddingDataset& ds, const std::filesystem::path& path) {
  ds.validate(false);
  std::string out;
  const std::size_t n = ds.size(), d = ds.dim();
  out.reserve(kHeaderBytes + n * d * 4 + n * 5);
  out.append(kMagic, 4);
  put_le<std::uint16_t>(out, kVersion);
  put_le<std::uint64_t>(out, n);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(d));
  put_le<std::uint32_t>(out, ds.meta.num_classes);
  put_le<std::uint32_t>(out, ds.meta.tower_boundary);
  for (double v : ds.X.data()) {
    put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  }
  for (std::uint32_t label : ds.y) put_le<std::uint32_t>(out, label);
  for (Split s : ds.split) out.push_back(static_cast<char>(s));
  write_file(path, out);
}

EmbeddingDataset load_embd(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  if (bytes.size() < kHeaderBytes || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw DataError(path.string() + ": not an EMBD file (bad magic)");
  }
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const auto version = get_le<std::uint16_t>(p + 4);
  if (version != kVersion) {
    throw DataError(path.string() + ": unsupported EMBD version " + std::to_string(version));
  }
  const auto n = get_le<std::uint64_t>(p + 6);
  const auto d = get_le<std::uint32_t>(p + 14);
  EmbeddingDataset ds;
  ds.meta.num_classes = get_le<std::uint32_t>(p + 18);
  ds.meta.tower_boundary = get_le<std::uint32_t>(p + 22);
  ds.meta.name = path.stem().string();

  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  if (d != 0 && n > kMax / d / 4) throw DataError(path.string() + ": n*d overflows");
  const std::uint64_t body = n * d * 4;
  if (n > (kMax - body) / 5) throw DataError(path.string() + ": n*d overflows");
  if (bytes.size() - kHeaderBytes != body + n * 5) {
    throw DataError(path.string() + ": size mismatch (truncated matrix, labels or split tags)");
  }

  std::vector<double> values(static_cast<std::size_t>(n) * d);
  const unsigned char* cur = p + kHeaderBytes;
  for (double& v : values) {
    v = static_cast<double>(std::bit_cast<float>(get_le<std::uint32_t>(cur)));
    cur += 4;
  }
  ds.X = Matrix(static_cast<std::size_t>(n), d, std::move(values));
  ds.y.resize(static_cast<std::size_t>(n));
  for (auto& label : ds.y) {
    label = get_le<std::uint32_t>(cur);
    cur += 4;
  }
  ds.split.resize(static_cast<std::size_t>(n));
  for (auto& s : ds.split) {
    if (*cur > 2) throw DataError(path.string() + ": invalid split tag " + std::to_string(*cur));
    s = static_cast<Split>(*cur++);
  }
  ds.validate(false);
  return ds;
}

// ---- CSV ----------------------------------------------------------------

void save_csv(const EmbeddingDataset& ds, const std::filesystem::path& path) {
  ds.validate(false);
  std::string out = "y,split";
  for (std::size_t j = 0; j < ds.dim(); ++j) out += ",x" + std::to_string(j);
  out += '\n';
  char buf[64];
  for (std::size_t i = 0; i < ds.size(); ++i) {
    out += std::to_string(ds.y[i]);
    out += ',';
    out += split_name(ds.split[i]);
    for (double v : ds.X.row(i)) {
      const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
      out += ',';
      out.append(buf, ptr);
    }
    out += '\n';
  }
  write_file(path, out);
}

EmbeddingDataset load_csv(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line)) throw DataError(path.string() + ": empty CSV");
  const auto header = split_commas(trim(line));
  if (header.size() < 3 || trim(header[0]) != "y" || trim(header[1]) != "split") {
    throw DataError(path.string() + ": CSV header must be y,split,x0..x{d-1}");
  }
  const std::size_t d = header.size() - 2;
  std::vector<double> values;
  EmbeddingDataset ds;
  std::size_t line_no = 1;
  std::uint32_t max_label = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_commas(trim(line));
    if (fields.size() != d + 2) {
      throw DataError(path.string() + ": line " + std::to_string(line_no) + " has " +
                      std::to_string(fields.size()) + " fields, expected " +
                      std::to_string(d + 2));
    }
    const auto label = parse_number<std::uint32_t>(fields[0], line_no);
    max_label = std::max(max_label, label);
    ds.y.push_back(label);
    ds.split.push_back(parse_split(trim(fields[1]), line_no));
    for (std::size_t j = 0; j < d; ++j) values.push_back(parse_number<double>(fields[j + 2], line_no));
  }
  ds.X = Matrix(ds.y.size(), d, std::move(values));
  ds.meta.name = path.stem().string();
  ds.meta.num_classes = ds.y.empty() ? 0 : max_label + 1;
  ds.validate(false);
  return ds;
}

EmbeddingDataset load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  char head[4] = {};
  in.read(head, 4);
  if (in.gcount() == 4 && std::memcmp(head, kMagic, 4) == 0) return load_embd(path);
  return load_csv(path);
}

// ---- preprocessing ------------------------------------------------------

ZScoreStats zscore_fit(const Matrix& X, std::span<const std::size_t> rows, double epsilon) {
  if (rows.size() < 2) throw DataError("z-score fit needs at least 2 training rows");
  if (!(epsilon > 0.0)) throw DataError("z-score epsilon must be positive");
  const std::size_t d = X.cols();
  ZScoreStats s;
  s.epsilon = epsilon;
  s.mu.assign(d, 0.0);
  s.sigma.assign(d, 0.0);
  // Welford per column.
  std::vector<double> m2(d, 0.0);
  std::size_t k = 0;
  for (std::size_t r : rows) {
    ++k;
    const auto row = X.row(r);
    for (std::size_t j = 0; j < d; ++j) {
      const double delta = row[j] - s.mu[j];
      s.mu[j] += delta / static_cast<double>(k);
      m2[j] += delta * (row[j] - s.mu[j]);
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    s.sigma[j] = std::sqrt(std::max(0.0, m2[j] / static_cast<double>(k)));
  }
  return s;
}

ZScoreStats zscore_fit(const EmbeddingDataset& ds, double epsilon) {
  const auto train = ds.indices(Split::kTrain);
  return zscore_fit(ds.X, train, epsilon);
}

Matrix zscore_apply(const ZScoreStats& stats, const Matrix& X) {
  if (X.cols() != stats.mu.size()) {
    throw DataError("z-score apply: matrix has " + std::to_string(X.cols()) +
                    " columns, stats have " + std::to_string(stats.mu.size()));
  }
  Matrix out(X.rows(), X.cols());
  for (std::size_t r = 0; r < X.rows(); ++r) {
    const auto src = X.row(r);
    auto dst = out.row(r);
    for (std::size_t j = 0; j < X.cols(); ++j) {
      dst[j] = (src[j] - stats.mu[j]) / (stats.sigma[j] + stats.epsilon);
    }
  }
  return out;
}

Matrix pool_2to1(const Matrix& X, std::size_t tower_boundary) {
  const std::size_t d = X.cols();
  const std::size_t first = tower_boundary == 0 ? d : tower_boundary;
  if (first > d) throw DataError("tower boundary beyond width");
  if (first % 2 != 0 || (d - first) % 2 != 0) {
    throw DataError("2:1 pooling needs even tower widths");
  }
  // Pairs never straddle the boundary because both towers have even width.
  Matrix out(X.rows(), d / 2);
  for (std::size_t r = 0; r < X.rows(); ++r) {
    const auto src = X.row(r);
    auto dst = out.row(r);
    for (std::size_t j = 0; j < d / 2; ++j) dst[j] = (src[2 * j] + src[2 * j + 1]) / 2.0;
  }
  return out;
}

EmbeddingDataset make_splits(const EmbeddingDataset& ds, double val_fraction,
                             std::uint64_t seed) {
  if (!(val_fraction > 0.0 && val_fraction < 1.0)) {
    throw DataError("validation fraction must lie in (0, 1)");
  }
  ds.validate(false);
  if (ds.count(Split::kVal) > 0) throw DataError("dataset already has validation rows");
  const std::size_t K = ds.meta.num_classes;
  std::vector<std::vector<std::size_t>> by_class(K);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (ds.split[i] == Split::kTrain) by_class[ds.y[i]].push_back(i);
  }
  std::size_t n_train = 0;
  for (const auto& rows : by_class) n_train += rows.size();
  // Guard against 0.1 * 30 = 3.0000000000000004 style round-up.
  const auto total = static_cast<std::size_t>(
      std::ceil(val_fraction * static_cast<double>(n_train) - 1e-9));

  std::vector<std::size_t> quota(K);
  std::vector<double> remainder(K);
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < K; ++c) {
    const double exact = val_fraction * static_cast<double>(by_class[c].size());
    quota[c] = static_cast<std::size_t>(std::floor(exact + 1e-9));
    remainder[c] = exact - static_cast<double>(quota[c]);
    assigned += quota[c];
  }
  std::vector<std::size_t> order(K);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t k = 0; assigned < total && k < K; ++k) {
    const std::size_t c = order[k];
    if (quota[c] < by_class[c].size()) {
      ++quota[c];
      ++assigned;
    }
  }

  EmbeddingDataset out = ds;
  Rng rng(seed);
  for (std::size_t c = 0; c < K; ++c) {
    auto rows = by_class[c];
    shuffle(rows, rng);
    for (std::size_t k = 0; k < quota[c]; ++k) out.split[rows[k]] = Split::kVal;
  }
  return out;
}

}  // namespace symsurrogate::data
