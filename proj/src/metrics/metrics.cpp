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

#include "symsurrogate/metrics.hpp"

#include <algorithm>
#include <array>
#include <memory>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace symsurrogate::metrics {

namespace {

constexpr std::array<double, 120> kT975 = {
    12.706204736174705, 4.302652729749464, 3.1824463052837095, 2.7764451051977943,
    2.5705818356363155, 2.44691185114497, 2.3646242515927853, 2.3060041352041667,
    2.2621571627982053, 2.228138851986275, 2.2009851600916397, 2.178812829667229,
    2.1603686564627926, 2.144786687917804, 2.1314495455597755, 2.1199052992212546,
    2.109815577833317, 2.1009220402410387, 2.0930240544083096, 2.085963447265865,
    2.0796138447276804, 2.0738730679040263, 2.0686576104190486, 2.063898561628026,
    2.0595385527532977, 2.055529438642873, 2.0518305164802855, 2.048407141795245,
    2.0452296421327043, 2.042272456301238, 2.0395134463964086, 2.036933343460102,
    2.034515297449339, 2.032244509317719, 2.0301079282503434, 2.028094000980451,
    2.0261924630291097, 2.02439416391197, 2.0226909200367613, 2.0210753903062733,
    2.0195409704413763, 2.018081702818445, 2.0166921992278244, 2.015367574443764,
    2.0141033888808466, 2.012895598919429, 2.011740513729766, 2.0106347576242323,
    2.0095752371292397, 2.008559112100761, 2.007583770315836, 2.0066468050616884,
    2.005745995317869, 2.004879288188057, 2.004044783289146, 2.0032407188478722,
    2.0024654592910074, 2.001717484145236, 2.000995378088268, 2.0002978220142604,
    1.9996235849949398, 1.998971517033379, 1.9983405425207417, 1.997729654317693,
    1.997137908392004, 1.996564418952312, 1.9960083540252966, 1.995468931429844,
    1.994945415107238, 1.9944371117711865, 1.9939433678456258, 1.9934635666618723,
    1.9929971258898551, 1.9925434951809327, 1.992102154002242, 1.9916726096446644,
    1.991254395388385, 1.9908470688116908, 1.990450210230129, 1.9900634212544461,
    1.9896863234569029, 1.9893185571365726, 1.9889597801751628, 1.9886096669757092,
    1.988267907477222, 1.9879342062390206, 1.9876082815890712, 1.9872898648311697,
    1.9869786995062815, 1.9866745407037683, 1.9863771544186182, 1.9860863169511305,
    1.9858018143458234, 1.9855234418666043, 1.9852510035054982, 1.9849843115224575,
    1.9847231860139847, 1.9844674545084817, 1.9842169515864174, 1.9839715185235522,
    1.9837310029556061, 1.9834952585628798, 1.983264144773457, 1.9830375264837259,
    1.9828152737950482, 1.9825972617655006, 1.9823833701756912, 1.9821734833077271,
    1.9819674897364827, 1.9817652821323724, 1.981566757074901, 1.981371814876306,
    1.981180359414661, 1.9809922979758574, 1.98080754110391, 1.98062600245909,
    1.9804475986834027, 1.9802722492729745, 1.98009987645694, 1.979930405082441,
};

constexpr double kNormal975 = 1.9599639845400543;

}  // namespace

double auc_binary(std::span<const double> scores, std::span<const bool> positive) {
  if (scores.size() != positive.size()) throw std::invalid_argument("auc: length mismatch");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double rank_sum = 0.0;
  std::size_t pos = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t t = i; t < j; ++t) {
      if (positive[order[t]]) {
        rank_sum += midrank;
        ++pos;
      }
    }
    i = j;
  }
  const std::size_t neg = n - pos;
  if (pos == 0 || neg == 0) throw std::invalid_argument("auc: need both classes");
  const auto p = static_cast<double>(pos);
  return (rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(neg));
}

AucResult auc_macro_ovr(const Matrix& probs, std::span<const std::uint32_t> y,
                        std::size_t num_classes) {
  if (num_classes < 2 || probs.cols() != num_classes || probs.rows() != y.size()) {
    throw std::invalid_argument("auc_macro_ovr: shape mismatch");
  }
  AucResult result;
  double total = 0.0;
  std::size_t used = 0;
  // std::vector<bool> cannot back a span, so the mask lives in a plain array.
  std::unique_ptr<bool[]> flags(new bool[y.size()]);
  for (std::size_t c = 0; c < num_classes; ++c) {
    std::size_t pos = 0;
    for (std::size_t i = 0; i < y.size(); ++i) pos += (flags[i] = y[i] == c) ? 1 : 0;
    if (pos == 0 || pos == y.size()) {
      result.skipped.push_back(c);
      continue;
    }
    const auto scores = probs.column(c);
    total += auc_binary(scores, std::span<const bool>(flags.get(), y.size()));
    ++used;
  }
  if (used == 0) throw std::invalid_argument("auc_macro_ovr: no scorable class");
  result.value = total / static_cast<double>(used);
  return result;
}

double t_quantile_975(std::size_t df) {
  if (df == 0) throw std::invalid_argument("t_quantile_975: df must be positive");
  return df <= kT975.size() ? kT975[df - 1] : kNormal975;
}

Interval t_interval(std::span<const double> values) {
  const std::size_t r = values.size();
  if (r < 2) throw std::invalid_argument("t_interval: need at least two values");
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(r);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double s = std::sqrt(ss / static_cast<double>(r - 1));
  return {mean, t_quantile_975(r - 1) * s / std::sqrt(static_cast<double>(r))};
}

RunSummary summarize(std::string name, std::vector<double> values) {
  RunSummary s{std::move(name), std::move(values), {}};
  if (s.values.size() >= 2) {
    s.interval = t_interval(s.values);
  } else if (s.values.size() == 1) {
    s.interval = {s.values.front(), 0.0};
  }
  return s;
}

void write_metrics_csv(std::ostream& out, const std::string& dataset,
                       std::span<const RunSummary> columns) {
  out << "dataset";
  for (const auto& c : columns) out << ',' << c.name << "_mean," << c.name << "_ci";
  out << '\n' << dataset;
  out.precision(17);
  for (const auto& c : columns) out << ',' << c.interval.mean << ',' << c.interval.halfwidth;
  out << '\n';
}

}  // namespace symsurrogate::metrics
