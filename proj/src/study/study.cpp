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

#include "symsurrogate/study.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <array>
#include <exception>
#include <functional>
#include <set>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include "symsurrogate/analysis.hpp"
#include "symsurrogate/calib.hpp"
#include "symsurrogate/hash.hpp"
#include "symsurrogate/metrics.hpp"
#include "symsurrogate/modelselect.hpp"

namespace symsurrogate::study {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

json read_artifact(const fs::path& path) {
  if (!fs::exists(path)) throw MissingArtifact("missing artifact " + path.string());
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ValidationError("corrupt artifact " + path.string() + ": " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << text;
  }
  fs::rename(tmp, path);
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

// Refuses artifacts produced under a different study configuration.
void check_digest(const json& artifact, const std::string& digest, const fs::path& path) {
  const auto found = artifact.value("study_digest", std::string());
  if (found != digest) {
    throw ValidationError(path.string() + " belongs to study " + found + ", not " + digest +
                          "; refusing to mix studies");
  }
}

fs::path selection_path(const StudyConfig& c) { return c.out / "selection.json"; }
fs::path calibration_path(const StudyConfig& c) { return c.out / "calibration.json"; }
fs::path metrics_path(const StudyConfig& c) { return c.out / "metrics.json"; }
fs::path analysis_dir(const StudyConfig& c) { return c.out / "analysis"; }

std::vector<megp::RunRecord> load_runs(const StudyConfig& config, const std::string& digest) {
  std::vector<megp::RunRecord> runs;
  for (auto seed : config.seeds) {
    const auto path = run_path(config, seed);
    const json j = read_artifact(path);
    check_digest(j, digest, path);
    runs.push_back(megp::RunRecord::from_json(j.at("record")));
  }
  if (runs.empty()) throw ValidationError("no seeds configured");
  return runs;
}

megp::RunRecord load_canonical(const StudyConfig& config, const std::string& digest) {
  const json sel = read_artifact(selection_path(config));
  check_digest(sel, digest, selection_path(config));
  return megp::RunRecord::from_json(sel.at("canonical"));
}

double load_temperature(const StudyConfig& config, const std::string& digest) {
  const json cal = read_artifact(calibration_path(config));
  check_digest(cal, digest, calibration_path(config));
  return cal.at("temperature").get<double>();
}

std::string csv(const std::function<void(std::ostream&)>& emit) {
  std::ostringstream out;
  emit(out);
  return out.str();
}

json analysis_json(const AnalysisSettings& a) {
  return {{"knots", a.knots}, {"bootstrap", a.bootstrap}, {"seed", a.seed},
          {"top_dims", a.top_dims}};
}

}  // namespace

StudyConfig::StudyConfig() {
  for (std::uint64_t s = 0; s < 30; ++s) seeds.push_back(s);
}

std::vector<std::uint64_t> parse_seed_range(const std::string& text) {
  auto number = [&](std::string_view s) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
      throw ValidationError("bad seed range '" + text + "'");
    }
    return v;
  };
  const auto dots = text.find("..");
  if (dots == std::string::npos) return {number(text)};
  const auto a = number(std::string_view(text).substr(0, dots));
  const auto b = number(std::string_view(text).substr(dots + 2));
  if (b < a) throw ValidationError("empty seed range '" + text + "'");
  std::vector<std::uint64_t> out;
  for (auto s = a; s <= b; ++s) out.push_back(s);
  return out;
}

StudyConfig StudyConfig::from_json(const json& j, const fs::path& base_dir) {
  static const std::vector<std::string> keys = {"dataset", "name", "val_fraction", "split_seed",
                                                "pool", "gp", "spfp", "seeds", "out", "analysis"};
  if (!j.is_object()) throw ValidationError("study config must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(keys.begin(), keys.end(), it.key()) == keys.end()) {
      throw ValidationError("unknown study config key '" + it.key() + "'");
    }
  }
  StudyConfig c;
  try {
    if (!j.contains("dataset")) throw ValidationError("study config needs 'dataset'");
    auto resolve = [&](const fs::path& p) { return p.is_absolute() ? p : base_dir / p; };
    c.dataset = resolve(j.at("dataset").get<std::string>());
    c.name = j.value("name", c.name);
    c.val_fraction = j.value("val_fraction", c.val_fraction);
    c.split_seed = j.value("split_seed", c.split_seed);
    c.pool = j.value("pool", c.pool);
    if (j.contains("gp")) c.gp = megp::GpConfig::from_json(j.at("gp"));
    if (j.contains("spfp")) c.spfp = spfp::SpfpConfig::from_json(j.at("spfp"));
    if (j.contains("seeds")) {
      const auto& s = j.at("seeds");
      c.seeds = s.is_string() ? parse_seed_range(s.get<std::string>())
                              : s.get<std::vector<std::uint64_t>>();
    }
    c.out = resolve(j.value("out", c.out.string()));
    if (j.contains("analysis")) {
      const auto& a = j.at("analysis");
      c.analysis.knots = a.value("knots", c.analysis.knots);
      c.analysis.bootstrap = a.value("bootstrap", c.analysis.bootstrap);
      c.analysis.seed = a.value("seed", c.analysis.seed);
      c.analysis.top_dims = a.value("top_dims", c.analysis.top_dims);
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("study config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  }
  if (!(c.val_fraction > 0.0 && c.val_fraction < 1.0)) {
    throw ValidationError("val_fraction must lie in (0, 1)");
  }
  if (c.analysis.knots < 3) throw ValidationError("analysis.knots must be at least 3");
  return c;
}

StudyConfig StudyConfig::load(const fs::path& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ValidationError("cannot parse " + path.string() + ": " + e.what());
  }
  return from_json(j, path.has_parent_path() ? path.parent_path() : fs::path("."));
}

json StudyConfig::to_json() const {
  return {{"dataset", dataset.string()}, {"name", name},          {"val_fraction", val_fraction},
          {"split_seed", split_seed},    {"pool", pool},          {"gp", gp.to_json()},
          {"spfp", spfp.to_json()},      {"seeds", seeds},        {"out", out.string()},
          {"analysis", analysis_json(analysis)}};
}

std::string StudyConfig::digest() const {
  const json shape = {{"dataset_fnv", to_hex(fnv1a64(read_file(dataset)))},
                      {"val_fraction", val_fraction},
                      {"split_seed", split_seed},
                      {"pool", pool},
                      {"gp", gp.to_json()},
                      {"spfp", spfp.to_json()}};
  return to_hex(fnv1a64(shape.dump()));
}

fs::path partition_path(const StudyConfig& config) { return config.out / "partition.json"; }

fs::path run_path(const StudyConfig& config, std::uint64_t seed) {
  return config.out / "runs" / ("seed_" + std::to_string(seed) + ".json");
}

Prepared prepare(const StudyConfig& config, bool allow_test) {
  Prepared p;
  try {
    p.dataset = data::load(config.dataset);
    if (p.dataset.count(data::Split::kVal) == 0) {
      p.dataset = data::make_splits(p.dataset, config.val_fraction, config.split_seed);
    }
    p.dataset.validate(true);
    if (config.pool) {
      p.dataset.X = data::pool_2to1(p.dataset.X, p.dataset.meta.tower_boundary);
      p.dataset.meta.tower_boundary /= 2;
    }
    p.dataset.X = data::zscore_apply(data::zscore_fit(p.dataset), p.dataset.X);
  } catch (const data::DataError& e) {
    throw ValidationError(e.what());
  }
  if (!allow_test) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (auto r : p.dataset.indices(data::Split::kTest)) {
      for (double& v : p.dataset.X.row(r)) v = nan;
    }
  }
  const auto& ds = p.dataset;
  p.train = {ds.rows(data::Split::kTrain), ds.labels(data::Split::kTrain),
             ds.rows(data::Split::kVal), ds.labels(data::Split::kVal), ds.meta.num_classes};
  if (allow_test) {
    p.X_test = ds.rows(data::Split::kTest);
    p.y_test = ds.labels(data::Split::kTest);
  }
  return p;
}

void cmd_partition(const StudyConfig& config, std::ostream& log) {
  const std::string digest = config.digest();
  const Prepared p = prepare(config, false);
  if (p.train.X_train.rows() == 0) throw ValidationError("dataset has no train split");
  const auto part = spfp::partition(p.train.X_train, p.train.y_train, config.spfp);
  json sizes = json::array();
  for (const auto& v : part.views) sizes.push_back(v.size());
  write_json(partition_path(config), {{"study_digest", digest},
                                      {"partition_digest", part.digest()},
                                      {"view_sizes", sizes},
                                      {"partition", part.to_json()}});
  log << "partition: " << part.views.size() << " views over d=" << part.d << " [";
  for (std::size_t v = 0; v < part.views.size(); ++v) log << (v ? " " : "") << part.views[v].size();
  log << "] digest " << part.digest() << "\n";
}

void cmd_train(const StudyConfig& config, std::size_t jobs, std::ostream& log) {
  const std::string digest = config.digest();
  const json pj = read_artifact(partition_path(config));
  check_digest(pj, digest, partition_path(config));
  const auto part = spfp::ViewPartition::from_json(pj.at("partition"));
  const Prepared p = prepare(config, false);

  std::vector<std::uint64_t> pending;
  for (auto seed : config.seeds) {
    const auto path = run_path(config, seed);
    if (!fs::exists(path)) {
      pending.push_back(seed);
      continue;
    }
    const json j = read_artifact(path);
    check_digest(j, digest, path);
    if (j.at("record").at("partition_digest") != part.digest()) {
      throw ValidationError(path.string() + " was trained on another partition");
    }
    log << "train: seed " << seed << " already complete\n";
  }

  std::vector<std::exception_ptr> errors(pending.size());
  std::vector<std::string> lines(pending.size());
  const auto count = static_cast<std::ptrdiff_t>(pending.size());
  const int threads = static_cast<int>(std::max<std::size_t>(1, jobs));
#pragma omp parallel for num_threads(threads) schedule(dynamic, 1)
  for (std::ptrdiff_t t = 0; t < count; ++t) {
    const auto i = static_cast<std::size_t>(t);
    try {
      const auto record = megp::run(p.train, part, config.gp, pending[i]);
      write_json(run_path(config, pending[i]), {{"study_digest", digest},
                                                {"record", record.to_json()}});
      std::ostringstream line;
      line << "train: seed " << pending[i] << " val_f1=" << record.val_macro_f1
           << " complexity=" << record.complexity << " generations=" << record.generations;
      lines[i] = line.str();
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (std::size_t i = 0; i < pending.size(); ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    log << lines[i] << "\n";
  }
}

void cmd_select(const StudyConfig& config, std::ostream& log) {
  const std::string digest = config.digest();
  const auto runs = load_runs(config, digest);
  const auto report = select::select_canonical(runs);
  write_json(selection_path(config), {{"study_digest", digest},
                                      {"report", report.to_json(runs)},
                                      {"canonical", runs[report.chosen].to_json()}});
  log << "select: m*=" << report.best_score << " se=" << report.se << " chosen seed "
      << report.chosen_seed << " (complexity " << runs[report.chosen].complexity << ")\n";
}

void cmd_calibrate(const StudyConfig& config, std::ostream& log) {
  const std::string digest = config.digest();
  const auto canonical = load_canonical(config, digest);
  const Prepared p = prepare(config, false);
  const Matrix z_val = megp::team_logits(canonical.team, p.train.X_val, config.gp.epsilon);
  const double t = calib::fit_temperature(z_val, p.train.y_val);
  const double before = calib::nll_at(z_val, p.train.y_val, 1.0);
  const double after = calib::nll_at(z_val, p.train.y_val, t);
  write_json(calibration_path(config), {{"study_digest", digest},
                                        {"seed", canonical.seed},
                                        {"temperature", t},
                                        {"val_nll_before", before},
                                        {"val_nll_after", after}});
  log << "calibrate: T=" << t << " val NLL " << before << " -> " << after << "\n";
}

void cmd_evaluate(const StudyConfig& config, std::ostream& log) {
  const std::string digest = config.digest();
  const auto runs = load_runs(config, digest);
  const auto canonical = load_canonical(config, digest);
  const double temperature = load_temperature(config, digest);
  const Prepared p = prepare(config, true);
  const std::size_t k = p.train.num_classes;
  const double eps = config.gp.epsilon;

  std::vector<double> f1, auc, ece, brier, logloss, complexity;
  json per_run = json::array();
  for (const auto& r : runs) {
    const Matrix z_val = megp::team_logits(r.team, p.train.X_val, eps);
    const double t = calib::fit_temperature(z_val, p.train.y_val);
    const Matrix probs = calib::clip_renormalize(
        calib::apply_temperature(megp::team_logits(r.team, p.X_test, eps), t));
    const auto s = calib::score(probs, p.y_test, k);
    const auto a = metrics::auc_macro_ovr(probs, p.y_test, k);
    f1.push_back(s.macro_f1);
    auc.push_back(a.value);
    ece.push_back(s.ece);
    brier.push_back(s.brier);
    logloss.push_back(s.log_loss);
    complexity.push_back(static_cast<double>(r.complexity));
    per_run.push_back({{"seed", r.seed}, {"temperature", t}, {"f1", s.macro_f1},
                       {"auc", a.value}, {"auc_skipped_classes", a.skipped}, {"ece", s.ece},
                       {"brier", s.brier}, {"log_loss", s.log_loss},
                       {"complexity", r.complexity}});
  }
  const std::vector<metrics::RunSummary> columns = {
      metrics::summarize("F1", f1),         metrics::summarize("AUC", auc),
      metrics::summarize("ECE", ece),       metrics::summarize("Brier", brier),
      metrics::summarize("LogLoss", logloss), metrics::summarize("Complexity", complexity)};
  write_text(config.out / "metrics.csv", csv([&](std::ostream& out) {
               metrics::write_metrics_csv(out, config.name, columns);
             }));
  json summary = json::object();
  for (const auto& c : columns) {
    summary[c.name] = {{"mean", c.interval.mean}, {"halfwidth", c.interval.halfwidth}};
  }

  // Canonical model, before and after the validation-fitted temperature.
  const Matrix z_val = megp::team_logits(canonical.team, p.train.X_val, eps);
  const Matrix z_test = megp::team_logits(canonical.team, p.X_test, eps);
  calib::CalibrationReport cr;
  cr.temperature = temperature;
  cr.val_nll_before = calib::nll_at(z_val, p.train.y_val, 1.0);
  cr.val_nll_after = calib::nll_at(z_val, p.train.y_val, temperature);
  const Matrix pre = calib::clip_renormalize(calib::apply_temperature(z_test, 1.0));
  const Matrix post = calib::clip_renormalize(calib::apply_temperature(z_test, temperature));
  cr.before = calib::score(pre, p.y_test, k);
  cr.after = calib::score(post, p.y_test, k);
  cr.bins_before = calib::reliability(pre, p.y_test);
  cr.bins_after = calib::reliability(post, p.y_test);
  if (cr.before.macro_f1 != cr.after.macro_f1) {
    throw std::logic_error("temperature scaling changed the predicted classes");
  }
  const auto auc_canon = metrics::auc_macro_ovr(post, p.y_test, k);
  write_json(config.out / "calibration_report.json",
             {{"study_digest", digest}, {"seed", canonical.seed}, {"auc", auc_canon.value},
              {"report", cr.to_json()}});
  write_text(config.out / "reliability_pre.csv", csv([&](std::ostream& out) {
               calib::write_reliability_csv(out, cr.bins_before);
             }));
  write_text(config.out / "reliability_post.csv", csv([&](std::ostream& out) {
               calib::write_reliability_csv(out, cr.bins_after);
             }));
  write_json(metrics_path(config), {{"study_digest", digest},
                                    {"auc_averaging", "macro one-vs-rest"},
                                    {"runs", per_run},
                                    {"summary", summary},
                                    {"canonical",
                                     {{"seed", canonical.seed},
                                      {"f1", cr.after.macro_f1},
                                      {"auc", auc_canon.value},
                                      {"before", {{"ece", cr.before.ece},
                                                  {"brier", cr.before.brier},
                                                  {"log_loss", cr.before.log_loss}}},
                                      {"after", {{"ece", cr.after.ece},
                                                 {"brier", cr.after.brier},
                                                 {"log_loss", cr.after.log_loss}}}}}});
  log << "evaluate: F1 " << columns[0].interval.mean << " +/- " << columns[0].interval.halfwidth
      << " over " << runs.size() << " runs; canonical F1 " << cr.after.macro_f1 << ", ECE "
      << cr.before.ece << " -> " << cr.after.ece << "\n";
}

void cmd_analyze(const StudyConfig& config, std::ostream& log) {
  const std::string digest = config.digest();
  const auto canonical = load_canonical(config, digest);
  const double temperature = load_temperature(config, digest);
  const Prepared p = prepare(config, true);
  const analysis::Model model{canonical.logit_programs(), temperature};

  const auto imp = analysis::importance(model, p.X_test);
  std::vector<analysis::DimImportance> ranked = imp;
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.importance > b.importance; });
  std::vector<analysis::EffectCurve> curves;
  json effects = json::array();
  std::ostringstream effects_csv;
  effects_csv << "dim,class,pdp_range,pdp_monotonicity,ale_integral,ale_monotonicity\n";
  effects_csv.precision(17);
  for (std::size_t r = 0; r < std::min(config.analysis.top_dims, ranked.size()); ++r) {
    if (ranked[r].importance <= 0.0) break;
    const std::size_t dim = ranked[r].dim;
    for (std::size_t c = 0; c < model.num_classes(); ++c) {
      analysis::EffectOptions opt{config.analysis.knots, config.analysis.bootstrap,
                                  derive_seed(config.analysis.seed, dim * 1000 + c)};
      auto pd = analysis::pdp(model, p.X_test, dim, c, opt);
      auto al = analysis::ale(model, p.X_test, dim, c, opt);
      const bool enough = pd.grid.size() >= 3;
      const double pm = enough ? analysis::monotonicity(pd) : 0.0;
      const double am = enough ? analysis::monotonicity(al) : 0.0;
      effects_csv << dim << ',' << c << ',' << pd.range() << ',' << pm << ','
                  << al.abs_integral() << ',' << am << '\n';
      effects.push_back({{"dim", dim}, {"class", c}, {"pdp_range", pd.range()},
                         {"pdp_monotonicity", pm}, {"ale_integral", al.abs_integral()},
                         {"ale_monotonicity", am}});
      curves.push_back(std::move(pd));
      curves.push_back(std::move(al));
    }
  }
  const auto usage = analysis::usage_histogram(model.logits);
  const auto overlap = analysis::overlap_sets(model.logits);
  const fs::path dir = analysis_dir(config);
  write_text(dir / "importance.csv",
             csv([&](std::ostream& out) { analysis::write_importance_csv(out, imp); }));
  write_text(dir / "curves.csv",
             csv([&](std::ostream& out) { analysis::write_curves_csv(out, curves); }));
  write_text(dir / "usage.csv",
             csv([&](std::ostream& out) { analysis::write_usage_csv(out, usage); }));
  write_text(dir / "overlap.csv",
             csv([&](std::ostream& out) { analysis::write_overlap_csv(out, overlap); }));
  write_text(dir / "effects.csv", effects_csv.str());
  json top = json::array();
  for (std::size_t r = 0; r < std::min<std::size_t>(10, ranked.size()); ++r) {
    if (ranked[r].importance <= 0.0) break;
    top.push_back({{"dim", ranked[r].dim}, {"importance", ranked[r].importance},
                   {"pct_logits", ranked[r].pct_logits}, {"max_power", ranked[r].max_power}});
  }
  write_json(dir / "analysis.json", {{"study_digest", digest},
                                     {"seed", canonical.seed},
                                     {"temperature", temperature},
                                     {"top_importance", top},
                                     {"effects", effects},
                                     {"overlap_patterns", overlap.size()}});
  log << "analyze: " << curves.size() << " effect curves, " << usage.size()
      << " dims in use, " << overlap.size() << " overlap patterns\n";
}

void cmd_report(const StudyConfig& config, std::ostream& log) {
  const std::string digest = config.digest();
  const json sel = read_artifact(selection_path(config));
  const json cal = read_artifact(calibration_path(config));
  const json met = read_artifact(metrics_path(config));
  const json ana = read_artifact(analysis_dir(config) / "analysis.json");
  for (const auto* j : {&sel, &cal, &met, &ana}) check_digest(*j, digest, config.out);
  const auto canonical = megp::RunRecord::from_json(sel.at("canonical"));
  const auto logits = canonical.logit_programs();

  // Structure of the canonical logits: unique dims, dims per logit,
  // operator totals and depth.
  std::set<std::uint32_t> all_dims;
  std::vector<double> dims_per_logit;
  std::array<std::size_t, 4> ops{};
  std::ostringstream structure;
  structure << "class,nodes,depth,dims,plus,minus,times,divide\n";
  std::string listing;
  for (std::size_t c = 0; c < logits.size(); ++c) {
    const auto s = expr::stats(logits[c]);
    all_dims.insert(s.used_dims.begin(), s.used_dims.end());
    dims_per_logit.push_back(static_cast<double>(s.used_dims.size()));
    for (std::size_t o = 0; o < 4; ++o) ops[o] += s.op_counts[o];
    structure << c << ',' << s.node_count << ',' << s.depth << ',' << s.used_dims.size() << ','
              << s.op_counts[0] << ',' << s.op_counts[1] << ',' << s.op_counts[2] << ','
              << s.op_counts[3] << '\n';
    listing += "logit " + std::to_string(c) + ": " + expr::serialize(logits[c]) + "\n";
    listing += "simplified " + std::to_string(c) + ": " +
               expr::serialize(expr::simplify(logits[c])) + "\n";
  }
  std::sort(dims_per_logit.begin(), dims_per_logit.end());
  const std::size_t m = dims_per_logit.size();
  const double median = m == 0 ? 0.0
                                : (m % 2 ? dims_per_logit[m / 2]
                                         : 0.5 * (dims_per_logit[m / 2 - 1] +
                                                  dims_per_logit[m / 2]));
  write_text(config.out / "structure.csv", structure.str());
  write_text(config.out / "logits.txt", listing);
  write_json(config.out / "report.json",
             {{"study_digest", digest},
              {"name", config.name},
              {"config", config.to_json()},
              {"selection", sel.at("report")},
              {"calibration", {{"temperature", cal.at("temperature")},
                               {"val_nll_before", cal.at("val_nll_before")},
                               {"val_nll_after", cal.at("val_nll_after")}}},
              {"metrics", met.at("summary")},
              {"canonical_test", met.at("canonical")},
              {"structure", {{"unique_dims", all_dims.size()},
                             {"median_dims_per_logit", median},
                             {"plus", ops[0]}, {"minus", ops[1]},
                             {"times", ops[2]}, {"divide", ops[3]},
                             {"complexity", canonical.complexity},
                             {"depth", canonical.depth}}},
              {"analysis", {{"top_importance", ana.at("top_importance")},
                            {"effects", ana.at("effects")}}}});
  log << "report: " << (config.out / "report.json").string() << "\n";
}

}  // namespace symsurrogate::study
