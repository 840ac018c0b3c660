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


#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "symsurrogate/study.hpp"
#include "symsurrogate/synth.hpp"

namespace symsurrogate::study {
namespace {

namespace fs = std::filesystem;

class StudyTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / "symsur_study_tests" / info->name();
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    synth::BlobSpec spec;
    spec.n = 300;
    spec.d = 12;
    spec.informative = 6;
    spec.seed = 3;
    data::save_embd(synth::make_blobs(spec), dir_ / "blobs.embd");
    write_config(base_config());
  }

  nlohmann::json base_config() const {
    return {{"dataset", "blobs.embd"},
            {"name", "blobs"},
            {"gp", {{"pop_size", 10}, {"max_generations", 6}, {"stall_generations", 6}}},
            {"spfp", {{"budget", 4}}},
            {"seeds", "0..2"},
            {"out", "out"},
            {"analysis", {{"bootstrap", 10}, {"top_dims", 2}}}};
  }

  void write_config(const nlohmann::json& j) const {
    std::ofstream(dir_ / "study.json") << j.dump(2);
  }

  StudyConfig load() const { return StudyConfig::load(dir_ / "study.json"); }

  int cli(const std::string& args) const {
    const std::string cmd = std::string(SYMSUR_CLI) + " " + args + " > " +
                            (dir_ / "cli.log").string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string config_arg() const { return "--config " + (dir_ / "study.json").string(); }

  fs::path dir_;
};

TEST(SeedRange, Parses) {
  EXPECT_EQ(parse_seed_range("3..5"), (std::vector<std::uint64_t>{3, 4, 5}));
  EXPECT_EQ(parse_seed_range("7"), (std::vector<std::uint64_t>{7}));
  EXPECT_THROW(parse_seed_range("5..3"), ValidationError);
  EXPECT_THROW(parse_seed_range("a..b"), ValidationError);
}

TEST_F(StudyTest, ConfigResolvesPathsAndRejectsUnknownKeys) {
  const auto c = load();
  EXPECT_EQ(c.dataset, dir_ / "blobs.embd");
  EXPECT_EQ(c.out, dir_ / "out");
  EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{0, 1, 2}));
  EXPECT_EQ(c.gp.pop_size, 10u);
  auto j = base_config();
  j["colour"] = 1;
  EXPECT_THROW(StudyConfig::from_json(j, dir_), ValidationError);
  j = base_config();
  j["gp"]["p_crossover"] = 0.9;
  EXPECT_THROW(StudyConfig::from_json(j, dir_), ValidationError);
}

TEST_F(StudyTest, DigestIgnoresSeedsAndOutput) {
  auto a = load();
  auto b = a;
  b.seeds = {9, 10};
  b.out = dir_ / "elsewhere";
  EXPECT_EQ(a.digest(), b.digest());
  b.gp.pop_size = 11;
  EXPECT_NE(a.digest(), b.digest());
}

TEST_F(StudyTest, SealedStagesSeeNoTestData) {
  const auto c = load();
  const auto sealed = prepare(c, false);
  EXPECT_TRUE(sealed.y_test.empty());
  EXPECT_EQ(sealed.X_test.rows(), 0u);
  for (auto r : sealed.dataset.indices(data::Split::kTest)) {
    for (double v : sealed.dataset.X.row(r)) EXPECT_TRUE(std::isnan(v));
  }
  for (double v : sealed.train.X_train.data()) EXPECT_FALSE(std::isnan(v));
  const auto open = prepare(c, true);
  EXPECT_EQ(open.X_test.rows(), open.y_test.size());
  EXPECT_GT(open.y_test.size(), 0u);
  // Sealing must not move the train statistics.
  EXPECT_EQ(open.train.X_train.data(), sealed.train.X_train.data());
}

TEST_F(StudyTest, PartitionIgnoresTestRows) {
  auto c = load();
  std::ostringstream log;
  cmd_partition(c, log);
  const auto first = nlohmann::json::parse(std::ifstream(partition_path(c)));
  // Corrupt every test row on disk; the partition must not change.
  auto ds = data::load(c.dataset);
  for (auto r : ds.indices(data::Split::kTest)) {
    for (double& v : ds.X.row(r)) v = 1e6;
  }
  data::save_embd(ds, dir_ / "poisoned.embd");
  c.dataset = dir_ / "poisoned.embd";
  c.out = dir_ / "out2";
  cmd_partition(c, log);
  const auto second = nlohmann::json::parse(std::ifstream(partition_path(c)));
  EXPECT_EQ(first.at("partition").at("views"), second.at("partition").at("views"));
}

TEST_F(StudyTest, EndToEndThroughLibrary) {
  const auto c = load();
  std::ostringstream log;
  cmd_partition(c, log);
  cmd_train(c, 1, log);
  for (auto s : c.seeds) EXPECT_TRUE(fs::exists(run_path(c, s)));
  cmd_select(c, log);
  cmd_calibrate(c, log);
  cmd_evaluate(c, log);
  cmd_analyze(c, log);
  cmd_report(c, log);
  for (const char* f : {"partition.json", "selection.json", "calibration.json", "metrics.csv",
                        "metrics.json", "calibration_report.json", "reliability_pre.csv",
                        "reliability_post.csv", "analysis/importance.csv", "analysis/curves.csv",
                        "analysis/usage.csv", "analysis/overlap.csv", "analysis/effects.csv",
                        "analysis/analysis.json", "structure.csv", "logits.txt", "report.json"}) {
    EXPECT_TRUE(fs::exists(c.out / f)) << f;
  }
  const auto cal = nlohmann::json::parse(std::ifstream(c.out / "calibration.json"));
  EXPECT_GT(cal.at("temperature").get<double>(), 0.0);
}

TEST_F(StudyTest, TrainResumesAndRefusesForeignArtifacts) {
  auto c = load();
  std::ostringstream log;
  cmd_partition(c, log);
  c.seeds = {0};
  cmd_train(c, 1, log);
  const auto stamp = fs::last_write_time(run_path(c, 0));
  c.seeds = {0, 1};
  std::ostringstream second;
  cmd_train(c, 1, second);
  EXPECT_NE(second.str().find("seed 0 already complete"), std::string::npos);
  EXPECT_EQ(fs::last_write_time(run_path(c, 0)), stamp);
  EXPECT_TRUE(fs::exists(run_path(c, 1)));

  auto changed = c;
  changed.gp.parsimony = 5e-4;
  EXPECT_THROW(cmd_train(changed, 1, log), ValidationError);
}

TEST_F(StudyTest, MissingUpstreamArtifact) {
  const auto c = load();
  std::ostringstream log;
  EXPECT_THROW(cmd_train(c, 1, log), MissingArtifact);
  EXPECT_THROW(cmd_select(c, log), MissingArtifact);
  EXPECT_THROW(cmd_evaluate(c, log), MissingArtifact);
}

TEST_F(StudyTest, CliExitCodes) {
  EXPECT_EQ(cli("partition " + config_arg()), 0);
  EXPECT_EQ(cli("select " + config_arg()), 3);
  EXPECT_EQ(cli("train " + config_arg() + " --seeds 0..0"), 0);
  EXPECT_EQ(cli("select " + config_arg() + " --seeds 0..0"), 0);
  EXPECT_EQ(cli("train"), 2);
  EXPECT_EQ(cli("partition --config " + (dir_ / "nope.json").string()), 2);
  auto bad = base_config();
  bad["gp"]["pop_size"] = 1;
  write_config(bad);
  EXPECT_EQ(cli("partition " + config_arg()), 2);
  EXPECT_EQ(cli("synth --out " + (dir_ / "s.csv").string() + " --n 60 --d 8 --format csv"), 0);
  EXPECT_TRUE(fs::exists(dir_ / "s.csv"));
}

}  // namespace
}  // namespace symsurrogate::study
