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

// symsur: command-line driver for surrogate studies.

#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "symsurrogate/dataset.hpp"
#include "symsurrogate/study.hpp"
#include "symsurrogate/synth.hpp"

namespace {

using symsurrogate::study::MissingArtifact;
using symsurrogate::study::StudyConfig;
using symsurrogate::study::ValidationError;

constexpr int kExitValidation = 2;
constexpr int kExitMissing = 3;

struct StageFlags {
  std::string config;
  std::string seeds;
  std::string out;
  std::size_t jobs = 1;
};

StudyConfig resolve(const StageFlags& flags) {
  StudyConfig config = StudyConfig::load(flags.config);
  if (!flags.seeds.empty()) config.seeds = symsurrogate::study::parse_seed_range(flags.seeds);
  if (!flags.out.empty()) config.out = flags.out;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symbolic surrogate studies over frozen embeddings"};
  app.require_subcommand(1);

  StageFlags flags;
  using Stage = void (*)(const StudyConfig&, const StageFlags&);
  const std::vector<std::pair<std::string, Stage>> stages = {
      {"partition", [](const StudyConfig& c, const StageFlags&) {
         symsurrogate::study::cmd_partition(c, std::cout);
       }},
      {"train", [](const StudyConfig& c, const StageFlags& f) {
         symsurrogate::study::cmd_train(c, f.jobs, std::cout);
       }},
      {"select", [](const StudyConfig& c, const StageFlags&) {
         symsurrogate::study::cmd_select(c, std::cout);
       }},
      {"calibrate", [](const StudyConfig& c, const StageFlags&) {
         symsurrogate::study::cmd_calibrate(c, std::cout);
       }},
      {"evaluate", [](const StudyConfig& c, const StageFlags&) {
         symsurrogate::study::cmd_evaluate(c, std::cout);
       }},
      {"analyze", [](const StudyConfig& c, const StageFlags&) {
         symsurrogate::study::cmd_analyze(c, std::cout);
       }},
      {"report", [](const StudyConfig& c, const StageFlags&) {
         symsurrogate::study::cmd_report(c, std::cout);
       }},
  };
  std::vector<std::pair<CLI::App*, Stage>> commands;
  for (const auto& [name, fn] : stages) {
    CLI::App* sub = app.add_subcommand(name, "Run the " + name + " stage");
    sub->add_option("--config", flags.config, "Study configuration JSON")->required();
    sub->add_option("--seeds", flags.seeds, "Seed range a..b (overrides the config)");
    sub->add_option("--out", flags.out, "Output directory (overrides the config)");
    sub->add_option("--jobs", flags.jobs, "Parallel runs")->check(CLI::PositiveNumber);
    commands.emplace_back(sub, fn);
  }

  symsurrogate::synth::BlobSpec spec;
  std::string synth_out;
  std::string format = "embd";
  CLI::App* synth = app.add_subcommand("synth", "Write the bundled synthetic blob dataset");
  synth->add_option("--out", synth_out, "Output file")->required();
  synth->add_option("--n", spec.n, "Rows");
  synth->add_option("--d", spec.d, "Embedding width");
  synth->add_option("--classes", spec.num_classes, "Number of classes");
  synth->add_option("--informative", spec.informative, "Informative coordinates");
  synth->add_option("--separation", spec.separation, "Class shift on informative coordinates");
  synth->add_option("--test-fraction", spec.test_fraction, "Share of rows tagged test");
  synth->add_option("--seed", spec.seed, "Generator seed");
  synth->add_option("--format", format, "embd or csv")->check(CLI::IsMember({"embd", "csv"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::Error& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (synth->parsed()) {
      const auto ds = symsurrogate::synth::make_blobs(spec);
      if (format == "csv") {
        symsurrogate::data::save_csv(ds, synth_out);
      } else {
        symsurrogate::data::save_embd(ds, synth_out);
      }
      std::cout << "synth: wrote " << ds.size() << " rows x " << ds.dim() << " to " << synth_out
                << "\n";
      return 0;
    }
    for (const auto& [sub, fn] : commands) {
      if (sub->parsed()) fn(resolve(flags), flags);
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const symsurrogate::data::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const MissingArtifact& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitMissing;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
