// Copyright 2026 The protoaudio Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <iostream>

#include "CLI11.hpp"
#include "cli/commands.hpp"
#include "protoaudio/error.hpp"

int main(int argc, char** argv) {
  using namespace protoaudio::cli;
  CLI::App app{"protoaudio: few-shot audio classification with prototypical networks"};
  app.require_subcommand(1);

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Train an encoder episodically into a run directory");
  train_cmd->add_option("--config", train.config, "Run config (key = value)")->required();
  train_cmd->add_option("--out", train.out, "Run directory to create or overwrite")->required();
  train_cmd->add_option("--manifest", train.manifest, "Manifest path; overrides the config");

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a run's best checkpoint on random episodes");
  eval_cmd->add_option("--run", eval.run, "Run directory written by train")->required();
  eval_cmd->add_option("--split", eval.split, "train, val or test")->capture_default_str();
  eval_cmd->add_option("--episodes", eval.episodes, "Number of episodes")->capture_default_str();
  eval_cmd->add_option("--seed", eval.seed, "Episode seed (default: run seed)");
  eval_cmd->add_option("--shots", eval.shots, "Support sizes, e.g. 1,5")->delimiter(',');
  eval_cmd->add_option("--ways", eval.ways, "Class counts, e.g. 5,10")->delimiter(',');
  eval_cmd->add_option("--embedder", eval.embedder, "checkpoint, oracle or constant")->capture_default_str();

  FeaturesArgs features;
  auto* features_cmd = app.add_subcommand("features", "Write a log-mel feature dump for one WAV");
  features_cmd->add_option("--in", features.in, "Input WAV (PCM16 mono 16 kHz)")->required();
  features_cmd->add_option("--out", features.out, "Output dump")->required();
  features_cmd->add_option("--config", features.config, "Run config supplying frontend.* keys");

  SubsetArgs subset;
  auto* subset_cmd = app.add_subcommand("subset", "Choose classes maximizing single-label clips");
  subset_cmd->add_option("--manifest", subset.manifest, "Multi-label manifest")->required();
  subset_cmd->add_option("--classes", subset.classes, "Number of classes to keep")->required();
  subset_cmd->add_option("--budget", subset.budget, "Swap evaluation budget");
  subset_cmd->add_option("--out", subset.out, "Write the filtered single-label manifest here");

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate the synthetic timbre corpus");
  synth_cmd->add_option("--out", synth.out, "Output directory")->required();
  synth_cmd->add_option("--classes", synth.classes, "Number of classes")->capture_default_str();
  synth_cmd->add_option("--per-class", synth.per_class, "Clips per class")->capture_default_str();
  synth_cmd->add_option("--seed", synth.seed, "Generator seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*train_cmd) RunTrain(train, std::cout);
    if (*eval_cmd) RunEval(eval, std::cout);
    if (*features_cmd) RunFeatures(features, std::cout);
    if (*subset_cmd) RunSubset(subset, std::cout);
    if (*synth_cmd) RunSynth(synth, std::cout);
  } catch (const protoaudio::Error& e) {
    std::cerr << "protoaudio: " << e.what() << "\n";
    return protoaudio::ExitCodeFor(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "protoaudio: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
