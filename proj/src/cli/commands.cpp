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

#include "cli/commands.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include "cli/run_config.hpp"
#include "json.hpp"
#include "protoaudio/datasetkit/corpus.hpp"
#include "protoaudio/datasetkit/manifest.hpp"
#include "protoaudio/datasetkit/splits.hpp"
#include "protoaudio/datasetkit/subset.hpp"
#include "protoaudio/datasetkit/synthetic.hpp"
#include "protoaudio/diff/checkpoint.hpp"
#include "protoaudio/dsp_frontend.hpp"
#include "protoaudio/encoders/encoder.hpp"
#include "protoaudio/error.hpp"
#include "protoaudio/protonet/evaluate.hpp"
#include "protoaudio/protonet/train.hpp"

namespace protoaudio::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
}

std::string Fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string Exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string UtcNow() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

datasetkit::LoadOptions OptionsFor(const encoders::EncoderSpec& spec, const FrontendConfig& fe) {
  datasetkit::LoadOptions opts;
  opts.keep_waveform = spec.uses_waveform();
  opts.compute_features = !spec.uses_waveform();
  opts.frontend = fe;
  return opts;
}

const std::vector<std::string>& SplitClasses(const datasetkit::FewShotSplit& s, const std::string& name) {
  if (name == "train") return s.train_classes;
  if (name == "val") return s.val_classes;
  if (name == "test") return s.test_classes;
  throw Error(ErrorKind::kConfig, "unknown split '" + name + "' (train, val, test)");
}

std::string ColumnName(std::size_t n, std::size_t k) {
  return std::to_string(n) + "-shot " + std::to_string(k) + "-way";
}

std::string Pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

}  // namespace

void RunTrain(const TrainArgs& args, std::ostream& log) {
  RunConfig cfg = LoadRunConfig(args.config);
  if (!args.manifest.empty()) cfg.manifest = fs::absolute(args.manifest).lexically_normal();
  ApplySeedOverride(cfg);
  cfg.Validate();
  if (cfg.manifest.empty()) throw Error(ErrorKind::kConfig, "manifest is not set (config key or --manifest)");
  if (args.out.empty()) throw Error(ErrorKind::kConfig, "--out is required");

  const auto manifest = datasetkit::LoadManifest(cfg.manifest.string());
  const auto split = cfg.splits.empty()
                         ? datasetkit::MakeSplits(manifest, cfg.split_ratios, cfg.effective_min_per_class(),
                                                  cfg.train.seed)
                         : datasetkit::ReadSplitFile(cfg.splits.string());

  const fs::path run(args.out);
  std::error_code ec;
  fs::create_directories(run, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create run directory " + run.string() + ": " + ec.message());
  WriteText(run / "config.cfg", FormatRunConfig(cfg));
  datasetkit::WriteSplitFile((run / "splits.txt").string(), split);

  const auto spec = cfg.encoder_spec();
  const auto opts = OptionsFor(spec, cfg.frontend);
  const auto train_data = datasetkit::LoadSplitData(manifest, split.train_classes, opts);
  const auto val_data = datasetkit::LoadSplitData(manifest, split.val_classes, opts);
  log << "train: " << train_data.size() << " clips in " << split.train_classes.size() << " classes; val: "
      << val_data.size() << " clips in " << split.val_classes.size() << " classes\n";

  encoders::Encoder encoder(spec, cfg.train.seed);
  std::ofstream metrics(run / "metrics.jsonl", std::ios::binary | std::ios::trunc);
  if (!metrics) throw Error(ErrorKind::kIo, "cannot write " + (run / "metrics.jsonl").string());

  std::optional<double> best;
  protonet::TrainHooks hooks;
  hooks.on_record = [&](const protonet::MetricRecord& rec) {
    Json line;
    line["episode"] = rec.episode;
    line["loss"] = rec.loss;
    line["accuracy"] = rec.accuracy;
    line["val_accuracy"] = rec.val_accuracy ? Json(*rec.val_accuracy) : Json(nullptr);
    line["timestamp"] = cfg.record_timestamps ? Json(UtcNow()) : Json(nullptr);
    metrics << line.dump() << "\n";
    if (!rec.val_accuracy) return;
    metrics.flush();
    const bool improved = !best || *rec.val_accuracy > *best;
    if (improved) {
      best = *rec.val_accuracy;
      diff::SaveCheckpoint((run / "best.ckpt").string(),
                           encoder.ToCheckpoint({{"episode", std::to_string(rec.episode)},
                                                 {"val_accuracy", Exact(*rec.val_accuracy)},
                                                 {"seed", std::to_string(cfg.train.seed)}}));
    }
    log << "episode " << rec.episode << "  loss " << Fixed(rec.loss, 4) << "  val_acc "
        << Fixed(*rec.val_accuracy, 4) << (improved ? "  *" : "") << "\n";
  };

  const auto result = protonet::Train(encoder, train_data, val_data, cfg.train, hooks);
  metrics.flush();
  if (!metrics) throw Error(ErrorKind::kIo, "cannot write " + (run / "metrics.jsonl").string());
  diff::SaveCheckpoint((run / "last.ckpt").string(),
                       encoder.ToCheckpoint({{"episode", std::to_string(result.episodes_run)},
                                             {"seed", std::to_string(cfg.train.seed)}}));
  log << "done: " << result.episodes_run << " episodes" << (result.early_stopped ? " (early stop)" : "")
      << "; best val_acc " << Fixed(result.best_val_accuracy, 4) << " at episode " << result.best_episode
      << "\n";
}

void RunEval(const EvalArgs& args, std::ostream& log) {
  const fs::path run(args.run);
  if (!fs::exists(run / "config.cfg")) {
    throw Error(ErrorKind::kMissingRun, "no run directory at " + run.string() + " (config.cfg missing)");
  }
  RunConfig cfg = LoadRunConfig((run / "config.cfg").string());
  ApplySeedOverride(cfg);
  if (!fs::exists(run / "splits.txt")) {
    throw Error(ErrorKind::kMissingRun, "run " + run.string() + " has no splits.txt");
  }
  if (args.episodes == 0) throw Error(ErrorKind::kConfig, "--episodes must be positive");
  const auto split = datasetkit::ReadSplitFile((run / "splits.txt").string());
  const auto& classes = SplitClasses(split, args.split);
  const auto manifest = datasetkit::LoadManifest(cfg.manifest.string());

  std::unique_ptr<encoders::Encoder> encoder;
  std::unique_ptr<protonet::Embedder> embedder;
  datasetkit::LoadOptions opts;
  std::string row = args.embedder;
  if (args.embedder == "checkpoint") {
    const auto ckpt = diff::LoadCheckpoint((run / "best.ckpt").string());
    const auto spec = cfg.encoder_spec();
    encoder = std::make_unique<encoders::Encoder>(spec, cfg.train.seed);
    encoder->Restore(ckpt);
    embedder = std::make_unique<protonet::EncoderEmbedder>(*encoder);
    opts = OptionsFor(spec, cfg.frontend);
    row = encoders::EncoderKindName(spec.kind);
  } else if (args.embedder == "oracle") {
    embedder = std::make_unique<protonet::OracleEmbedder>();
    opts.keep_waveform = opts.compute_features = false;
  } else if (args.embedder == "constant") {
    embedder = std::make_unique<protonet::ConstantEmbedder>();
    opts.keep_waveform = opts.compute_features = false;
  } else {
    throw Error(ErrorKind::kConfig, "unknown embedder '" + args.embedder + "' (checkpoint, oracle, constant)");
  }

  const auto data = datasetkit::LoadSplitData(manifest, classes, opts);
  const auto emb = embedder->EmbedSplit(data);
  const auto shots = args.shots.empty() ? std::vector<std::size_t>{cfg.train.n_shot} : args.shots;
  const auto ways = args.ways.empty() ? std::vector<std::size_t>{cfg.train.k_way} : args.ways;
  const std::uint64_t seed = args.seed.value_or(cfg.train.seed);

  Json report;
  report["split"] = args.split;
  report["episodes"] = args.episodes;
  report["seed"] = seed;
  report["q_query"] = cfg.train.q_query;
  Json json_row;
  json_row["encoder"] = row;
  json_row["scale"] = args.embedder == "checkpoint" ? Json(encoders::ScaleName(cfg.scale)) : Json(nullptr);
  json_row["results"] = Json::array();

  std::vector<std::string> headers;
  std::vector<std::string> cells;
  for (std::size_t k : ways) {
    for (std::size_t n : shots) {
      protonet::EvalConfig ec{n, k, cfg.train.q_query, args.episodes, seed};
      const auto r = protonet::EvaluateEmbeddings(emb, data, ec);
      headers.push_back(ColumnName(n, k));
      cells.push_back(Fixed(100.0 * r.mean_accuracy, 1) + "% +- " +
                      Fixed(100.0 * (r.ci95_high - r.mean_accuracy), 1));
      Json cell;
      cell["column"] = headers.back();
      cell["n_shot"] = n;
      cell["k_way"] = k;
      cell["mean_accuracy"] = r.mean_accuracy;
      cell["std_error"] = r.std_error;
      cell["ci95_low"] = r.ci95_low;
      cell["ci95_high"] = r.ci95_high;
      cell["mean_loss"] = r.mean_loss;
      json_row["results"].push_back(cell);
    }
  }
  report["rows"] = Json::array({json_row});

  std::size_t first = std::max<std::size_t>(row.size(), 7) + 2;
  std::ostringstream table;
  table << "split " << args.split << ", " << args.episodes << " episodes, " << cfg.train.q_query
        << " queries per class, seed " << seed << "\n";
  table << Pad("encoder", first);
  for (std::size_t i = 0; i < headers.size(); ++i) {
    const std::size_t w = std::max(headers[i].size(), cells[i].size()) + 2;
    table << Pad(headers[i], i + 1 == headers.size() ? 0 : w);
  }
  table << "\n" << Pad(row, first);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const std::size_t w = std::max(headers[i].size(), cells[i].size()) + 2;
    table << Pad(cells[i], i + 1 == cells.size() ? 0 : w);
  }
  table << "\n";

  WriteText(run / ("eval_" + args.split + ".txt"), table.str());
  WriteText(run / ("eval_" + args.split + ".json"), report.dump(2) + "\n");
  log << table.str();
}

void RunFeatures(const FeaturesArgs& args, std::ostream& log) {
  FrontendConfig fe;
  if (!args.config.empty()) fe = LoadRunConfig(args.config).frontend;
  const auto features = LogMelExtractor(fe).Extract(LoadWav(args.in));
  WriteFeatureDump(args.out, features);
  log << "wrote " << args.out << ": " << features.frames << " frames x " << features.n_mels << " mels\n";
}

void RunSubset(const SubsetArgs& args, std::ostream& log) {
  const auto m = datasetkit::LoadManifest(args.manifest);
  const auto r = datasetkit::SelectSingleLabelSubset(
      m, args.classes, args.budget == 0 ? datasetkit::kDefaultSwapBudget : args.budget);
  log << "J=" << r.objective << " (greedy " << r.greedy_objective << ", swaps " << r.swaps_applied << "/"
      << r.swaps_evaluated << (r.budget_exhausted ? ", budget exhausted" : "") << ")\n";
  log << "classes:";
  for (const auto& c : r.classes) log << " " << c;
  log << "\n";
  if (args.out.empty()) return;

  auto filtered = datasetkit::FilterToSubset(m, r.classes);
  const fs::path out_dir = fs::absolute(args.out).parent_path();
  if (out_dir.lexically_normal() != m.base_dir.lexically_normal()) {
    for (auto& e : filtered.entries) e.path = m.ResolvePath(e);
  }
  datasetkit::WriteManifest(args.out, filtered);
  log << "wrote " << args.out << ": " << filtered.size() << " single-label clips\n";
}

void RunSynth(const SynthArgs& args, std::ostream& log) {
  const auto m = datasetkit::GenSyntheticCorpus(args.out, args.classes, args.per_class, args.seed);
  log << "wrote " << m.size() << " clips in " << m.classes().size() << " classes; manifest "
      << (fs::path(args.out) / "manifest.tsv").string() << "\n";
}

}  // namespace protoaudio::cli
