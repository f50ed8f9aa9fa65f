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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "cli/commands.hpp"
#include "protoaudio/audio_io.hpp"
#include "protoaudio/datasetkit/manifest.hpp"
#include "protoaudio/datasetkit/splits.hpp"
#include "protoaudio/datasetkit/subset.hpp"
#include "protoaudio/datasetkit/synthetic.hpp"
#include "protoaudio/dsp_frontend.hpp"
#include "protoaudio/error.hpp"
#include "protoaudio/protonet/prototypes.hpp"

namespace py = pybind11;
using namespace protoaudio;

namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;
using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

Waveform ToWaveform(const FloatArray& samples) {
  if (samples.ndim() != 1) throw py::value_error("samples must be one-dimensional");
  Waveform w;
  w.samples.assign(samples.data(), samples.data() + samples.size());
  return w;
}

FloatArray ToArray(const Waveform& w) {
  FloatArray out(static_cast<py::ssize_t>(w.samples.size()));
  std::copy(w.samples.begin(), w.samples.end(), out.mutable_data());
  return out;
}

diff::Tensor<double> ToTensor(const DoubleArray& a) {
  diff::Shape shape(a.shape(), a.shape() + a.ndim());
  return diff::Tensor<double>(shape, std::vector<double>(a.data(), a.data() + a.size()));
}

DoubleArray FromTensor(const diff::Tensor<double>& t) {
  std::vector<py::ssize_t> shape(t.shape.begin(), t.shape.end());
  DoubleArray out(shape);
  std::copy(t.data.begin(), t.data.end(), out.mutable_data());
  return out;
}

py::list ManifestRows(const datasetkit::Manifest& m) {
  py::list rows;
  for (const auto& e : m.entries) rows.append(py::make_tuple(m.ResolvePath(e), e.labels));
  return rows;
}

// Runs a CLI command body and returns what it logged.
template <typename Args, typename Fn>
std::string Capture(Fn fn, const Args& args) {
  std::ostringstream log;
  {
    py::gil_scoped_release release;
    fn(args, log);
  }
  return log.str();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Few-shot audio classification with prototypical networks";

  // Leaked on purpose: the translator may run during interpreter shutdown.
  static py::handle error = py::exception<Error>(m, "ProtoaudioError").release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = error(e.what());
      exc.attr("kind") = std::string(ErrorKindName(e.kind()));
      exc.attr("line") = e.line();
      PyErr_SetObject(error.ptr(), exc.ptr());
    }
  });

  m.attr("SAMPLE_RATE_HZ") = kSampleRateHz;

  m.def("load_wav", [](const std::string& path) { return ToArray(LoadWav(path)); }, py::arg("path"),
        "PCM16 mono 16 kHz WAV as float32 samples in [-1, 1].");
  m.def("write_wav", [](const std::string& path, const FloatArray& samples) {
    WriteWav(path, ToWaveform(samples));
  }, py::arg("path"), py::arg("samples"));

  m.def("hz_to_mel", py::vectorize(HzToMel), py::arg("hz"));
  m.def("mel_to_hz", py::vectorize(MelToHz), py::arg("mel"));

  m.def(
      "log_mel",
      [](const FloatArray& samples, int frame_len, int hop, int fft_size, int n_mels, double fmin_hz,
         double fmax_hz, double log_floor) {
        FrontendConfig cfg;
        cfg.frame_len_samples = frame_len;
        cfg.hop_samples = hop;
        cfg.fft_size = fft_size;
        cfg.n_mels = n_mels;
        cfg.fmin_hz = fmin_hz;
        cfg.fmax_hz = fmax_hz;
        cfg.log_floor = log_floor;
        const auto f = ExtractFeatures(ToWaveform(samples), cfg);
        FloatArray out({static_cast<py::ssize_t>(f.frames), static_cast<py::ssize_t>(f.n_mels)});
        std::copy(f.values.begin(), f.values.end(), out.mutable_data());
        return out;
      },
      py::arg("samples"), py::arg("frame_len") = 400, py::arg("hop") = 160, py::arg("fft_size") = 512,
      py::arg("n_mels") = 64, py::arg("fmin_hz") = 0.0, py::arg("fmax_hz") = 8000.0,
      py::arg("log_floor") = 1e-6, "Log-mel features, shape [frames, n_mels].");

  m.def("prototypes", [](const DoubleArray& support) {
    if (support.ndim() != 3) throw py::value_error("support must have shape [k, n, d]");
    return FromTensor(protonet::ComputePrototypes(ToTensor(support)));
  }, py::arg("support"));
  m.def("classify", [](const DoubleArray& query, const DoubleArray& protos) {
    if (query.ndim() != 1 || protos.ndim() != 2) throw py::value_error("expected query [d], prototypes [k, d]");
    return protonet::Classify(std::vector<double>(query.data(), query.data() + query.size()), ToTensor(protos));
  }, py::arg("query"), py::arg("prototypes"));

  m.def("load_manifest", [](const std::string& path) { return ManifestRows(datasetkit::LoadManifest(path)); },
        py::arg("path"), "List of (resolved path, labels).");

  m.def(
      "select_subset",
      [](const std::string& manifest, std::size_t classes, std::size_t budget) {
        const auto r = datasetkit::SelectSingleLabelSubset(datasetkit::LoadManifest(manifest), classes, budget);
        py::dict d;
        d["classes"] = r.classes;
        d["objective"] = r.objective;
        d["greedy_objective"] = r.greedy_objective;
        d["swaps_applied"] = r.swaps_applied;
        d["swaps_evaluated"] = r.swaps_evaluated;
        d["budget_exhausted"] = r.budget_exhausted;
        return d;
      },
      py::arg("manifest"), py::arg("classes"), py::arg("budget") = datasetkit::kDefaultSwapBudget);

  m.def(
      "make_splits",
      [](const std::string& manifest, std::tuple<double, double, double> ratios, std::size_t min_per_class,
         std::uint64_t seed) {
        const auto [tr, va, te] = ratios;
        const auto s = datasetkit::MakeSplits(datasetkit::LoadManifest(manifest), {tr, va, te}, min_per_class, seed);
        py::dict d;
        d["train"] = s.train_classes;
        d["val"] = s.val_classes;
        d["test"] = s.test_classes;
        d["dropped"] = s.dropped;
        return d;
      },
      py::arg("manifest"), py::arg("ratios") = std::make_tuple(0.6, 0.2, 0.2), py::arg("min_per_class") = 10,
      py::arg("seed") = 0);

  m.def(
      "gen_synthetic_corpus",
      [](const std::string& out_dir, std::size_t classes, std::size_t per_class, std::uint64_t seed) {
        py::gil_scoped_release release;
        datasetkit::GenSyntheticCorpus(out_dir, classes, per_class, seed);
        return out_dir + "/manifest.tsv";
      },
      py::arg("out_dir"), py::arg("classes") = 15, py::arg("per_class") = 20, py::arg("seed") = 0,
      "Writes the synthetic timbre corpus; returns the manifest path.");

  m.def(
      "train",
      [](const std::string& config, const std::string& out, const std::string& manifest) {
        return Capture(cli::RunTrain, cli::TrainArgs{config, out, manifest});
      },
      py::arg("config"), py::arg("out"), py::arg("manifest") = "", "Same as `protoaudio train`; returns the log.");

  m.def(
      "evaluate",
      [](const std::string& run, const std::string& split, std::size_t episodes, std::optional<std::uint64_t> seed,
         std::vector<std::size_t> shots, std::vector<std::size_t> ways, const std::string& embedder) {
        cli::EvalArgs args;
        args.run = run;
        args.split = split;
        args.episodes = episodes;
        args.seed = seed;
        args.shots = std::move(shots);
        args.ways = std::move(ways);
        args.embedder = embedder;
        return Capture(cli::RunEval, args);
      },
      py::arg("run"), py::arg("split") = "test", py::arg("episodes") = cli::EvalArgs{}.episodes,
      py::arg("seed") = py::none(), py::arg("shots") = std::vector<std::size_t>{},
      py::arg("ways") = std::vector<std::size_t>{}, py::arg("embedder") = "checkpoint",
      "Same as `protoaudio eval`; returns the report text.");
}
