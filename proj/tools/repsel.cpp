// Copyright 2026 The repsel Authors.
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

// Command-line front end: feature extraction, reduction, training,
// prediction, t-SNE, synthetic data and the benchmark sweep.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "repsel/bench/config.hpp"
#include "repsel/bench/report.hpp"
#include "repsel/bench/summary.hpp"
#include "repsel/bench/sweep.hpp"
#include "repsel/dsp/cepstra.hpp"
#include "repsel/dsp/wav.hpp"
#include "repsel/error.hpp"
#include "repsel/metrics/scores.hpp"
#include "repsel/metrics/tsne.hpp"
#include "repsel/nn/model.hpp"
#include "repsel/nn/train.hpp"
#include "repsel/reduce/reducer.hpp"
#include "repsel/store/dataset.hpp"
#include "repsel/store/synthetic.hpp"

namespace fs = std::filesystem;
using namespace repsel;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitPartial = 3;
constexpr double kFeatureRate = 16000.0;

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  const auto e = s.find_last_not_of(" \t\r\n");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

// ---- features ---------------------------------------------------------

struct FeaturesArgs {
  fs::path input;
  fs::path manifest;
  std::string type = "mfcc";
  fs::path out;
};

int run_features(const FeaturesArgs& a) {
  const dsp::FeatureConfig cfg =
      a.type == "mfcc" ? dsp::FeatureConfig::mfcc() : dsp::FeatureConfig::lfcc();
  const fs::path manifest = a.manifest.empty() ? a.input / "manifest.csv" : a.manifest;
  std::ifstream in(manifest);
  if (!in) throw ConfigError("cannot open manifest " + manifest.string());

  std::vector<std::vector<double>> rows;
  std::vector<std::uint8_t> labels;
  std::vector<std::string> tags;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    const auto comma = line.rfind(',');
    if (comma == std::string::npos) {
      throw DataError("manifest line " + std::to_string(line_no) + " has no label");
    }
    const std::string path = trim(line.substr(0, comma));
    const std::string label = trim(line.substr(comma + 1));
    if (line_no == 1 && path == "path" && label == "label") continue;
    if (label != "0" && label != "1") {
      throw DataError("manifest line " + std::to_string(line_no) + ": label must be 0 or 1");
    }
    fs::path wav = path;
    if (wav.is_relative()) wav = a.input / wav;
    dsp::AudioClip clip = dsp::read_wav(wav);
    if (clip.sample_rate != kFeatureRate) clip = dsp::resample_linear(clip, kFeatureRate);
    rows.push_back(dsp::extract_cepstra(clip, cfg));
    labels.push_back(label == "1" ? store::kFake : store::kReal);
    tags.push_back(path);
  }
  if (rows.empty()) throw DataError("manifest lists no clips");

  FeatureMatrix x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cfg.output_dim()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = static_cast<float>(rows[i][j]);
    }
  }
  store::EmbeddingDataset ds(a.type, std::move(x), std::move(labels), std::move(tags));
  store::save_dataset(ds, a.out);
  std::cout << "wrote " << ds.size() << " x " << ds.dim() << " features to " << a.out << '\n';
  return kExitOk;
}

// ---- reduce -----------------------------------------------------------

struct ReduceArgs {
  std::string spec;
  fs::path train;
  fs::path apply;
  fs::path out;
  fs::path save_reducer;
  fs::path load_reducer;
};

// "kind=pca,pct=0.5,seed=3,gamma=0.01,kernel=linear,max_fit_rows=1000"
reduce::ReducerSpec parse_reducer_spec(const std::string& text) {
  reduce::ReducerSpec spec;
  bool have_kind = false;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("spec item '" + item + "' is not key=value");
    const std::string key = trim(item.substr(0, eq));
    const std::string val = trim(item.substr(eq + 1));
    try {
      if (key == "kind") {
        spec.kind = reduce::parse_reducer_kind(val);
        have_kind = true;
      } else if (key == "pct") {
        spec.percentage = std::stod(val);
      } else if (key == "seed") {
        spec.seed = std::stoull(val);
      } else if (key == "gamma") {
        spec.gamma = std::stod(val);
      } else if (key == "kernel") {
        if (val == "rbf") spec.kernel = reduce::KernelKind::kRbf;
        else if (val == "linear") spec.kernel = reduce::KernelKind::kLinear;
        else throw ConfigError("unknown kernel '" + val + "'");
      } else if (key == "max_fit_rows") {
        spec.max_fit_rows = std::stoull(val);
      } else {
        throw ConfigError("unknown spec key '" + key + "'");
      }
    } catch (const std::logic_error&) {
      throw ConfigError("bad value for spec key '" + key + "'");
    }
  }
  if (!have_kind) throw ConfigError("spec needs kind=...");
  reduce::target_dim(spec.percentage, 1);  // validates the percentage
  return spec;
}

int run_reduce(const ReduceArgs& a) {
  if (a.train.empty() == a.load_reducer.empty()) {
    throw ConfigError("give exactly one of --train and --load-reducer");
  }
  std::optional<reduce::FittedReducer> r;
  if (!a.load_reducer.empty()) {
    r = reduce::load_reducer(a.load_reducer);
  } else {
    if (a.spec.empty()) throw ConfigError("--spec is required with --train");
    r = reduce::fit(parse_reducer_spec(a.spec), store::load_dataset(a.train));
  }
  if (!a.save_reducer.empty()) reduce::save_reducer(*r, a.save_reducer);
  if (!a.apply.empty()) {
    if (a.out.empty()) throw ConfigError("--out is required with --apply");
    const auto reduced = r->transform(store::load_dataset(a.apply));
    if (store::format_for_path(a.out) == store::DatasetFormat::kCsv) {
      store::save_dataset_csv(reduced, a.out);
    } else {
      store::save_dataset(reduced, a.out);
    }
  }
  std::cout << reduce::to_string(r->kind()) << ": " << r->input_dim() << " -> " << r->output_dim()
            << '\n';
  return kExitOk;
}

// ---- train / predict --------------------------------------------------

struct TrainArgs {
  std::string arch = "fcn";
  fs::path data;
  fs::path out;
  std::uint64_t seed = 0;
  nn::TrainConfig cfg;
  std::size_t hidden = 512;
  double dropout = 0.3;
};

int run_train(TrainArgs a) {
  const auto ds = store::load_dataset(a.data);
  nn::ArchSpec arch;
  arch.kind = nn::parse_arch_kind(a.arch);
  arch.input_dim = ds.dim();
  arch.hidden = a.hidden;
  arch.dropout_rate = a.dropout;
  arch.validate();
  a.cfg.seed = a.seed;
  auto model = nn::train(nn::build(arch, a.seed), ds, a.cfg);
  nn::save_model(model, a.out);
  std::cout << "trained " << nn::to_string(arch.kind) << " (" << nn::count_params(model)
            << " parameters) for " << model.trained_epochs
            << " epochs, best validation loss " << model.best_val_loss << '\n';
  return kExitOk;
}

struct PredictArgs {
  fs::path model;
  fs::path data;
  fs::path out;
  double threshold = metrics::kDefaultThreshold;
};

int run_predict(const PredictArgs& a) {
  auto model = nn::load_model(a.model);
  const auto ds = store::load_dataset(a.data);
  metrics::ScoredSet scored{nn::predict(model, ds.samples()), ds.labels()};
  if (!a.out.empty()) {
    std::ofstream out(a.out);
    if (!out) throw IoError("cannot write " + a.out.string());
    out << "score,label\n";
    char buf[32];
    for (std::size_t i = 0; i < scored.scores.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.9g", scored.scores[i]);
      out << buf << ',' << int(scored.labels[i]) << '\n';
    }
  }
  std::cout << "accuracy " << bench::format_percent(metrics::accuracy(scored, a.threshold))
            << "  macro-F1 " << bench::format_percent(metrics::macro_f1(scored, a.threshold));
  if (ds.has_both_classes()) {
    std::cout << "  EER " << bench::format_percent(metrics::eer(scored).eer);
  }
  std::cout << '\n';
  return kExitOk;
}

// ---- tsne -------------------------------------------------------------

struct TsneArgs {
  fs::path data;
  fs::path out;
  metrics::TsneConfig cfg;
};

int run_tsne(const TsneArgs& a) {
  const auto ds = store::load_dataset(a.data);
  const MatrixD x = ds.samples().cast<double>();
  const auto result = metrics::tsne(x, a.cfg);
  std::ofstream out(a.out);
  if (!out) throw IoError("cannot write " + a.out.string());
  out << "x,y,label\n";
  char buf[64];
  for (Eigen::Index r = 0; r < result.embedding.rows(); ++r) {
    const double y = result.embedding.cols() > 1 ? result.embedding(r, 1) : 0.0;
    std::snprintf(buf, sizeof(buf), "%.9g,%.9g", result.embedding(r, 0), y);
    out << buf << ',' << int(ds.labels()[result.rows[static_cast<std::size_t>(r)]]) << '\n';
  }
  std::cout << "embedded " << result.embedding.rows() << " points, final KL "
            << result.kl_trace.back() << '\n';
  return kExitOk;
}

// ---- gen --------------------------------------------------------------

struct GenArgs {
  store::SyntheticSpec spec;
  fs::path out;
};

int run_gen(const GenArgs& a) {
  const auto ds = store::gen_synthetic(a.spec);
  if (store::format_for_path(a.out) == store::DatasetFormat::kCsv) {
    store::save_dataset_csv(ds, a.out);
  } else {
    store::save_dataset(ds, a.out);
  }
  std::cout << "wrote " << ds.size() << " x " << ds.dim() << " synthetic samples to " << a.out
            << '\n';
  return kExitOk;
}

// ---- sweep / report ---------------------------------------------------

struct SweepArgs {
  fs::path config;
  fs::path out;
  std::size_t workers = 0;
  bool quiet = false;
};

int run_sweep_cmd(const SweepArgs& a) {
  auto cfg = bench::load_config(a.config);
  if (a.workers > 0) cfg.workers = a.workers;
  fs::create_directories(a.out);
  const fs::path report_path = a.out / "reports.jsonl";
  std::ofstream out(report_path, std::ios::binary);
  if (!out) throw IoError("cannot write " + report_path.string());

  bench::SweepOptions opts;
  opts.sink = [&](const bench::EvalReport& r) { out << bench::to_json_line(r) << '\n' << std::flush; };
  if (!a.quiet) opts.progress = &std::cerr;
  const auto reports = bench::run_sweep(cfg, opts);

  std::size_t failed = 0;
  for (const auto& r : reports) failed += r.failed ? 1 : 0;
  std::cout << reports.size() << " reports written to " << report_path;
  if (failed) std::cout << " (" << failed << " failed)";
  std::cout << '\n';
  return failed ? kExitPartial : kExitOk;
}

struct ReportArgs {
  fs::path in;
  fs::path out;
  fs::path plots;
};

int run_report(const ReportArgs& a) {
  const fs::path src = fs::is_directory(a.in) ? a.in / "reports.jsonl" : a.in;
  const auto reports = bench::read_reports(src);
  const auto rows = bench::aggregate(reports);
  const fs::path out = a.out.empty() ? fs::path("summary.csv") : a.out;
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  std::ofstream csv(out, std::ios::binary);
  if (!csv) throw IoError("cannot write " + out.string());
  bench::write_summary_csv(rows, csv);
  if (!a.plots.empty()) bench::emit_plots(rows, a.plots);

  std::size_t failed = 0;
  for (const auto& r : rows) {
    failed += r.failed;
    std::cout << r.reducer << ' ' << bench::format_percent(r.percentage) << "% " << r.arch << ": "
              << bench::format_table_cell(r) << '\n';
  }
  return failed ? kExitPartial : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"repsel: representation-subset benchmarking for deepfake detectors"};
  app.require_subcommand(1);
  int code = kExitOk;

  FeaturesArgs fa;
  auto* features = app.add_subcommand("features", "MFCC/LFCC vectors from WAV clips");
  features->add_option("--input", fa.input, "directory with clips")->required();
  features->add_option("--manifest", fa.manifest, "CSV of path,label (default <input>/manifest.csv)");
  features->add_option("--type", fa.type, "mfcc or lfcc")->check(CLI::IsMember({"mfcc", "lfcc"}));
  features->add_option("--out", fa.out, "output dataset")->required();
  features->callback([&] { code = run_features(fa); });

  ReduceArgs ra;
  auto* red = app.add_subcommand("reduce", "fit and apply a reducer");
  red->add_option("--spec", ra.spec, "e.g. kind=pca,pct=0.5,seed=1");
  red->add_option("--train", ra.train, "dataset to fit on");
  red->add_option("--apply", ra.apply, "dataset to transform");
  red->add_option("--out", ra.out, "transformed dataset (.eadb or .csv)");
  red->add_option("--save-reducer", ra.save_reducer, "write the fitted reducer (.rdx)");
  red->add_option("--load-reducer", ra.load_reducer, "use a saved reducer instead of fitting");
  red->callback([&] { code = run_reduce(ra); });

  TrainArgs ta;
  auto* train = app.add_subcommand("train", "train a downstream classifier");
  train->add_option("--arch", ta.arch, "fcn or cnn")->check(CLI::IsMember({"fcn", "cnn"}));
  train->add_option("--data", ta.data, "training dataset")->required();
  train->add_option("--out", ta.out, "model checkpoint")->required();
  train->add_option("--seed", ta.seed, "random seed");
  train->add_option("--epochs", ta.cfg.epochs, "maximum epochs");
  train->add_option("--lr", ta.cfg.learning_rate, "Adam learning rate");
  train->add_option("--batch-size", ta.cfg.batch_size, "mini-batch size");
  train->add_option("--patience", ta.cfg.patience, "early-stopping patience");
  train->add_option("--val-fraction", ta.cfg.val_fraction, "held-out validation share");
  train->add_flag("--class-weighting", ta.cfg.class_weighting, "inverse-frequency loss weights");
  train->add_option("--hidden", ta.hidden, "hidden width");
  train->add_option("--dropout", ta.dropout, "dropout rate");
  train->callback([&] { code = run_train(ta); });

  PredictArgs pa;
  auto* predict = app.add_subcommand("predict", "score a dataset with a trained model");
  predict->add_option("--model", pa.model, "model checkpoint")->required();
  predict->add_option("--data", pa.data, "dataset")->required();
  predict->add_option("--out", pa.out, "scores CSV");
  predict->add_option("--threshold", pa.threshold, "decision threshold");
  predict->callback([&] { code = run_predict(pa); });

  TsneArgs sa;
  auto* tsne = app.add_subcommand("tsne", "2-D t-SNE projection");
  tsne->add_option("--data", sa.data, "dataset")->required();
  tsne->add_option("--out", sa.out, "x,y,label CSV")->required();
  tsne->add_option("--perplexity", sa.cfg.perplexity, "target perplexity");
  tsne->add_option("--iterations", sa.cfg.iterations, "gradient steps");
  tsne->add_option("--learning-rate", sa.cfg.learning_rate, "step size");
  tsne->add_option("--max-points", sa.cfg.max_points, "subsample above this many rows");
  tsne->add_option("--seed", sa.cfg.seed, "random seed");
  tsne->callback([&] { code = run_tsne(sa); });

  GenArgs ga;
  auto* gen = app.add_subcommand("gen", "generate a synthetic redundant dataset");
  gen->add_option("--out", ga.out, "output dataset (.eadb or .csv)")->required();
  gen->add_option("--n-per-class", ga.spec.n_per_class, "samples per class");
  gen->add_option("--dim", ga.spec.dim, "vector width");
  gen->add_option("--informative", ga.spec.n_informative, "informative coordinates");
  gen->add_option("--redundancy", ga.spec.redundancy_factor, "copy weight");
  gen->add_option("--noise", ga.spec.noise_sigma, "noise standard deviation");
  gen->add_option("--shift", ga.spec.class_shift, "class mean distance");
  gen->add_option("--seed", ga.spec.seed, "random seed");
  gen->add_option("--name", ga.spec.name, "dataset name");
  gen->callback([&] { code = run_gen(ga); });

  SweepArgs wa;
  auto* sweep = app.add_subcommand("sweep", "run an experiment grid");
  sweep->add_option("--config", wa.config, "experiment JSON")->required();
  sweep->add_option("--out", wa.out, "results directory")->required();
  sweep->add_option("--workers", wa.workers, "override the configured worker count");
  sweep->add_flag("--quiet", wa.quiet, "no progress output");
  sweep->callback([&] { code = run_sweep_cmd(wa); });

  ReportArgs pr;
  auto* report = app.add_subcommand("report", "summarise sweep results");
  report->add_option("--in", pr.in, "results directory or reports.jsonl")->required();
  report->add_option("--out", pr.out, "summary CSV");
  report->add_option("--plots", pr.plots, "directory for plot CSV/SVG files");
  report->callback([&] { code = run_report(pr); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return code;
}
