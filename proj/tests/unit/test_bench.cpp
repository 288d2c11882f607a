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


#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "repsel/bench/config.hpp"
#include "repsel/bench/report.hpp"
#include "repsel/bench/summary.hpp"
#include "repsel/bench/sweep.hpp"
#include "repsel/bench/timing.hpp"
#include "repsel/error.hpp"
#include "repsel/store/folds.hpp"
#include "repsel/store/synthetic.hpp"

using namespace repsel;
using namespace repsel::bench;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("repsel_test_bench_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::size_t count_lines(const std::string& text) {
  std::size_t n = 0;
  for (char c : text) n += c == '\n' ? 1 : 0;
  return n;
}

// Small and fast: 16-d inputs, two folds, a few epochs.
ExperimentConfig tiny_config() {
  ExperimentConfig cfg;
  store::SyntheticSpec s;
  s.n_per_class = 40;
  s.dim = 16;
  s.n_informative = 4;
  s.class_shift = 2.0;
  s.seed = 11;
  s.name = "tiny";
  cfg.synthetic = s;
  cfg.percentages = {0.25, 0.5};
  cfg.n_folds = 2;
  cfg.master_seed = 5;
  cfg.train.epochs = 3;
  cfg.train.learning_rate = 1e-3;
  cfg.train.batch_size = 16;
  cfg.hidden = 16;
  cfg.timing.warmup = 1;
  cfg.timing.runs = 3;
  return cfg;
}

EvalReport sample_report() {
  EvalReport r;
  r.dataset = "tiny";
  r.reducer = "pca";
  r.percentage = 0.5;
  r.arch = "fcn";
  r.fold = 1;
  r.selection_seed = 6;
  r.input_dim = 16;
  r.output_dim = 8;
  r.accuracy = 0.9821;
  r.macro_f1 = 0.9698;
  r.eer = 0.0192;
  r.threshold_at_eer = 0.4375;
  r.param_count = 4641;
  r.epochs_run = 3;
  r.fit_row_count = 40;
  r.inference_latency = LatencyStats{1e-5, 9e-6, 2e-5, 3};
  r.transform_latency = LatencyStats{2e-6, 1e-6, 3e-6, 3};
  r.train_seconds = 0.25;
  return r;
}

}  // namespace

TEST_CASE("config parsing") {
  const auto cfg = parse_config(R"({
    "dataset": "data/emb.eadb",
    "reducers": ["random_select", "grp"],
    "percentages": [0.3, 0.1],
    "archs": ["cnn"],
    "n_folds": 3,
    "master_seed": 9,
    "train": {"epochs": 7, "learning_rate": 0.001, "adam": {"beta1": 0.8}},
    "model": {"hidden": 64, "dropout": 0.1},
    "timing": {"enabled": false},
    "kpca": {"gamma": 0.5, "kernel": "linear"}
  })", "/cfg");
  REQUIRE(cfg.dataset_path);
  CHECK(*cfg.dataset_path == fs::path("/cfg/data/emb.eadb"));
  CHECK_FALSE(cfg.synthetic);
  CHECK(cfg.reducers.size() == 2);
  CHECK(cfg.archs == std::vector<nn::ArchKind>{nn::ArchKind::kCnn});
  CHECK(cfg.sweep_percentages() == std::vector<double>{0.1, 0.3, 1.0});
  CHECK(cfg.grid_size() == 2 * 3 * 1 * 3);
  CHECK(cfg.train.epochs == 7);
  CHECK(cfg.train.adam.beta1 == 0.8);
  CHECK(cfg.train.adam.beta2 == 0.999);
  CHECK(cfg.hidden == 64);
  CHECK_FALSE(cfg.timing.enabled);
  CHECK(cfg.kpca_gamma == 0.5);
  CHECK(cfg.kpca_kernel == reduce::KernelKind::kLinear);

  const auto defaults = parse_config(R"({"dataset": {"synthetic": {"dim": 32, "n_informative": 8}}})");
  REQUIRE(defaults.synthetic);
  CHECK(defaults.synthetic->dim == 32);
  CHECK(defaults.synthetic->n_per_class == 1000);
  CHECK(defaults.grid_size() == 5 * 10 * 2 * 5);
  CHECK(defaults.train.learning_rate == 1e-5);
  CHECK(defaults.train.epochs == 50);

  CHECK_THROWS_AS(parse_config("{"), ConfigError);
  CHECK_THROWS_AS(parse_config("{}"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"dataset": "x", "folds": 3})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"dataset": "x", "train": {"lr": 1}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"dataset": "x", "reducers": ["lda"]})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"dataset": "x", "archs": ["rnn"]})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"dataset": "x", "percentages": [1.5]})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"dataset": "x", "n_folds": 1})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"dataset": "x", "n_folds": "five"})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"dataset": {"file": "x"}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"dataset": "x", "percentages": [], "include_baseline": false})"),
                  ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/repsel.json"), Error);
}

TEST_CASE("percentiles and latency stats") {
  CHECK(percentile({4, 1, 3, 2}, 0.5) == doctest::Approx(2.5));
  CHECK(percentile({4, 1, 3, 2}, 0.0) == 1.0);
  CHECK(percentile({4, 1, 3, 2}, 1.0) == 4.0);
  CHECK(percentile({0, 10}, 0.1) == doctest::Approx(1.0));
  CHECK(percentile({7}, 0.9) == 7.0);
  CHECK_THROWS_AS(percentile({}, 0.5), DataError);
  const auto s = summarize({5, 1, 2, 4, 3});
  CHECK(s.median == 3.0);
  CHECK(s.p10 == doctest::Approx(1.4));
  CHECK(s.p90 == doctest::Approx(4.6));
  CHECK(s.runs == 5);

  nn::ArchSpec arch;
  arch.input_dim = 8;
  arch.hidden = 4;
  auto model = nn::build(arch, 1);
  const std::vector<float> x(8, 0.5f);
  const auto one = measure_inference(model, x, 0, 1);
  CHECK(one.runs == 1);
  CHECK(one.median == one.p10);
  CHECK(one.median == one.p90);
  CHECK(one.median > 0.0);
  CHECK(measure_inference(model, 2, 5, 3).runs == 5);
  CHECK_THROWS_AS(measure_inference(model, x, 1, 0), ConfigError);
  const std::vector<float> wrong(7, 0.5f);
  CHECK_THROWS_AS(measure_inference(model, wrong, 1, 1), DimensionError);
}

TEST_CASE("report JSON lines") {
  const EvalReport r = sample_report();
  const std::string line = to_json_line(r);
  CHECK(line.find('\n') == std::string::npos);
  CHECK(line.find("\"status\":\"ok\"") != std::string::npos);
  CHECK(line.find("\"error\"") == std::string::npos);
  const EvalReport back = from_json_line(line);
  CHECK(to_json_line(back) == line);
  CHECK(back.accuracy == r.accuracy);
  CHECK(back.inference_latency->median == r.inference_latency->median);

  const std::string stripped = strip_timing(line);
  CHECK(stripped.find("timing") == std::string::npos);
  EvalReport other = r;
  other.train_seconds = 99.0;
  other.inference_latency->median = 1.0;
  CHECK(strip_timing(to_json_line(other)) == stripped);
  other.eer = 0.5;
  CHECK(strip_timing(to_json_line(other)) != stripped);

  EvalReport failed = r;
  failed.failed = true;
  failed.error = "boom";
  failed.accuracy.reset();
  failed.macro_f1.reset();
  failed.eer.reset();
  failed.threshold_at_eer.reset();
  failed.fit_indices = std::vector<std::size_t>{1, 4};
  const std::string fline = to_json_line(failed);
  CHECK(fline.find("\"status\":\"failed\"") != std::string::npos);
  CHECK(fline.find("\"eer\":null") != std::string::npos);
  const EvalReport fback = from_json_line(fline);
  CHECK(fback.failed);
  CHECK(fback.error == "boom");
  CHECK_FALSE(fback.eer);
  CHECK(fback.fit_indices == failed.fit_indices);

  std::stringstream buf;
  write_reports({r, failed}, buf);
  const auto all = read_reports(buf);
  REQUIRE(all.size() == 2);
  CHECK(to_json_line(all[1]) == fline);

  CHECK_THROWS_AS(from_json_line("not json"), FormatError);
  CHECK_THROWS_AS(from_json_line("{\"reducer\": 3}"), FormatError);
}

TEST_CASE("aggregation and formatting") {
  CHECK(format_percent(0.9821) == "98.21");
  CHECK(format_percent(0.02) == "2.00");
  CHECK(format_percent(1.0) == "100.00");

  std::vector<EvalReport> reports;
  for (std::size_t f = 0; f < 5; ++f) {
    EvalReport r = sample_report();
    r.fold = f;
    r.eer = 0.02;
    reports.push_back(r);
  }
  EvalReport ident = sample_report();
  ident.reducer = "identity";
  ident.percentage = 1.0;
  reports.push_back(ident);
  EvalReport broken = sample_report();
  broken.fold = 5;
  broken.failed = true;
  broken.eer.reset();
  broken.accuracy.reset();
  broken.macro_f1.reset();
  reports.push_back(broken);

  const auto rows = aggregate(reports);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].reducer == "identity");
  const SummaryRow& pca = rows[1];
  CHECK(pca.reducer == "pca");
  CHECK(pca.folds == 6);
  CHECK(pca.failed == 1);
  CHECK(pca.eer.n == 5);
  CHECK(pca.eer.mean == doctest::Approx(0.02));
  CHECK(pca.eer.std == 0.0);
  CHECK(format_percent(pca.eer.mean) == "2.00");
  CHECK(pca.accuracy.mean == doctest::Approx(0.9821));
  CHECK(pca.param_count == 4641);

  SummaryRow cell;
  cell.accuracy.mean = 0.9821;
  cell.macro_f1.mean = 0.9698;
  cell.eer.mean = 0.0192;
  CHECK(format_table_cell(cell) == "98.21 / 96.98 / 1.92");

  const auto ms = mean_std({1.0, 2.0, 3.0, 4.0});
  CHECK(ms.mean == 2.5);
  CHECK(ms.std == doctest::Approx(std::sqrt(5.0 / 3.0)));
  CHECK(mean_std({3.0}).std == 0.0);
  CHECK(mean_std({}).n == 0);
  CHECK_THROWS_AS(aggregate({}), DataError);

  std::stringstream csv;
  write_summary_csv(rows, csv);
  CHECK(count_lines(csv.str()) == 3);
}

TEST_CASE("plots: one point per percentage, exact values, stable bytes") {
  std::vector<SummaryRow> rows;
  for (const char* reducer : {"random_select", "pca"}) {
    for (int i = 1; i <= 9; ++i) {
      SummaryRow r;
      r.reducer = reducer;
      r.arch = "fcn";
      r.percentage = i / 10.0;
      r.output_dim = static_cast<std::size_t>(std::lround(r.percentage * 768));
      nn::ArchSpec arch;
      arch.input_dim = r.output_dim;
      r.param_count = nn::count_params(arch);
      r.folds = 5;
      r.eer = {0.01 * i, 0.0, 5};
      r.accuracy = {1.0 - 0.01 * i, 0.0, 5};
      r.macro_f1 = {1.0 - 0.02 * i, 0.0, 5};
      r.latency_median = {1e-4 * i, 0.0, 5};
      rows.push_back(r);
    }
  }
  const auto a = scratch_dir("plots_a");
  const auto b = scratch_dir("plots_b");
  const auto files = emit_plots(rows, a);
  emit_plots(rows, b);
  CHECK(files.size() == 10);
  for (const auto& f : files) {
    CHECK(fs::exists(f));
    CHECK(slurp(f) == slurp(b / f.filename()));
  }

  const std::string eer = slurp(a / "eer_fcn.csv");
  CHECK(count_lines(eer) == 10);
  std::istringstream lines(eer);
  std::string header;
  std::getline(lines, header);
  CHECK(header == "percentage,random_select,pca");
  std::string row;
  std::getline(lines, row);
  CHECK(row == "10,1,1");
  for (int i = 2; i <= 9; ++i) std::getline(lines, row);
  CHECK(row == "90,9,9");

  std::istringstream params(slurp(a / "params_fcn.csv"));
  std::getline(params, header);
  CHECK(header == "percentage,param_count");
  for (int i = 1; i <= 9; ++i) {
    std::getline(params, row);
    const auto comma = row.find(',');
    nn::ArchSpec arch;
    arch.input_dim = static_cast<std::size_t>(std::lround(i / 10.0 * 768));
    CHECK(std::stod(row.substr(comma + 1)) == double(nn::count_params(arch)));
  }
  const std::string latency = slurp(a / "latency_fcn.csv");
  CHECK(latency.find("\n10,0.1,0.1\n") != std::string::npos);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("sweep: grid, order, failures and provenance") {
  ExperimentConfig cfg = tiny_config();
  cfg.record_fit_indices = true;
  const auto ds = materialize_dataset(cfg);
  std::vector<EvalReport> streamed;
  SweepOptions opts;
  opts.sink = [&](const EvalReport& r) { streamed.push_back(r); };
  const auto reports = run_sweep(cfg, ds, opts);

  REQUIRE(reports.size() == cfg.grid_size());
  CHECK(reports.size() == 5 * 3 * 2 * 2);
  REQUIRE(streamed.size() == reports.size());
  const auto plan = store::plan_folds(ds, cfg.n_folds, cfg.master_seed, cfg.stratified);
  const auto pct = cfg.sweep_percentages();
  std::size_t i = 0;
  for (std::size_t f = 0; f < cfg.n_folds; ++f) {
    for (auto kind : cfg.reducers) {
      for (double p : pct) {
        for (auto arch : cfg.archs) {
          const EvalReport& r = reports[i];
          CHECK(to_json_line(streamed[i]) == to_json_line(r));
          CHECK(r.fold == f);
          CHECK(r.reducer == reduce::to_string(kind));
          CHECK(r.percentage == p);
          CHECK(r.arch == nn::to_string(arch));
          CHECK(r.output_dim == reduce::target_dim(p, 16));
          CHECK(r.selection_seed == cfg.master_seed + f);
          CHECK(r.fit_within_train);
          REQUIRE(r.fit_indices);
          CHECK(r.fit_indices->size() == r.fit_row_count);
          for (auto row : *r.fit_indices) CHECK(plan.assignments[row] != f);
          // A 4-wide input cannot pass three pooling stages.
          const bool too_short = arch == nn::ArchKind::kCnn && r.output_dim < 8;
          CHECK(r.failed == too_short);
          if (r.failed) {
            CHECK_FALSE(r.eer);
            CHECK_FALSE(r.error.empty());
          } else {
            CHECK(r.eer);
            CHECK(r.inference_latency);
            CHECK(r.transform_latency);
            CHECK(r.epochs_run >= 1);
          }
          ++i;
        }
      }
    }
  }
}

TEST_CASE("sweep: random selection at 100% matches the untouched baseline") {
  ExperimentConfig cfg = tiny_config();
  cfg.reducers = {reduce::ReducerKind::kIdentity, reduce::ReducerKind::kRandomSelect};
  cfg.percentages = {};
  cfg.timing.enabled = false;
  const auto reports = run_sweep(cfg);
  REQUIRE(reports.size() == 2 * 2 * 2);
  for (std::size_t f = 0; f < 2; ++f) {
    for (std::size_t a = 0; a < 2; ++a) {
      const EvalReport& base = reports[f * 4 + a];
      const EvalReport& sel = reports[f * 4 + 2 + a];
      CHECK(base.reducer == "identity");
      CHECK(sel.reducer == "random_select");
      CHECK(base.arch == sel.arch);
      REQUIRE(base.eer);
      CHECK(sel.eer == base.eer);
      CHECK(sel.accuracy == base.accuracy);
      CHECK(sel.macro_f1 == base.macro_f1);
      CHECK(sel.threshold_at_eer == base.threshold_at_eer);
    }
  }
}

TEST_CASE("sweep: deterministic across runs and worker counts") {
  ExperimentConfig cfg = tiny_config();
  cfg.reducers = {reduce::ReducerKind::kRandomSelect, reduce::ReducerKind::kKpca,
                  reduce::ReducerKind::kGrp};
  const auto first = run_sweep(cfg);
  cfg.workers = 2;
  const auto second = run_sweep(cfg);
  REQUIRE(first.size() == second.size());
  for (std::size_t i = 0; i < first.size(); ++i) {
    CHECK(strip_timing(to_json_line(first[i])) == strip_timing(to_json_line(second[i])));
  }
}

TEST_CASE("sweep: seeds depend on fold and arch only") {
  CHECK(init_seed(1, 0, nn::ArchKind::kFcn) == init_seed(1, 0, nn::ArchKind::kFcn));
  CHECK(init_seed(1, 0, nn::ArchKind::kFcn) != init_seed(1, 1, nn::ArchKind::kFcn));
  CHECK(init_seed(1, 0, nn::ArchKind::kFcn) != init_seed(1, 0, nn::ArchKind::kCnn));
  CHECK(init_seed(1, 0, nn::ArchKind::kFcn) != train_seed(1, 0, nn::ArchKind::kFcn));
  CHECK(init_seed(1, 0, nn::ArchKind::kFcn) != init_seed(2, 0, nn::ArchKind::kFcn));
}

TEST_CASE("sweep: invalid plans are rejected up front") {
  ExperimentConfig cfg = tiny_config();
  cfg.n_folds = 50;  // more folds than samples per class
  CHECK_THROWS_AS(run_sweep(cfg), ConfigError);
  cfg = tiny_config();
  cfg.workers = 0;
  CHECK_THROWS_AS(run_sweep(cfg), ConfigError);
}
