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

#include "repsel/bench/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <thread>

#include "repsel/error.hpp"
#include "repsel/metrics/scores.hpp"
#include "repsel/nn/model.hpp"
#include "repsel/nn/train.hpp"
#include "repsel/rng.hpp"
#include "repsel/store/folds.hpp"

namespace repsel::bench {

namespace {

constexpr std::uint64_t kInitStream = 0x494E4954;
constexpr std::uint64_t kTrainStream = 0x5452414E;

struct Job {
  std::size_t fold;
  reduce::ReducerKind reducer;
};

bool spectral(reduce::ReducerKind kind) {
  return kind == reduce::ReducerKind::kPca || kind == reduce::ReducerKind::kSvd ||
         kind == reduce::ReducerKind::kKpca;
}

// Fits one reducer per percentage. Spectral reducers are fitted once at the
// largest output width and truncated, which gives the same parameters as a
// direct fit at each width.
std::vector<std::optional<reduce::FittedReducer>> fit_reducers(
    const ExperimentConfig& cfg, const Job& job, std::uint64_t selection_seed,
    const std::vector<double>& percentages, const MatrixD& train_x,
    const store::EmbeddingDataset& train_ds, std::vector<std::string>& errors) {
  const std::size_t d = train_ds.dim();
  std::vector<std::optional<reduce::FittedReducer>> out(percentages.size());
  errors.assign(percentages.size(), {});

  reduce::ReducerSpec spec;
  spec.kind = job.reducer;
  spec.seed = selection_seed;
  spec.gamma = cfg.kpca_gamma;
  spec.kernel = cfg.kpca_kernel;
  spec.max_fit_rows = cfg.kpca_max_fit_rows;

  if (spectral(job.reducer)) {
    try {
      spec.percentage = percentages.back();
      const reduce::FittedReducer base = reduce::fit(spec, train_x);
      for (std::size_t i = 0; i < percentages.size(); ++i) {
        const std::size_t k = reduce::target_dim(percentages[i], d);
        out[i] = k == base.output_dim() ? base : base.truncated(k);
      }
    } catch (const std::exception& e) {
      errors.assign(percentages.size(), e.what());
      out.assign(percentages.size(), std::nullopt);
    }
    return out;
  }
  for (std::size_t i = 0; i < percentages.size(); ++i) {
    try {
      spec.percentage = percentages[i];
      out[i] = reduce::fit(spec, train_ds);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  return out;
}

std::vector<EvalReport> run_job(const ExperimentConfig& cfg, const store::EmbeddingDataset& ds,
                                const store::FoldPlan& plan, const Job& job) {
  const auto percentages = cfg.sweep_percentages();
  const auto train_idx = plan.train_indices(job.fold);
  const auto eval_idx = plan.eval_indices(job.fold);
  const store::EmbeddingDataset train_ds = ds.subset(train_idx);
  const store::EmbeddingDataset eval_ds = ds.subset(eval_idx);
  const std::uint64_t selection_seed = plan.selection_seeds[job.fold];

  MatrixD train_x;
  if (spectral(job.reducer)) train_x = train_ds.samples().cast<double>();

  std::vector<std::string> fit_errors;
  const auto reducers =
      fit_reducers(cfg, job, selection_seed, percentages, train_x, train_ds, fit_errors);

  std::vector<EvalReport> reports;
  for (std::size_t pi = 0; pi < percentages.size(); ++pi) {
    const double p = percentages[pi];
    EvalReport base;
    base.dataset = ds.name();
    base.reducer = std::string(reduce::to_string(job.reducer));
    base.percentage = p;
    base.fold = job.fold;
    base.selection_seed = selection_seed;
    base.input_dim = ds.dim();
    base.output_dim = reduce::target_dim(p, ds.dim());

    std::optional<store::EmbeddingDataset> train_red;
    std::optional<store::EmbeddingDataset> eval_red;
    std::string prep_error = fit_errors[pi];
    if (reducers[pi]) {
      const auto& r = *reducers[pi];
      base.output_dim = r.output_dim();  // identity keeps every column
      base.fit_row_count = r.fit_rows().size();
      std::vector<std::size_t> fit_global;
      fit_global.reserve(r.fit_rows().size());
      for (auto row : r.fit_rows()) {
        if (row >= train_idx.size()) {
          base.fit_within_train = false;
          continue;
        }
        fit_global.push_back(train_idx[row]);
      }
      for (auto g : fit_global) {
        if (plan.assignments[g] == job.fold) base.fit_within_train = false;
      }
      if (cfg.record_fit_indices) {
        std::sort(fit_global.begin(), fit_global.end());
        base.fit_indices = std::move(fit_global);
      }
      try {
        train_red = r.transform(train_ds);
        eval_red = r.transform(eval_ds);
      } catch (const std::exception& e) {
        prep_error = e.what();
      }
    }

    for (auto arch_kind : cfg.archs) {
      EvalReport rep = base;
      rep.arch = std::string(nn::to_string(arch_kind));
      nn::ArchSpec arch;
      arch.kind = arch_kind;
      arch.input_dim = rep.output_dim;
      arch.hidden = cfg.hidden;
      arch.dropout_rate = cfg.dropout_rate;
      try {
        rep.param_count = nn::count_params(arch);
      } catch (const std::exception&) {
        rep.param_count = 0;
      }
      if (!train_red) {
        rep.failed = true;
        rep.error = prep_error.empty() ? "reducer unavailable" : prep_error;
        reports.push_back(std::move(rep));
        continue;
      }
      try {
        arch.validate();
        nn::TrainConfig tcfg = cfg.train;
        tcfg.seed = train_seed(cfg.master_seed, job.fold, arch_kind);
        auto model = nn::build(arch, init_seed(cfg.master_seed, job.fold, arch_kind));

        const auto t0 = std::chrono::steady_clock::now();
        auto trained = nn::train(std::move(model), *train_red, tcfg);
        rep.train_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        rep.epochs_run = trained.trained_epochs;

        metrics::ScoredSet scored{nn::predict(trained, eval_red->samples()), eval_red->labels()};
        const auto m = metrics::evaluate(scored);
        rep.accuracy = m.accuracy;
        rep.macro_f1 = m.macro_f1;
        rep.eer = m.eer;
        rep.threshold_at_eer = m.threshold_at_eer;

        if (cfg.timing.enabled) {
          const FeatureMatrix& raw = eval_ds.samples();
          const FeatureMatrix& red = eval_red->samples();
          const std::span<const float> raw_row(raw.data(), raw.cols());
          const std::span<const float> red_row(red.data(), red.cols());
          rep.inference_latency =
              measure_inference(trained, red_row, cfg.timing.warmup, cfg.timing.runs);
          rep.transform_latency =
              measure_transform(*reducers[pi], raw_row, cfg.timing.warmup, cfg.timing.runs);
        }
      } catch (const std::exception& e) {
        rep.failed = true;
        rep.error = e.what();
        rep.accuracy.reset();
        rep.macro_f1.reset();
        rep.eer.reset();
        rep.threshold_at_eer.reset();
        rep.inference_latency.reset();
        rep.transform_latency.reset();
      }
      reports.push_back(std::move(rep));
    }
  }
  return reports;
}

}  // namespace

std::uint64_t init_seed(std::uint64_t master_seed, std::size_t fold, nn::ArchKind arch) {
  return derive_seed({master_seed, fold, static_cast<std::uint64_t>(arch), kInitStream});
}

std::uint64_t train_seed(std::uint64_t master_seed, std::size_t fold, nn::ArchKind arch) {
  return derive_seed({master_seed, fold, static_cast<std::uint64_t>(arch), kTrainStream});
}

std::vector<EvalReport> run_sweep(const ExperimentConfig& cfg, const store::EmbeddingDataset& ds,
                                  const SweepOptions& options) {
  cfg.validate();
  ds.require_trainable("sweep");
  const store::FoldPlan plan = store::plan_folds(ds, cfg.n_folds, cfg.master_seed, cfg.stratified);

  std::vector<Job> jobs;
  for (std::size_t f = 0; f < cfg.n_folds; ++f) {
    for (auto kind : cfg.reducers) jobs.push_back({f, kind});
  }

  // Finished jobs are parked until every earlier job is out, so the sink
  // sees grid order regardless of completion order.
  std::vector<std::optional<std::vector<EvalReport>>> done(jobs.size());
  std::vector<EvalReport> all;
  all.reserve(cfg.grid_size());
  std::size_t next_emit = 0;
  std::mutex mu;
  std::atomic<std::size_t> next_job{0};

  auto finish = [&](std::size_t j, std::vector<EvalReport> reports) {
    std::lock_guard<std::mutex> lock(mu);
    if (options.progress) {
      std::size_t failed = 0;
      for (const auto& r : reports) failed += r.failed ? 1 : 0;
      *options.progress << "fold " << jobs[j].fold << " " << reduce::to_string(jobs[j].reducer)
                        << ": " << reports.size() << " cells, " << failed << " failed"
                        << std::endl;
    }
    done[j] = std::move(reports);
    while (next_emit < jobs.size() && done[next_emit]) {
      for (auto& r : *done[next_emit]) {
        if (options.sink) options.sink(r);
        all.push_back(std::move(r));
      }
      done[next_emit].reset();
      ++next_emit;
    }
  };

  auto worker = [&] {
    for (std::size_t j = next_job++; j < jobs.size(); j = next_job++) {
      finish(j, run_job(cfg, ds, plan, jobs[j]));
    }
  };

  const std::size_t n_threads = std::min(cfg.workers, jobs.size());
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  return all;
}

std::vector<EvalReport> run_sweep(const ExperimentConfig& cfg, const SweepOptions& options) {
  return run_sweep(cfg, materialize_dataset(cfg), options);
}

}  // namespace repsel::bench
