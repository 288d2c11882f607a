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

#include "repsel/bench/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include "json.hpp"
#include "repsel/error.hpp"

namespace repsel::bench {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const char* where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(std::string(where) + " must be a JSON object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& item : obj.items()) {
    if (!ok.count(item.key())) {
      throw ConfigError("unknown key '" + item.key() + "' in " + where);
    }
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("bad value for '") + key + "'");
  }
}

store::SyntheticSpec parse_synthetic(const json& j) {
  check_keys(j, "synthetic", {"n_per_class", "dim", "n_informative", "redundancy_factor",
                              "noise_sigma", "class_shift", "seed", "name"});
  store::SyntheticSpec s;
  read(j, "n_per_class", s.n_per_class);
  read(j, "dim", s.dim);
  read(j, "n_informative", s.n_informative);
  read(j, "redundancy_factor", s.redundancy_factor);
  read(j, "noise_sigma", s.noise_sigma);
  read(j, "class_shift", s.class_shift);
  read(j, "seed", s.seed);
  read(j, "name", s.name);
  return s;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (dataset_path.has_value() == synthetic.has_value()) {
    throw ConfigError("exactly one of a dataset path and a synthetic spec is required");
  }
  if (reducers.empty()) throw ConfigError("reducer list is empty");
  if (archs.empty()) throw ConfigError("arch list is empty");
  if (percentages.empty() && !include_baseline) throw ConfigError("percentage list is empty");
  for (double p : percentages) {
    if (!(p > 0.0 && p <= 1.0)) throw ConfigError("percentages must lie in (0, 1]");
  }
  if (n_folds < 2) throw ConfigError("n_folds must be >= 2");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  if (hidden < 1) throw ConfigError("hidden must be >= 1");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) throw ConfigError("dropout must be in [0, 1)");
  if (timing.enabled && timing.runs < 1) throw ConfigError("timing runs must be >= 1");
  if (kpca_gamma && !(*kpca_gamma > 0.0)) throw ConfigError("kpca gamma must be positive");
  if (kpca_max_fit_rows < 2) throw ConfigError("kpca max_fit_rows must be >= 2");
  train.validate();
}

std::vector<double> ExperimentConfig::sweep_percentages() const {
  std::vector<double> out = percentages;
  if (include_baseline && std::find(out.begin(), out.end(), 1.0) == out.end()) {
    out.push_back(1.0);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::size_t ExperimentConfig::grid_size() const {
  return reducers.size() * sweep_percentages().size() * archs.size() * n_folds;
}

ExperimentConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(j, "config", {"dataset", "reducers", "percentages", "include_baseline", "archs",
                           "n_folds", "stratified", "master_seed", "train", "model", "timing",
                           "kpca", "workers", "record_fit_indices"});
  ExperimentConfig cfg;

  if (!j.contains("dataset")) throw ConfigError("config needs a 'dataset'");
  const json& ds = j.at("dataset");
  if (ds.is_string()) {
    std::filesystem::path p = ds.get<std::string>();
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    cfg.dataset_path = p;
  } else if (ds.is_object()) {
    check_keys(ds, "dataset", {"synthetic"});
    if (!ds.contains("synthetic")) throw ConfigError("dataset object needs 'synthetic'");
    cfg.synthetic = parse_synthetic(ds.at("synthetic"));
  } else {
    throw ConfigError("'dataset' must be a path or {\"synthetic\": {...}}");
  }

  if (j.contains("reducers")) {
    std::vector<std::string> names;
    read(j, "reducers", names);
    cfg.reducers.clear();
    for (const auto& n : names) cfg.reducers.push_back(reduce::parse_reducer_kind(n));
  }
  if (j.contains("archs")) {
    std::vector<std::string> names;
    read(j, "archs", names);
    cfg.archs.clear();
    for (const auto& n : names) cfg.archs.push_back(nn::parse_arch_kind(n));
  }
  read(j, "percentages", cfg.percentages);
  read(j, "include_baseline", cfg.include_baseline);
  read(j, "n_folds", cfg.n_folds);
  read(j, "stratified", cfg.stratified);
  read(j, "master_seed", cfg.master_seed);
  read(j, "workers", cfg.workers);
  read(j, "record_fit_indices", cfg.record_fit_indices);

  if (j.contains("train")) {
    const json& t = j.at("train");
    check_keys(t, "train", {"epochs", "learning_rate", "batch_size", "patience", "val_fraction",
                            "class_weighting", "adam"});
    read(t, "epochs", cfg.train.epochs);
    read(t, "learning_rate", cfg.train.learning_rate);
    read(t, "batch_size", cfg.train.batch_size);
    read(t, "patience", cfg.train.patience);
    read(t, "val_fraction", cfg.train.val_fraction);
    read(t, "class_weighting", cfg.train.class_weighting);
    if (t.contains("adam")) {
      const json& a = t.at("adam");
      check_keys(a, "adam", {"beta1", "beta2", "eps"});
      read(a, "beta1", cfg.train.adam.beta1);
      read(a, "beta2", cfg.train.adam.beta2);
      read(a, "eps", cfg.train.adam.eps);
    }
  }
  if (j.contains("model")) {
    const json& m = j.at("model");
    check_keys(m, "model", {"hidden", "dropout"});
    read(m, "hidden", cfg.hidden);
    read(m, "dropout", cfg.dropout_rate);
  }
  if (j.contains("timing")) {
    const json& t = j.at("timing");
    check_keys(t, "timing", {"enabled", "warmup", "runs"});
    read(t, "enabled", cfg.timing.enabled);
    read(t, "warmup", cfg.timing.warmup);
    read(t, "runs", cfg.timing.runs);
  }
  if (j.contains("kpca")) {
    const json& k = j.at("kpca");
    check_keys(k, "kpca", {"gamma", "kernel", "max_fit_rows"});
    if (k.contains("gamma") && !k.at("gamma").is_null()) {
      double g = 0.0;
      read(k, "gamma", g);
      cfg.kpca_gamma = g;
    }
    if (k.contains("kernel")) {
      std::string name;
      read(k, "kernel", name);
      if (name == "rbf") cfg.kpca_kernel = reduce::KernelKind::kRbf;
      else if (name == "linear") cfg.kpca_kernel = reduce::KernelKind::kLinear;
      else throw ConfigError("unknown kpca kernel '" + name + "'");
    }
    read(k, "max_fit_rows", cfg.kpca_max_fit_rows);
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path());
}

store::EmbeddingDataset materialize_dataset(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.synthetic) return store::gen_synthetic(*cfg.synthetic);
  return store::load_dataset(*cfg.dataset_path);
}

}  // namespace repsel::bench
