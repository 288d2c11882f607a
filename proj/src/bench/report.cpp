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

#include "repsel/bench/report.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "json.hpp"
#include "repsel/error.hpp"

namespace repsel::bench {

namespace {

using Json = nlohmann::ordered_json;

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::optional<double> read_optional(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

Json latency_json(const std::optional<LatencyStats>& s) {
  if (!s) return nullptr;
  return Json{{"median", s->median}, {"p10", s->p10}, {"p90", s->p90}, {"runs", s->runs}};
}

std::optional<LatencyStats> read_latency(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  const Json& o = j.at(key);
  LatencyStats s;
  s.median = o.at("median").get<double>();
  s.p10 = o.at("p10").get<double>();
  s.p90 = o.at("p90").get<double>();
  s.runs = o.at("runs").get<std::size_t>();
  return s;
}

}  // namespace

std::string to_json_line(const EvalReport& r) {
  Json j;
  j["dataset"] = r.dataset;
  j["reducer"] = r.reducer;
  j["percentage"] = r.percentage;
  j["arch"] = r.arch;
  j["fold"] = r.fold;
  j["selection_seed"] = r.selection_seed;
  j["input_dim"] = r.input_dim;
  j["output_dim"] = r.output_dim;
  j["status"] = r.failed ? "failed" : "ok";
  if (r.failed) j["error"] = r.error;
  j["accuracy"] = optional_number(r.accuracy);
  j["macro_f1"] = optional_number(r.macro_f1);
  j["eer"] = optional_number(r.eer);
  j["threshold_at_eer"] = optional_number(r.threshold_at_eer);
  j["param_count"] = r.param_count;
  j["epochs_run"] = r.epochs_run;
  j["fit_row_count"] = r.fit_row_count;
  j["fit_within_train"] = r.fit_within_train;
  if (r.fit_indices) j["fit_indices"] = *r.fit_indices;
  j["timing"] = Json{{"inference_latency", latency_json(r.inference_latency)},
                     {"transform_latency", latency_json(r.transform_latency)},
                     {"train_seconds", r.train_seconds}};
  return j.dump();
}

EvalReport from_json_line(const std::string& line) {
  Json j;
  try {
    j = Json::parse(line);
  } catch (const Json::parse_error& e) {
    throw FormatError(std::string("report line is not JSON: ") + e.what());
  }
  try {
    EvalReport r;
    r.dataset = j.at("dataset").get<std::string>();
    r.reducer = j.at("reducer").get<std::string>();
    r.percentage = j.at("percentage").get<double>();
    r.arch = j.at("arch").get<std::string>();
    r.fold = j.at("fold").get<std::size_t>();
    r.selection_seed = j.at("selection_seed").get<std::uint64_t>();
    r.input_dim = j.at("input_dim").get<std::size_t>();
    r.output_dim = j.at("output_dim").get<std::size_t>();
    r.failed = j.at("status").get<std::string>() != "ok";
    if (j.contains("error")) r.error = j.at("error").get<std::string>();
    r.accuracy = read_optional(j, "accuracy");
    r.macro_f1 = read_optional(j, "macro_f1");
    r.eer = read_optional(j, "eer");
    r.threshold_at_eer = read_optional(j, "threshold_at_eer");
    r.param_count = j.at("param_count").get<std::size_t>();
    r.epochs_run = j.at("epochs_run").get<std::size_t>();
    r.fit_row_count = j.at("fit_row_count").get<std::size_t>();
    r.fit_within_train = j.at("fit_within_train").get<bool>();
    if (j.contains("fit_indices")) r.fit_indices = j.at("fit_indices").get<std::vector<std::size_t>>();
    if (j.contains("timing")) {
      const Json& t = j.at("timing");
      r.inference_latency = read_latency(t, "inference_latency");
      r.transform_latency = read_latency(t, "transform_latency");
      if (t.contains("train_seconds")) r.train_seconds = t.at("train_seconds").get<double>();
    }
    return r;
  } catch (const Json::exception& e) {
    throw FormatError(std::string("malformed report record: ") + e.what());
  }
}

std::string strip_timing(const std::string& line) {
  Json j = Json::parse(line);
  j.erase("timing");
  return j.dump();
}

void write_reports(const std::vector<EvalReport>& reports, std::ostream& out) {
  for (const auto& r : reports) out << to_json_line(r) << '\n';
}

std::vector<EvalReport> read_reports(std::istream& in) {
  std::vector<EvalReport> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(from_json_line(line));
  }
  return out;
}

std::vector<EvalReport> read_reports(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open reports " + path.string());
  return read_reports(in);
}

}  // namespace repsel::bench
