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

#include "repsel/bench/summary.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <tuple>

#include "repsel/error.hpp"

namespace repsel::bench {

namespace {

int reducer_rank(const std::string& name) {
  static const char* const kOrder[] = {"identity", "random_select", "pca", "svd", "kpca", "grp"};
  for (int i = 0; i < 6; ++i) {
    if (name == kOrder[i]) return i;
  }
  return 6;
}

int arch_rank(const std::string& name) {
  if (name == "fcn") return 0;
  if (name == "cnn") return 1;
  return 2;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

// Percent label for an x value: 0.1 -> "10".
std::string pct_label(double p) { return fmt("%g", p * 100.0); }

struct Series {
  std::string name;
  std::vector<std::optional<double>> values;
};

struct Figure {
  std::string stem;
  std::string title;
  std::string y_label;
  std::vector<double> xs;
  std::vector<Series> series;
  bool bars = false;
};

void write_csv(const Figure& fig, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "percentage";
  for (const auto& s : fig.series) out << ',' << s.name;
  out << '\n';
  for (std::size_t i = 0; i < fig.xs.size(); ++i) {
    out << pct_label(fig.xs[i]);
    for (const auto& s : fig.series) {
      out << ',';
      if (s.values[i]) out << fmt("%.6g", *s.values[i]);
    }
    out << '\n';
  }
}

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                "#ff7f0e", "#8c564b", "#17becf"};

void write_svg(const Figure& fig, const std::filesystem::path& path) {
  constexpr double kW = 640, kH = 400, kLeft = 70, kRight = 150, kTop = 40, kBottom = 50;
  const double pw = kW - kLeft - kRight;
  const double ph = kH - kTop - kBottom;

  double y_min = std::numeric_limits<double>::infinity();
  double y_max = -std::numeric_limits<double>::infinity();
  for (const auto& s : fig.series) {
    for (const auto& v : s.values) {
      if (!v) continue;
      y_min = std::min(y_min, *v);
      y_max = std::max(y_max, *v);
    }
  }
  if (!std::isfinite(y_min)) {
    y_min = 0;
    y_max = 1;
  }
  if (fig.bars) y_min = std::min(y_min, 0.0);
  if (y_max - y_min < 1e-12) {
    y_max += 0.5;
    y_min -= 0.5;
  }
  const double pad = 0.05 * (y_max - y_min);
  if (!fig.bars) y_min -= pad;
  y_max += pad;

  const std::size_t nx = fig.xs.size();
  auto x_of = [&](std::size_t i) { return kLeft + pw * (static_cast<double>(i) + 0.5) / nx; };
  auto y_of = [&](double v) { return kTop + ph * (1.0 - (v - y_min) / (y_max - y_min)); };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
    << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << kW / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
    << fig.title << "</text>\n";
  o << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + ph << "\" x2=\"" << kLeft + pw
    << "\" y2=\"" << kTop + ph << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
    << kTop + ph << "\" stroke=\"black\"/>\n";

  for (int t = 0; t <= 4; ++t) {
    const double v = y_min + (y_max - y_min) * t / 4.0;
    const std::string y = fmt("%.2f", y_of(v));
    o << "<line x1=\"" << kLeft - 4 << "\" y1=\"" << y << "\" x2=\"" << kLeft << "\" y2=\"" << y
      << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << kLeft - 6 << "\" y=\"" << y
      << "\" text-anchor=\"end\" dominant-baseline=\"middle\">" << fmt("%.4g", v) << "</text>\n";
  }
  for (std::size_t i = 0; i < nx; ++i) {
    o << "<text x=\"" << fmt("%.2f", x_of(i)) << "\" y=\"" << kTop + ph + 16
      << "\" text-anchor=\"middle\">" << pct_label(fig.xs[i]) << "</text>\n";
  }
  o << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kH - 10
    << "\" text-anchor=\"middle\">percentage of representation values (%)</text>\n";
  o << "<text transform=\"translate(16 " << kTop + ph / 2
    << ") rotate(-90)\" text-anchor=\"middle\">" << fig.y_label << "</text>\n";

  const double slot = pw / static_cast<double>(std::max<std::size_t>(nx, 1));
  const double bar_w = 0.8 * slot / static_cast<double>(std::max<std::size_t>(fig.series.size(), 1));
  for (std::size_t si = 0; si < fig.series.size(); ++si) {
    const auto& s = fig.series[si];
    const char* color = kPalette[si % 7];
    if (fig.bars) {
      for (std::size_t i = 0; i < nx; ++i) {
        if (!s.values[i]) continue;
        const double x0 = x_of(i) - 0.4 * slot + bar_w * si;
        const double y0 = y_of(*s.values[i]);
        o << "<rect x=\"" << fmt("%.2f", x0) << "\" y=\"" << fmt("%.2f", y0) << "\" width=\""
          << fmt("%.2f", bar_w) << "\" height=\"" << fmt("%.2f", y_of(y_min) - y0)
          << "\" fill=\"" << color << "\"/>\n";
      }
    } else {
      std::string points;
      for (std::size_t i = 0; i < nx; ++i) {
        if (!s.values[i]) continue;
        if (!points.empty()) points += ' ';
        points += fmt("%.2f", x_of(i)) + "," + fmt("%.2f", y_of(*s.values[i]));
      }
      if (!points.empty()) {
        o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\""
          << points << "\"/>\n";
      }
      for (std::size_t i = 0; i < nx; ++i) {
        if (!s.values[i]) continue;
        o << "<circle cx=\"" << fmt("%.2f", x_of(i)) << "\" cy=\"" << fmt("%.2f", y_of(*s.values[i]))
          << "\" r=\"3\" fill=\"" << color << "\"/>\n";
      }
    }
    const double ly = kTop + 14.0 * static_cast<double>(si);
    o << "<rect x=\"" << kLeft + pw + 12 << "\" y=\"" << fmt("%.2f", ly) << "\" width=\"10\" height=\"10\" fill=\""
      << color << "\"/>\n";
    o << "<text x=\"" << kLeft + pw + 26 << "\" y=\"" << fmt("%.2f", ly + 9) << "\">" << s.name
      << "</text>\n";
  }
  o << "</svg>\n";

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << o.str();
}

}  // namespace

MeanStd mean_std(const std::vector<double>& values) {
  MeanStd m;
  m.n = values.size();
  if (values.empty()) {
    m.mean = std::numeric_limits<double>::quiet_NaN();
    m.std = std::numeric_limits<double>::quiet_NaN();
    return m;
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  m.mean = sum / static_cast<double>(values.size());
  if (values.size() < 2) return m;
  double ss = 0.0;
  for (double v : values) ss += (v - m.mean) * (v - m.mean);
  m.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  return m;
}

std::vector<SummaryRow> aggregate(const std::vector<EvalReport>& reports) {
  if (reports.empty()) throw DataError("nothing to aggregate");
  using Key = std::tuple<int, std::string, int, std::string, double>;
  std::map<Key, std::vector<const EvalReport*>> groups;
  for (const auto& r : reports) {
    groups[{reducer_rank(r.reducer), r.reducer, arch_rank(r.arch), r.arch, r.percentage}]
        .push_back(&r);
  }
  std::vector<SummaryRow> rows;
  for (const auto& [key, group] : groups) {
    SummaryRow row;
    row.reducer = std::get<1>(key);
    row.arch = std::get<3>(key);
    row.percentage = std::get<4>(key);
    row.output_dim = group.front()->output_dim;
    row.param_count = group.front()->param_count;
    row.folds = group.size();
    std::vector<double> acc, f1, eer, lat, tlat, secs;
    for (const EvalReport* r : group) {
      if (r->failed) {
        ++row.failed;
        continue;
      }
      if (r->accuracy) acc.push_back(*r->accuracy);
      if (r->macro_f1) f1.push_back(*r->macro_f1);
      if (r->eer) eer.push_back(*r->eer);
      if (r->inference_latency) lat.push_back(r->inference_latency->median);
      if (r->transform_latency) tlat.push_back(r->transform_latency->median);
      secs.push_back(r->train_seconds);
    }
    row.accuracy = mean_std(acc);
    row.macro_f1 = mean_std(f1);
    row.eer = mean_std(eer);
    row.latency_median = mean_std(lat);
    row.transform_latency_median = mean_std(tlat);
    row.train_seconds = mean_std(secs);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string format_percent(double fraction) {
  if (!std::isfinite(fraction)) return "nan";
  return fmt("%.2f", fraction * 100.0);
}

std::string format_table_cell(const SummaryRow& row) {
  return format_percent(row.accuracy.mean) + " / " + format_percent(row.macro_f1.mean) + " / " +
         format_percent(row.eer.mean);
}

void write_summary_csv(const std::vector<SummaryRow>& rows, std::ostream& out) {
  auto num = [](double v, const char* f) { return std::isfinite(v) ? fmt(f, v) : std::string(); };
  out << "reducer,percentage,arch,output_dim,folds,failed,accuracy_mean,accuracy_std,"
         "macro_f1_mean,macro_f1_std,eer_mean,eer_std,param_count,latency_median_s,"
         "transform_latency_median_s,train_seconds,table_cell\n";
  for (const auto& r : rows) {
    out << r.reducer << ',' << fmt("%g", r.percentage) << ',' << r.arch << ',' << r.output_dim
        << ',' << r.folds << ',' << r.failed << ',' << num(r.accuracy.mean, "%.6f") << ','
        << num(r.accuracy.std, "%.6f") << ',' << num(r.macro_f1.mean, "%.6f") << ','
        << num(r.macro_f1.std, "%.6f") << ',' << num(r.eer.mean, "%.6f") << ','
        << num(r.eer.std, "%.6f") << ',' << r.param_count << ','
        << num(r.latency_median.mean, "%.6g") << ','
        << num(r.transform_latency_median.mean, "%.6g") << ','
        << num(r.train_seconds.mean, "%.3f") << ',' << format_table_cell(r) << '\n';
  }
}

std::vector<std::filesystem::path> emit_plots(const std::vector<SummaryRow>& rows,
                                              const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> archs;
  for (const auto& r : rows) {
    if (std::find(archs.begin(), archs.end(), r.arch) == archs.end()) archs.push_back(r.arch);
  }
  std::vector<std::filesystem::path> written;
  for (const auto& arch : archs) {
    std::vector<double> xs;
    std::vector<std::string> reducers;
    for (const auto& r : rows) {
      if (r.arch != arch) continue;
      if (std::find(xs.begin(), xs.end(), r.percentage) == xs.end()) xs.push_back(r.percentage);
      if (std::find(reducers.begin(), reducers.end(), r.reducer) == reducers.end()) {
        reducers.push_back(r.reducer);
      }
    }
    std::sort(xs.begin(), xs.end());

    auto per_reducer = [&](auto value_of) {
      std::vector<Series> series;
      for (const auto& red : reducers) {
        Series s{red, std::vector<std::optional<double>>(xs.size())};
        for (const auto& r : rows) {
          if (r.arch != arch || r.reducer != red) continue;
          const auto i = static_cast<std::size_t>(
              std::find(xs.begin(), xs.end(), r.percentage) - xs.begin());
          const double v = value_of(r);
          if (std::isfinite(v)) s.values[i] = v;
        }
        series.push_back(std::move(s));
      }
      return series;
    };

    std::vector<Figure> figs;
    figs.push_back({"eer_" + arch, "EER vs. percentage (" + arch + ")", "EER (%)", xs,
                    per_reducer([](const SummaryRow& r) { return r.eer.mean * 100.0; })});
    figs.push_back({"accuracy_" + arch, "Accuracy vs. percentage (" + arch + ")",
                    "accuracy (%)", xs,
                    per_reducer([](const SummaryRow& r) { return r.accuracy.mean * 100.0; })});
    figs.push_back({"f1_" + arch, "Macro-F1 vs. percentage (" + arch + ")", "macro-F1 (%)", xs,
                    per_reducer([](const SummaryRow& r) { return r.macro_f1.mean * 100.0; })});
    figs.push_back({"latency_" + arch, "Inference latency vs. percentage (" + arch + ")",
                    "median latency (ms)", xs,
                    per_reducer([](const SummaryRow& r) { return r.latency_median.mean * 1e3; })});

    // Parameter count depends only on the output width, so one series.
    Series params{"param_count", std::vector<std::optional<double>>(xs.size())};
    for (const auto& r : rows) {
      if (r.arch != arch) continue;
      const auto i = static_cast<std::size_t>(
          std::find(xs.begin(), xs.end(), r.percentage) - xs.begin());
      params.values[i] = static_cast<double>(r.param_count);
    }
    Figure pf{"params_" + arch, "Trainable parameters vs. percentage (" + arch + ")",
              "parameters", xs, {params}};
    pf.bars = true;
    figs.push_back(std::move(pf));

    for (const auto& f : figs) {
      const auto csv = dir / (f.stem + ".csv");
      const auto svg = dir / (f.stem + ".svg");
      write_csv(f, csv);
      write_svg(f, svg);
      written.push_back(csv);
      written.push_back(svg);
    }
  }
  return written;
}

}  // namespace repsel::bench
