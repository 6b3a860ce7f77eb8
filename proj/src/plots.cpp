// Copyright 2026 The PolicyScope Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "policyscope/plots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <regex>
#include <string>

#include "policyscope/errors.hpp"
#include "policyscope/harness.hpp"

namespace policyscope {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 30.0;
constexpr double kBottom = 50.0;

constexpr const char* kWeightColors[4] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

struct Axes {
  double x0, x1, y0, y1;
  bool log_y = false;

  double px(double x) const {
    const double span = x1 > x0 ? x1 - x0 : 1.0;
    return kLeft + (x - x0) / span * (kWidth - kLeft - kRight);
  }
  double py(double y) const {
    double a = y0, b = y1, v = y;
    if (log_y) {
      a = std::log10(a);
      b = std::log10(b);
      v = std::log10(v);
    }
    const double span = b > a ? b - a : 1.0;
    return kHeight - kBottom - (v - a) / span * (kHeight - kTop - kBottom);
  }
};

class Svg {
 public:
  Svg() {
    out_ += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out_ += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) +
            "\" height=\"" + num(kHeight) + "\" viewBox=\"0 0 " + num(kWidth) + " " +
            num(kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out_ += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  }

  void text(double x, double y, const std::string& s, const char* anchor = "middle") {
    out_ += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" text-anchor=\"" + anchor + "\">" +
            s + "</text>\n";
  }

  void line(double x0, double y0, double x1, double y1, const char* stroke) {
    out_ += "<line x1=\"" + num(x0) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(x1) +
            "\" y2=\"" + num(y1) + "\" stroke=\"" + stroke + "\"/>\n";
  }

  void polyline(const std::vector<std::pair<double, double>>& pts, const char* stroke) {
    out_ += "<polyline fill=\"none\" stroke-width=\"2\" stroke=\"" + std::string(stroke) +
            "\" points=\"" + join(pts) + "\"/>\n";
  }

  void polygon(const std::vector<std::pair<double, double>>& pts, const char* fill,
               double opacity) {
    out_ += "<polygon stroke=\"none\" fill=\"" + std::string(fill) + "\" fill-opacity=\"" +
            num(opacity) + "\" points=\"" + join(pts) + "\"/>\n";
  }

  void frame(const Axes& ax, const std::string& title, const std::string& xlabel,
             const std::string& ylabel) {
    const double bottom = kHeight - kBottom;
    line(kLeft, bottom, kWidth - kRight, bottom, "black");
    line(kLeft, kTop, kLeft, bottom, "black");
    text(kWidth / 2, kTop - 10, title);
    text(kWidth / 2, kHeight - 12, xlabel);
    out_ += "<text transform=\"translate(16," + num((kTop + bottom) / 2) +
            ") rotate(-90)\" text-anchor=\"middle\">" + ylabel + "</text>\n";
    for (int i = 0; i <= 4; ++i) {
      const double fx = ax.x0 + (ax.x1 - ax.x0) * i / 4.0;
      text(ax.px(fx), bottom + 16, tick_label(std::round(fx)));
      double fy;
      if (ax.log_y) {
        const double a = std::log10(ax.y0), b = std::log10(ax.y1);
        fy = std::pow(10.0, a + (b - a) * i / 4.0);
      } else {
        fy = ax.y0 + (ax.y1 - ax.y0) * i / 4.0;
      }
      text(kLeft - 6, ax.py(fy) + 4, tick_label(fy), "end");
      line(kLeft - 3, ax.py(fy), kLeft, ax.py(fy), "black");
    }
  }

  void save(const std::filesystem::path& path) {
    out_ += "</svg>\n";
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw FileError("cannot write " + path.string());
    f << out_;
    if (!f) throw FileError("failed writing " + path.string());
  }

 private:
  static std::string join(const std::vector<std::pair<double, double>>& pts) {
    std::string s;
    for (const auto& [x, y] : pts) {
      if (!s.empty()) s += ' ';
      s += num(x) + "," + num(y);
    }
    return s;
  }

  std::string out_;
};

void convergence_plot(const std::vector<IterationSummary>& rows,
                      const std::filesystem::path& path) {
  double lo = rows.front().q25, hi = rows.front().q75;
  for (const IterationSummary& s : rows) {
    lo = std::min({lo, s.q25, s.median});
    hi = std::max({hi, s.q75, s.median});
  }
  Axes ax{1.0, static_cast<double>(std::max<std::size_t>(rows.back().iteration, 2)), lo, hi};
  ax.log_y = lo > 0.0 && hi / lo > 1e3;
  if (!ax.log_y && hi == lo) {
    ax.y0 -= 0.5;
    ax.y1 += 0.5;
  }
  Svg svg;
  svg.frame(ax, "Convergence (median and interquartile range)", "iteration", "best so far");
  std::vector<std::pair<double, double>> band, median;
  for (const IterationSummary& s : rows) {
    band.emplace_back(ax.px(s.iteration), ax.py(s.q75));
    median.emplace_back(ax.px(s.iteration), ax.py(s.median));
  }
  for (auto it = rows.rbegin(); it != rows.rend(); ++it) {
    band.emplace_back(ax.px(it->iteration), ax.py(it->q25));
  }
  svg.polygon(band, "#1f77b4", 0.25);
  svg.polyline(median, "#1f77b4");
  svg.save(path);
}

void weights_plot(const RunTable& table, const std::filesystem::path& path) {
  std::vector<const RunRecord*> rows;
  for (const RunRecord& r : table.records) {
    if (r.weights) rows.push_back(&r);
  }
  Axes ax{static_cast<double>(rows.front()->iteration),
          static_cast<double>(std::max(rows.back()->iteration, rows.front()->iteration + 1)),
          0.0, 1.0};
  Svg svg;
  svg.frame(ax, "Metric weights", "iteration", "weight");
  std::vector<double> lower(rows.size(), 0.0);
  for (std::size_t c = 0; c < kAllCriteria.size(); ++c) {
    std::vector<std::pair<double, double>> poly;
    std::vector<double> upper(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      upper[i] = lower[i] + rows[i]->weights->weight(kAllCriteria[c]);
      poly.emplace_back(ax.px(rows[i]->iteration), ax.py(upper[i]));
    }
    for (std::size_t i = rows.size(); i-- > 0;) {
      poly.emplace_back(ax.px(rows[i]->iteration), ax.py(lower[i]));
    }
    svg.polygon(poly, kWeightColors[c], 0.85);
    svg.text(kWidth - kRight - 4, kTop + 14.0 * (c + 1),
             std::string(criterion_name(kAllCriteria[c])), "end");
    svg.line(kWidth - kRight - 150, kTop + 14.0 * (c + 1) - 4, kWidth - kRight - 136,
             kTop + 14.0 * (c + 1) - 4, kWeightColors[c]);
    lower = std::move(upper);
  }
  svg.save(path);
}

}  // namespace

std::vector<std::filesystem::path> emit_plots(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw FileError("not a results directory: " + dir.string());
  }
  static const std::regex run_name(R"(run_(\d+)\.csv)");
  std::vector<std::pair<std::size_t, std::filesystem::path>> csvs;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    std::smatch m;
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && std::regex_match(name, m, run_name)) {
      csvs.emplace_back(std::stoul(m[1].str()), entry.path());
    }
  }
  if (csvs.empty()) throw FileError("no run CSV files in " + dir.string());
  std::sort(csvs.begin(), csvs.end());

  std::vector<RunTable> tables;
  std::vector<std::vector<RunRecord>> runs;
  for (const auto& [rep, path] : csvs) {
    tables.push_back(read_run_csv(path));
    runs.push_back(tables.back().records);
  }

  std::vector<std::filesystem::path> written;
  const std::vector<IterationSummary> rows = summarize_runs(runs);
  if (rows.empty()) throw FileError("run CSV files in " + dir.string() + " have no rows");
  written.push_back(dir / "convergence.svg");
  convergence_plot(rows, written.back());

  for (std::size_t i = 0; i < csvs.size(); ++i) {
    const auto& recs = tables[i].records;
    if (std::none_of(recs.begin(), recs.end(), [](const RunRecord& r) { return r.weights.has_value(); })) {
      continue;
    }
    written.push_back(dir / ("weights_run_" + std::to_string(csvs[i].first) + ".svg"));
    weights_plot(tables[i], written.back());
  }
  return written;
}

}  // namespace policyscope
