// Copyright 2026 The slamkit Authors. All Rights Reserved.
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

#include "slamkit/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "slamkit/error.hpp"

namespace slamkit {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw IoError("cannot open " + p.string());
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

void write_file(const fs::path& p, const std::string& s) {
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + p.string() + " for writing");
  f << s;
  if (!f) throw IoError("failed writing " + p.string());
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream is(read_file(p));
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

double parse_number(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  return std::stod(s);
}

// "tempo=0.5" -> 0.5
double axis_of(const std::string& label) {
  const auto eq = label.find('=');
  return eq == std::string::npos ? 0.0 : std::stod(label.substr(eq + 1));
}

std::string series_name(const std::string& system) {
  return system == "ctc" ? "ctc baseline" : system;
}

struct SweepData {
  std::vector<std::string> labels;
  std::vector<double> wers;
};

SweepData read_aggregate(const fs::path& p) {
  SweepData d;
  const auto rows = read_csv(p);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() < 2) throw FormatError("malformed aggregate row in " + p.string());
    d.labels.push_back(rows[i][0]);
    d.wers.push_back(parse_number(rows[i][1]));
  }
  return d;
}

}  // namespace

void write_eval_marker(const std::string& dir, const std::string& system,
                       const std::string& train_tag, const std::string& eval_tag) {
  const json j = {{"system", system}, {"train_tag", train_tag}, {"eval_tag", eval_tag}};
  write_file(fs::path(dir) / kEvalMarker, j.dump() + "\n");
}

void write_sweep_marker(const std::string& dir, const std::string& system, PerturbKind kind) {
  const json j = {{"system", system}, {"kind", to_string(kind)}};
  write_file(fs::path(dir) / kSweepMarker, j.dump() + "\n");
}

WerReport pooled_from_utterance_csv(const std::string& path) {
  const auto rows = read_csv(path);
  std::vector<WerReport> reports;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() != 9) throw FormatError("malformed utterance row in " + path);
    WerReport w;
    w.n_ref = std::stoi(r[3]);
    w.substitutions = std::stoi(r[4]);
    w.deletions = std::stoi(r[5]);
    w.insertions = std::stoi(r[6]);
    reports.push_back(w);
  }
  if (reports.empty()) throw ValidationError("no utterances in " + path);
  return pool_reports(reports);
}

std::string line_chart_svg(const std::string& title, const std::string& x_label,
                           const std::vector<ChartSeries>& series) {
  const double W = 480, H = 320, L = 56, R = 120, T = 32, B = 44;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y1 = 0.0;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      if (std::isfinite(s.y[i])) y1 = std::max(y1, s.y[i]);
    }
  }
  if (!(x1 > x0)) x1 = x0 + 1.0;
  // WER above 100% is off the chart; clip there.
  y1 = std::min(std::max(y1 * 1.1, 0.1), 1.0);
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - std::min(y, y1) / y1 * (H - T - B); };
  static const char* colors[] = {"#440154", "#21918c", "#fde725", "#3b528b"};
  std::ostringstream os;
  char buf[128];
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<text x=\"" << W / 2 << "\" y=\"18\" text-anchor=\"middle\">" << title << "</text>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B
     << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double y = y1 * t / 4;
    std::snprintf(buf, sizeof(buf), "%.1f", 100.0 * y);
    os << "<text x=\"" << L - 6 << "\" y=\"" << py(y) + 4 << "\" text-anchor=\"end\">" << buf
       << "</text>\n";
    const double x = x0 + (x1 - x0) * t / 4;
    std::snprintf(buf, sizeof(buf), "%g", std::round(x * 1000) / 1000);
    os << "<text x=\"" << px(x) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">" << buf
       << "</text>\n";
  }
  os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 8 << "\" text-anchor=\"middle\">"
     << x_label << "</text>\n";
  os << "<text x=\"14\" y=\"" << (T + H - B) / 2 << "\" transform=\"rotate(-90 14 "
     << (T + H - B) / 2 << ")\" text-anchor=\"middle\">WER (%)</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = colors[s % 4];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < series[s].x.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%s%.2f,%.2f", i ? " " : "", px(series[s].x[i]),
                    py(series[s].y[i]));
      os << buf;
    }
    os << "\"/>\n";
    os << "<text x=\"" << W - R + 8 << "\" y=\"" << T + 14 * (s + 1) << "\" fill=\"" << color
       << "\">" << series[s].name << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

ReportOutput render_report(const std::string& results_dir, const std::string& out_dir) {
  if (!fs::is_directory(results_dir)) {
    throw IoError("results directory " + results_dir + " does not exist");
  }
  std::vector<fs::path> markers;
  for (const auto& e : fs::recursive_directory_iterator(results_dir)) {
    const auto name = e.path().filename().string();
    if (e.is_regular_file() && (name == kEvalMarker || name == kSweepMarker)) {
      if (fs::weakly_canonical(e.path().parent_path()) == fs::weakly_canonical(out_dir)) continue;
      markers.push_back(e.path());
    }
  }
  std::sort(markers.begin(), markers.end());
  if (markers.empty()) throw ValidationError("nothing to report in " + results_dir);

  RunMatrix matrix;
  std::vector<std::string> train_tags, eval_tags;
  // kind -> system -> data
  std::map<std::string, std::map<std::string, SweepData>> sweeps;
  for (const auto& m : markers) {
    const json j = json::parse(read_file(m));
    const fs::path dir = m.parent_path();
    if (m.filename() == kEvalMarker) {
      const auto tr = j.at("train_tag").get<std::string>();
      const auto ev = j.at("eval_tag").get<std::string>();
      if (std::find(train_tags.begin(), train_tags.end(), tr) == train_tags.end()) train_tags.push_back(tr);
      if (std::find(eval_tags.begin(), eval_tags.end(), ev) == eval_tags.end()) eval_tags.push_back(ev);
      matrix[{tr, ev}] = pooled_from_utterance_csv((dir / "utterances.csv").string());
    } else {
      sweeps[j.at("kind").get<std::string>()][j.at("system").get<std::string>()] =
          read_aggregate(dir / "aggregate.csv");
    }
  }

  fs::create_directories(out_dir);
  ReportOutput out;
  std::ostringstream text;
  if (!matrix.empty()) {
    text << "Cross-domain WER (%), rows = training data, columns = evaluation data, * = in-domain\n";
    text << cross_domain_matrix(matrix, train_tags, eval_tags).to_text() << '\n';
  }
  for (const auto& [kind, systems] : sweeps) {
    std::vector<std::string> names;
    for (const auto& [sys, _] : systems) names.push_back(sys);
    // Connector series first, then the baseline.
    std::stable_sort(names.begin(), names.end(),
                     [](const std::string& a, const std::string& b) { return (a == "ctc") < (b == "ctc"); });
    if (std::none_of(names.begin(), names.end(), [](const std::string& s) { return s == "ctc"; })) {
      out.notices.push_back("notice: " + kind + " sweep has no ctc baseline series; chart shows one series");
    }
    if (std::all_of(names.begin(), names.end(), [](const std::string& s) { return s == "ctc"; })) {
      out.notices.push_back("notice: " + kind + " sweep has no connector series; chart shows the baseline only");
    }
    // Union of condition labels in first-seen order.
    std::vector<std::string> labels;
    for (const auto& n : names) {
      for (const auto& l : systems.at(n).labels) {
        if (std::find(labels.begin(), labels.end(), l) == labels.end()) labels.push_back(l);
      }
    }
    std::ostringstream csv;
    csv << "condition,axis";
    for (const auto& n : names) csv << ',' << series_name(n);
    csv << '\n';
    text << "WER (%) vs " << (kind == "tempo" ? "tempo ratio" : "SNR (dB)") << '\n';
    text << "condition";
    for (const auto& n : names) text << "  " << series_name(n);
    text << '\n';
    std::vector<ChartSeries> series;
    for (const auto& n : names) series.push_back({series_name(n), {}, {}});
    for (const auto& l : labels) {
      csv << l << ',' << csv_number(axis_of(l));
      text << l;
      for (std::size_t s = 0; s < names.size(); ++s) {
        const SweepData& d = systems.at(names[s]);
        const auto it = std::find(d.labels.begin(), d.labels.end(), l);
        if (it == d.labels.end()) {
          csv << ',';
          text << "  -";
          continue;
        }
        const double w = d.wers[it - d.labels.begin()];
        csv << ',' << csv_number(w);
        text << "  " << format_wer(w);
        series[s].x.push_back(axis_of(l));
        series[s].y.push_back(w);
      }
      csv << '\n';
      text << '\n';
    }
    text << '\n';
    const fs::path csv_path = fs::path(out_dir) / ("curve_" + kind + ".csv");
    write_file(csv_path, csv.str());
    out.files.push_back(csv_path.string());
    const bool tempo = kind == "tempo";
    const fs::path svg_path = fs::path(out_dir) / (tempo ? "wer_vs_ratio.svg" : "wer_vs_snr.svg");
    write_file(svg_path, line_chart_svg(tempo ? "WER vs tempo ratio" : "WER vs SNR",
                                        tempo ? "tempo ratio" : "SNR (dB)", series));
    out.files.push_back(svg_path.string());
  }
  for (const auto& n : out.notices) text << n << '\n';
  out.text = text.str();
  const fs::path report_path = fs::path(out_dir) / "report.txt";
  write_file(report_path, out.text);
  out.files.push_back(report_path.string());
  std::sort(out.files.begin(), out.files.end());
  return out;
}

}  // namespace slamkit
