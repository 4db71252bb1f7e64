// Copyright 2026 The mlal Authors
// SPDX-License-Identifier: Apache-2.0

#include "report/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "core/error.hpp"

namespace mlal::report {
namespace {

namespace fs = std::filesystem;

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
}

std::vector<SummaryRow> read_summary(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<SummaryRow> rows;
  std::string line;
  std::getline(in, line);
  if (line.rfind("iteration,num_labeled,micro_f1,macro_f1", 0) != 0) {
    fail(ErrorCode::kData, path.string() + ": unexpected summary header");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    SummaryRow r;
    if (std::sscanf(line.c_str(), "%zu,%zu,%lf,%lf", &r.iteration, &r.num_labeled, &r.micro_f1,
                    &r.macro_f1) != 4) {
      fail(ErrorCode::kData, path.string() + ": malformed row '" + line + "'");
    }
    rows.push_back(r);
  }
  return rows;
}

double metric_of(const SummaryRow& r, const std::string& metric) {
  if (metric == "micro_f1") return r.micro_f1;
  if (metric == "macro_f1") return r.macro_f1;
  fail(ErrorCode::kInvalidArgument, "unknown metric '" + metric + "'");
}

}  // namespace

std::vector<SummaryRow> summarize(const std::vector<std::vector<MetricReport>>& per_seed) {
  std::vector<SummaryRow> rows;
  if (per_seed.empty()) return rows;
  std::size_t n = per_seed.front().size();
  for (const auto& h : per_seed) n = std::min(n, h.size());
  const double k = static_cast<double>(per_seed.size());
  for (std::size_t i = 0; i < n; ++i) {
    SummaryRow r{i + 1, per_seed.front()[i].num_labeled, 0.0, 0.0};
    for (const auto& h : per_seed) {
      r.micro_f1 += h[i].micro_f1;
      r.macro_f1 += h[i].macro_f1;
    }
    r.micro_f1 /= k;
    r.macro_f1 /= k;
    rows.push_back(r);
  }
  return rows;
}

std::vector<SummaryRow> run_and_write(const ExperimentConfig& config, const DatasetPool& dataset,
                                      const fs::path& out_dir) {
  fs::create_directories(out_dir);
  std::vector<std::vector<MetricReport>> histories;
  for (std::uint64_t seed : config.seeds) {
    const std::string suffix = "_seed" + std::to_string(seed) + ".csv";
    std::ostringstream audit;
    bool first_audit = true;
    RoundHook hook;
    if (config.audit_scores) {
      hook.on_selection = [&](std::uint64_t tau, const query::SelectionResult& r) {
        query::write_score_audit(audit, tau, config.query, r, first_audit);
        first_audit = false;
      };
    }
    ALState state = make_initial_state(config, dataset, seed);
    run_to_completion(state, hook);

    std::ostringstream history, selection;
    write_history_csv(history, state.history);
    write_selection_csv(selection, state.selections);
    write_file(out_dir / ("history" + suffix), history.str());
    write_file(out_dir / ("selection" + suffix), selection.str());
    if (config.audit_scores) write_file(out_dir / ("scores" + suffix), audit.str());
    histories.push_back(state.history);
  }

  const auto rows = summarize(histories);
  std::ostringstream summary;
  summary << "iteration,num_labeled,micro_f1,macro_f1\n";
  for (const auto& r : rows) {
    summary << r.iteration << ',' << r.num_labeled << ',' << fixed6(r.micro_f1) << ',' << fixed6(r.macro_f1) << '\n';
  }
  write_file(out_dir / "summary.csv", summary.str());

  nlohmann::ordered_json manifest{{"strategy", config.query.label()},
                                  {"init_mode", to_string(config.init_mode)},
                                  {"budget", config.query.budget},
                                  {"multiplier", config.query.multiplier},
                                  {"seeds", config.seeds}};
  write_file(out_dir / "run.json", manifest.dump(2) + "\n");
  return rows;
}

std::vector<Series> collect_runs(const fs::path& dir) {
  if (!fs::is_directory(dir)) fail(ErrorCode::kIo, dir.string() + " is not a directory");
  std::vector<fs::path> candidates{dir};
  std::vector<fs::path> children;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_directory()) children.push_back(entry.path());
  }
  std::sort(children.begin(), children.end());
  candidates.insert(candidates.end(), children.begin(), children.end());

  std::vector<Series> runs;
  std::set<std::string> names;
  for (const auto& c : candidates) {
    if (!fs::exists(c / "run.json") || !fs::exists(c / "summary.csv")) continue;
    std::ifstream in(c / "run.json");
    nlohmann::json manifest;
    try {
      manifest = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::kData, (c / "run.json").string() + ": " + e.what());
    }
    std::string name = manifest.value("strategy", c.filename().string());
    if (names.count(name)) name += "@" + c.filename().string();
    names.insert(name);
    runs.push_back({name, read_summary(c / "summary.csv")});
  }
  if (runs.empty()) fail(ErrorCode::kData, "no runs found in " + dir.string());
  return runs;
}

std::string merged_table(const std::vector<Series>& runs, const std::string& metric) {
  std::map<std::size_t, std::map<std::size_t, double>> table;  // num_labeled -> series -> value
  for (std::size_t s = 0; s < runs.size(); ++s) {
    for (const auto& r : runs[s].rows) table[r.num_labeled][s] = metric_of(r, metric);
  }
  std::ostringstream out;
  out << "num_labeled";
  for (const auto& run : runs) out << ',' << run.name;
  out << '\n';
  for (const auto& [n, values] : table) {
    out << n;
    for (std::size_t s = 0; s < runs.size(); ++s) {
      out << ',';
      auto it = values.find(s);
      if (it != values.end()) out << fixed6(it->second);
    }
    out << '\n';
  }
  return out.str();
}

std::string line_plot_svg(const std::vector<Series>& runs, const std::string& metric) {
  constexpr double kWidth = 640, kHeight = 400, kLeft = 60, kRight = 170, kTop = 30, kBottom = 50;
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2"};
  std::size_t x_min = SIZE_MAX, x_max = 0;
  for (const auto& run : runs) {
    for (const auto& r : run.rows) {
      x_min = std::min(x_min, r.num_labeled);
      x_max = std::max(x_max, r.num_labeled);
    }
  }
  if (x_min == SIZE_MAX) x_min = x_max = 0;
  const double x_span = x_max > x_min ? static_cast<double>(x_max - x_min) : 1.0;
  const double plot_w = kWidth - kLeft - kRight, plot_h = kHeight - kTop - kBottom;
  auto px = [&](std::size_t n) { return kLeft + plot_w * (static_cast<double>(n - x_min) / x_span); };
  auto py = [&](double v) { return kTop + plot_h * (1.0 - v); };
  char buf[512];

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" viewBox=\"0 0 640 400\">\n"
      << "<rect width=\"640\" height=\"400\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">%s vs labeled samples</text>\n",
                kLeft, metric.c_str());
  svg << buf;
  for (int t = 0; t <= 5; ++t) {
    const double v = t / 5.0;
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#dddddd\"/>"
                  "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">%.1f</text>\n",
                  kLeft, py(v), kLeft + plot_w, py(v), kLeft - 6, py(v) + 3, v);
    svg << buf;
  }
  std::snprintf(buf, sizeof buf,
                "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" font-size=\"10\">%zu</text>"
                "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">%zu</text>"
                "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">labeled samples</text>\n",
                kLeft, kTop + plot_h + 15, x_min, kLeft + plot_w, kTop + plot_h + 15, x_max,
                kLeft + plot_w / 2, kTop + plot_h + 35);
  svg << buf;
  std::snprintf(buf, sizeof buf, "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"none\" stroke=\"black\"/>\n",
                kLeft, kTop, plot_w, plot_h);
  svg << buf;

  for (std::size_t s = 0; s < runs.size(); ++s) {
    const char* color = kColors[s % (sizeof kColors / sizeof kColors[0])];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < runs[s].rows.size(); ++i) {
      const auto& r = runs[s].rows[i];
      std::snprintf(buf, sizeof buf, "%s%.2f,%.2f", i ? " " : "", px(r.num_labeled), py(metric_of(r, metric)));
      svg << buf;
    }
    svg << "\"/>\n";
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"%s\" stroke-width=\"2\"/>"
                  "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" font-size=\"11\">",
                  kWidth - kRight + 10, kTop + 10 + 16.0 * s, kWidth - kRight + 30, kTop + 10 + 16.0 * s, color,
                  kWidth - kRight + 35, kTop + 14 + 16.0 * s);
    svg << buf;
    for (char ch : runs[s].name) {
      if (ch == '<') svg << "&lt;";
      else if (ch == '&') svg << "&amp;";
      else svg << ch;
    }
    svg << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string write_report(const fs::path& dir) {
  const auto runs = collect_runs(dir);
  std::string micro;
  for (const std::string metric : {"micro_f1", "macro_f1"}) {
    const std::string table = merged_table(runs, metric);
    write_file(dir / ("report_" + metric + ".csv"), table);
    write_file(dir / ("report_" + metric + ".svg"), line_plot_svg(runs, metric));
    if (metric == "micro_f1") micro = table;
  }
  return micro;
}

}  // namespace mlal::report
