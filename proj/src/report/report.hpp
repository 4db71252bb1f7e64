// Copyright 2026 The mlal Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "engine/config.hpp"
#include "engine/engine.hpp"

namespace mlal::report {

struct SummaryRow {
  std::size_t iteration = 0;
  std::size_t num_labeled = 0;
  double micro_f1 = 0.0;
  double macro_f1 = 0.0;
};

/// Per-iteration mean over seeds; iterations missing from any seed are dropped.
std::vector<SummaryRow> summarize(const std::vector<std::vector<MetricReport>>& per_seed);

/// Runs every configured seed and writes history_seed<N>.csv,
/// selection_seed<N>.csv, summary.csv and run.json into `out_dir`.
std::vector<SummaryRow> run_and_write(const ExperimentConfig& config, const DatasetPool& dataset,
                                      const std::filesystem::path& out_dir);

struct Series {
  std::string name;
  std::vector<SummaryRow> rows;
};

/// Collects runs from `dir` and its immediate subdirectories (each one a
/// run.json + summary.csv pair). Throws kData when none are found.
std::vector<Series> collect_runs(const std::filesystem::path& dir);

/// `num_labeled,<series...>` table of one metric ("micro_f1" or "macro_f1").
std::string merged_table(const std::vector<Series>& runs, const std::string& metric);

/// Fixed-layout SVG line plot of one metric against num_labeled.
std::string line_plot_svg(const std::vector<Series>& runs, const std::string& metric);

/// Writes report_<metric>.csv and report_<metric>.svg for both metrics into
/// `dir`; returns the micro-F1 table.
std::string write_report(const std::filesystem::path& dir);

}  // namespace mlal::report
