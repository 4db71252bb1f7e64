// Copyright 2026 The mlal Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "core/error.hpp"
#include "core/rng.hpp"
#include "data/data.hpp"

namespace mlal::data {
namespace {

namespace fs = std::filesystem;

struct Row {
  std::size_t line = 0;
  std::vector<std::string> cells;
};

struct Table {
  std::vector<std::string> header;
  std::vector<Row> rows;
};

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

Table read_table(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  Table t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split_line(line);
    if (t.header.empty()) {
      if (cells.empty() || cells[0] != "id") {
        fail(ErrorCode::kData, path.string() + ":" + std::to_string(lineno) + ": header must start with 'id'");
      }
      t.header = std::move(cells);
      continue;
    }
    if (cells.size() != t.header.size()) {
      fail(ErrorCode::kData, path.string() + ":" + std::to_string(lineno) + ": expected " +
                                 std::to_string(t.header.size()) + " fields, found " +
                                 std::to_string(cells.size()));
    }
    t.rows.push_back({lineno, std::move(cells)});
  }
  if (t.header.empty()) fail(ErrorCode::kData, path.string() + ": empty file");
  return t;
}

std::string where(const fs::path& path, const Row& row) {
  return path.string() + ":" + std::to_string(row.line);
}

double parse_double(const std::string& cell, const fs::path& path, const Row& row) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
    fail(ErrorCode::kData, where(path, row) + ": '" + cell + "' is not a finite number");
  }
  return v;
}

}  // namespace

DatasetPool load_csv(const fs::path& features, const fs::path& labels,
                     const std::optional<fs::path>& splits, std::uint64_t seed) {
  const Table ft = read_table(features);
  const Table lt = read_table(labels);
  require(ft.header.size() >= 2, ErrorCode::kData, features.string() + ": no feature columns");
  require(lt.header.size() >= 2, ErrorCode::kData, labels.string() + ": no label columns");

  DatasetPool pool;
  pool.feature_dim = ft.header.size() - 1;
  pool.num_classes = lt.header.size() - 1;
  pool.class_names.assign(lt.header.begin() + 1, lt.header.end());

  for (const auto& row : ft.rows) {
    Sample s;
    s.id = row.cells[0];
    require(!s.id.empty(), ErrorCode::kData, where(features, row) + ": empty id");
    for (std::size_t j = 1; j < row.cells.size(); ++j) s.features.push_back(parse_double(row.cells[j], features, row));
    if (!pool.samples.emplace(s.id, std::move(s)).second) {
      fail(ErrorCode::kData, where(features, row) + ": duplicate id '" + row.cells[0] + "'");
    }
  }

  std::set<SampleId> labeled_ids;
  for (const auto& row : lt.rows) {
    const auto& id = row.cells[0];
    auto it = pool.samples.find(id);
    if (it == pool.samples.end()) {
      fail(ErrorCode::kData, where(labels, row) + ": id '" + id + "' has no feature row");
    }
    if (!labeled_ids.insert(id).second) {
      fail(ErrorCode::kData, where(labels, row) + ": duplicate id '" + id + "'");
    }
    LabelVector y;
    for (std::size_t j = 1; j < row.cells.size(); ++j) {
      const auto& c = row.cells[j];
      if (c != "0" && c != "1") {
        fail(ErrorCode::kData, where(labels, row) + ": label '" + c + "' is not 0 or 1");
      }
      y.push_back(c == "1" ? 1 : 0);
    }
    if (std::none_of(y.begin(), y.end(), [](auto v) { return v == 1; })) {
      fail(ErrorCode::kData, where(labels, row) + ": all-zero label row");
    }
    it->second.true_labels = std::move(y);
  }
  if (labeled_ids.size() != pool.samples.size()) {
    for (const auto& [id, s] : pool.samples) {
      if (!labeled_ids.count(id)) fail(ErrorCode::kData, labels.string() + ": no label row for id '" + id + "'");
    }
  }

  if (splits) {
    const Table st = read_table(*splits);
    require(st.header.size() == 2, ErrorCode::kData, splits->string() + ": expected header 'id,split'");
    std::set<SampleId> assigned;
    for (const auto& row : st.rows) {
      const auto& id = row.cells[0];
      if (!pool.samples.count(id)) fail(ErrorCode::kData, where(*splits, row) + ": unknown id '" + id + "'");
      if (!assigned.insert(id).second) fail(ErrorCode::kData, where(*splits, row) + ": duplicate id '" + id + "'");
      const auto& split = row.cells[1];
      if (split == "pool") {
        pool.unlabeled.insert(id);
      } else if (split == "val") {
        pool.validation.insert(id);
      } else if (split == "test") {
        pool.test.insert(id);
      } else {
        fail(ErrorCode::kData, where(*splits, row) + ": split '" + split + "' is not pool, val or test");
      }
    }
    if (assigned.size() != pool.samples.size()) {
      fail(ErrorCode::kData, splits->string() + ": split file does not cover every sample");
    }
  } else {
    std::vector<SampleId> ids;
    for (const auto& [id, s] : pool.samples) ids.push_back(id);
    Rng rng = make_rng(seed, Stream::kSplit);
    ids = sample_without_replacement(ids, ids.size(), rng);
    const std::size_t n_pool = ids.size() / 2, n_val = ids.size() / 4;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (i < n_pool) {
        pool.unlabeled.insert(ids[i]);
      } else if (i < n_pool + n_val) {
        pool.validation.insert(ids[i]);
      } else {
        pool.test.insert(ids[i]);
      }
    }
  }
  return pool;
}

void save_csv(const DatasetPool& pool, const fs::path& dir) {
  fs::create_directories(dir);
  std::ofstream f(dir / "features.csv"), l(dir / "labels.csv"), s(dir / "splits.csv");
  if (!f || !l || !s) fail(ErrorCode::kIo, "cannot write dataset files into " + dir.string());
  f << "id";
  for (std::size_t j = 0; j < pool.feature_dim; ++j) f << ",f" << j;
  f << '\n' << std::setprecision(17);
  l << "id";
  for (std::size_t c = 0; c < pool.num_classes; ++c) {
    l << ',' << (c < pool.class_names.size() ? pool.class_names[c] : "l" + std::to_string(c));
  }
  l << '\n';
  s << "id,split\n";
  for (const auto& [id, sample] : pool.samples) {
    require(sample.true_labels.has_value(), ErrorCode::kState, "sample '" + id + "' has no labels to save");
    f << id;
    for (double v : sample.features) f << ',' << v;
    f << '\n';
    l << id;
    for (auto v : *sample.true_labels) l << ',' << static_cast<int>(v);
    l << '\n';
    const char* split = pool.validation.count(id) ? "val" : pool.test.count(id) ? "test" : "pool";
    s << id << ',' << split << '\n';
  }
}

}  // namespace mlal::data
