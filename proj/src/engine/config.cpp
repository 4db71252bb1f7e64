// Copyright 2026 The mlal Authors
// SPDX-License-Identifier: Apache-2.0

#include "engine/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "core/error.hpp"

namespace mlal {
namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "experiment.seeds", "experiment.initial_labeled", "experiment.max_iterations",
      "experiment.target_labeled", "experiment.init_mode", "experiment.oracle",
      "query.uncertainty", "query.diversity", "query.budget", "query.multiplier",
      "query.include_bias",
      "train.epochs", "train.batch_size", "train.lr", "train.lr_decay_factor",
      "train.lr_decay_epoch", "train.lambda", "train.margin", "train.grad_stop_epoch",
      "model.hidden", "model.head_hidden",
      "data.source", "data.features", "data.labels", "data.splits", "data.split_seed",
      "data.num_classes", "data.feature_dim", "data.pool_size", "data.val_size",
      "data.test_size", "data.max_labels", "data.noise_sigma", "data.seed",
      "output.audit_scores",
  };
  return keys;
}

std::string trim(const std::string& s) {
  auto b = std::find_if_not(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
  auto e = std::find_if_not(s.rbegin(), s.rend(), [](unsigned char c) { return std::isspace(c); }).base();
  return b < e ? std::string(b, e) : std::string();
}

std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

std::string unquote(const std::string& raw, const std::string& key) {
  if (raw.size() >= 2 && raw.front() == '"' && raw.back() == '"') {
    std::string out;
    for (std::size_t i = 1; i + 1 < raw.size(); ++i) {
      if (raw[i] == '\\' && i + 2 < raw.size()) ++i;
      out += raw[i];
    }
    return out;
  }
  if (!raw.empty() && raw.front() == '"') fail(ErrorCode::kConfig, key + ": unterminated string");
  return raw;
}

template <class T>
T parse_number(const std::string& raw, const std::string& key) {
  const std::string s = unquote(raw, key);
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    fail(ErrorCode::kConfig, key + ": '" + raw + "' is not a valid number");
  }
  return v;
}

bool parse_bool(const std::string& raw, const std::string& key) {
  const std::string s = unquote(raw, key);
  if (s == "true") return true;
  if (s == "false") return false;
  fail(ErrorCode::kConfig, key + ": expected true or false, got '" + raw + "'");
}

template <class T>
std::vector<T> parse_list(const std::string& raw, const std::string& key) {
  if (raw.size() < 2 || raw.front() != '[' || raw.back() != ']') {
    // A scalar is accepted as a one-element list.
    return {parse_number<T>(raw, key)};
  }
  std::vector<T> out;
  std::istringstream in(raw.substr(1, raw.size() - 2));
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_number<T>(item, key));
  }
  return out;
}

}  // namespace

std::string to_string(InitMode mode) { return mode == InitMode::kCold ? "COLD" : "WARM"; }

InitMode parse_init_mode(const std::string& text) {
  std::string t;
  for (char c : text) t += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (t == "COLD") return InitMode::kCold;
  if (t == "WARM") return InitMode::kWarm;
  fail(ErrorCode::kConfig, "unknown init mode '" + text + "' (expected COLD or WARM)");
}

void ExperimentConfig::validate() const {
  query.validate();
  train.validate();
  data.synthetic.validate();
  require(max_iterations >= 1, ErrorCode::kConfig, "experiment.max_iterations must be at least 1");
  require(initial_labeled >= 1, ErrorCode::kConfig, "experiment.initial_labeled must be at least 1");
  require(!seeds.empty(), ErrorCode::kConfig, "experiment.seeds must list at least one seed");
  for (auto w : hidden) require(w > 0, ErrorCode::kConfig, "model.hidden widths must be positive");
  if (query.uncertainty == query::Uncertainty::kLL) {
    require(head_hidden > 0, ErrorCode::kConfig, "LL needs model.head_hidden > 0");
  }
  if (data.kind == DataSource::Kind::kCsv) {
    require(!data.features_path.empty() && !data.labels_path.empty(), ErrorCode::kConfig,
            "csv data needs data.features and data.labels");
  }
}

ConfigDocument ConfigDocument::parse(const std::string& text) {
  ConfigDocument doc;
  std::istringstream in(text);
  std::string line, section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    const std::string where = "config line " + std::to_string(lineno);
    if (line.front() == '[') {
      if (line.back() != ']') fail(ErrorCode::kConfig, where + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(ErrorCode::kConfig, where + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string full = section.empty() ? key : section + "." + key;
    if (!known_keys().count(full)) fail(ErrorCode::kConfig, where + ": unknown key '" + full + "'");
    doc.values_[full] = trim(line.substr(eq + 1));
  }
  return doc;
}

ConfigDocument ConfigDocument::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  ConfigDocument doc = parse(ss.str());
  doc.base_dir_ = path.parent_path();
  return doc;
}

void ConfigDocument::set(const std::string& key, const std::string& raw_value) {
  if (!known_keys().count(key)) fail(ErrorCode::kConfig, "unknown config key '" + key + "'");
  values_[key] = trim(raw_value);
}

void ConfigDocument::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    fail(ErrorCode::kConfig, "override '" + assignment + "' is not of the form key=value");
  }
  set(trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

ExperimentConfig ConfigDocument::to_config() const {
  ExperimentConfig c;
  auto has = [&](const char* k) { return values_.count(k) > 0; };
  auto raw = [&](const char* k) -> const std::string& { return values_.at(k); };
  auto str = [&](const char* k) { return unquote(raw(k), k); };
  auto size = [&](const char* k) { return parse_number<std::size_t>(raw(k), k); };
  auto integer = [&](const char* k) { return parse_number<int>(raw(k), k); };
  auto real = [&](const char* k) { return parse_number<double>(raw(k), k); };
  auto u64 = [&](const char* k) { return parse_number<std::uint64_t>(raw(k), k); };
  auto flag = [&](const char* k) { return parse_bool(raw(k), k); };
  auto path = [&](const char* k) {
    std::filesystem::path p = str(k);
    if (p.is_relative() && !base_dir_.empty()) p = base_dir_ / p;
    return p.string();
  };

  if (has("experiment.seeds")) c.seeds = parse_list<std::uint64_t>(raw("experiment.seeds"), "experiment.seeds");
  if (has("experiment.initial_labeled")) c.initial_labeled = size("experiment.initial_labeled");
  if (has("experiment.max_iterations")) c.max_iterations = integer("experiment.max_iterations");
  if (has("experiment.target_labeled")) {
    const auto t = size("experiment.target_labeled");
    if (t > 0) c.target_labeled = t;
  }
  if (has("experiment.init_mode")) c.init_mode = parse_init_mode(str("experiment.init_mode"));
  if (has("experiment.oracle")) c.oracle = flag("experiment.oracle");

  if (has("query.uncertainty")) c.query.uncertainty = query::parse_uncertainty(str("query.uncertainty"));
  if (has("query.diversity")) c.query.diversity = flag("query.diversity");
  if (has("query.budget")) c.query.budget = integer("query.budget");
  if (has("query.multiplier")) c.query.multiplier = integer("query.multiplier");
  if (has("query.include_bias")) c.query.include_bias = flag("query.include_bias");

  if (has("train.epochs")) c.train.epochs = integer("train.epochs");
  if (has("train.batch_size")) c.train.batch_size = integer("train.batch_size");
  if (has("train.lr")) c.train.lr = real("train.lr");
  if (has("train.lr_decay_factor")) c.train.lr_decay_factor = real("train.lr_decay_factor");
  // Schedule defaults follow the epoch count: decay at 80%, head detach at 60%.
  c.train.lr_decay_epoch = has("train.lr_decay_epoch") ? integer("train.lr_decay_epoch") : c.train.epochs * 8 / 10;
  c.train.grad_stop_epoch = has("train.grad_stop_epoch") ? integer("train.grad_stop_epoch") : c.train.epochs * 6 / 10;
  if (has("train.lambda")) c.train.lambda = real("train.lambda");
  if (has("train.margin")) c.train.margin = real("train.margin");

  if (has("model.hidden")) c.hidden = parse_list<std::size_t>(raw("model.hidden"), "model.hidden");
  if (has("model.head_hidden")) c.head_hidden = size("model.head_hidden");

  if (has("data.source")) {
    const auto s = str("data.source");
    if (s == "synthetic") {
      c.data.kind = DataSource::Kind::kSynthetic;
    } else if (s == "csv") {
      c.data.kind = DataSource::Kind::kCsv;
    } else {
      fail(ErrorCode::kConfig, "data.source must be 'synthetic' or 'csv'");
    }
  }
  if (has("data.features")) c.data.features_path = path("data.features");
  if (has("data.labels")) c.data.labels_path = path("data.labels");
  if (has("data.splits")) c.data.splits_path = path("data.splits");
  if (has("data.split_seed")) c.data.split_seed = u64("data.split_seed");
  auto& syn = c.data.synthetic;
  if (has("data.num_classes")) syn.num_classes = size("data.num_classes");
  if (has("data.feature_dim")) syn.feature_dim = size("data.feature_dim");
  if (has("data.pool_size")) syn.pool_size = size("data.pool_size");
  if (has("data.val_size")) syn.val_size = size("data.val_size");
  if (has("data.test_size")) syn.test_size = size("data.test_size");
  if (has("data.max_labels")) syn.max_labels = size("data.max_labels");
  if (has("data.noise_sigma")) syn.noise_sigma = real("data.noise_sigma");
  if (has("data.seed")) syn.seed = u64("data.seed");

  if (has("output.audit_scores")) c.audit_scores = flag("output.audit_scores");

  c.validate();
  return c;
}

}  // namespace mlal
