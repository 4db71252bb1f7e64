// Copyright 2026 The mlal Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <limits>

#include <json.hpp>

#include "core/error.hpp"
#include "engine/engine.hpp"

namespace mlal {
namespace {

using Json = nlohmann::ordered_json;

Json layer_to_json(const nn::DenseLayer& layer) {
  return Json{{"rows", layer.weight.rows}, {"cols", layer.weight.cols},
              {"weight", layer.weight.data}, {"bias", layer.bias}};
}

nn::DenseLayer layer_from_json(const Json& j) {
  nn::DenseLayer layer;
  layer.weight.rows = j.at("rows").get<std::size_t>();
  layer.weight.cols = j.at("cols").get<std::size_t>();
  layer.weight.data = j.at("weight").get<std::vector<double>>();
  layer.bias = j.at("bias").get<std::vector<double>>();
  require(layer.weight.data.size() == layer.weight.rows * layer.weight.cols &&
              layer.bias.size() == layer.weight.rows,
          ErrorCode::kData, "checkpoint layer shape does not match its data");
  return layer;
}

Json network_to_json(const std::optional<nn::NetworkParams>& params) {
  if (!params) return nullptr;
  Json layers = Json::array();
  for (const auto& l : params->layers) layers.push_back(layer_to_json(l));
  Json head = nullptr;
  if (params->head) head = Json{{"fc1", layer_to_json(params->head->fc1)}, {"fc2", layer_to_json(params->head->fc2)}};
  return Json{{"layers", layers}, {"head", head}};
}

std::optional<nn::NetworkParams> network_from_json(const Json& j) {
  if (j.is_null()) return std::nullopt;
  nn::NetworkParams params;
  for (const auto& l : j.at("layers")) params.layers.push_back(layer_from_json(l));
  if (!j.at("head").is_null()) {
    params.head = nn::LossHeadParams{layer_from_json(j.at("head").at("fc1")),
                                     layer_from_json(j.at("head").at("fc2"))};
  }
  nn::validate(params);
  return params;
}

Json score_to_json(double v) { return std::isnan(v) ? Json(nullptr) : Json(v); }
double score_from_json(const Json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

Json config_to_json(const ExperimentConfig& c) {
  const auto& syn = c.data.synthetic;
  return Json{
      {"query", {{"uncertainty", query::to_string(c.query.uncertainty)},
                 {"diversity", c.query.diversity},
                 {"budget", c.query.budget},
                 {"multiplier", c.query.multiplier},
                 {"include_bias", c.query.include_bias},
                 {"seed", c.query.seed}}},
      {"train", {{"epochs", c.train.epochs},
                 {"batch_size", c.train.batch_size},
                 {"lr", c.train.lr},
                 {"lr_decay_factor", c.train.lr_decay_factor},
                 {"lr_decay_epoch", c.train.lr_decay_epoch},
                 {"lambda", c.train.lambda},
                 {"margin", c.train.margin},
                 {"grad_stop_epoch", c.train.grad_stop_epoch},
                 {"seed", c.train.seed}}},
      {"model", {{"hidden", c.hidden}, {"head_hidden", c.head_hidden}}},
      {"init_mode", to_string(c.init_mode)},
      {"max_iterations", c.max_iterations},
      {"target_labeled", c.target_labeled ? Json(*c.target_labeled) : Json(nullptr)},
      {"oracle", c.oracle},
      {"initial_labeled", c.initial_labeled},
      {"seeds", c.seeds},
      {"data", {{"source", c.data.kind == DataSource::Kind::kCsv ? "csv" : "synthetic"},
                {"features", c.data.features_path},
                {"labels", c.data.labels_path},
                {"splits", c.data.splits_path},
                {"split_seed", c.data.split_seed},
                {"num_classes", syn.num_classes},
                {"feature_dim", syn.feature_dim},
                {"pool_size", syn.pool_size},
                {"val_size", syn.val_size},
                {"test_size", syn.test_size},
                {"max_labels", syn.max_labels},
                {"noise_sigma", syn.noise_sigma},
                {"seed", syn.seed}}},
      {"audit_scores", c.audit_scores},
  };
}

ExperimentConfig config_from_json(const Json& j) {
  ExperimentConfig c;
  const auto& q = j.at("query");
  c.query.uncertainty = query::parse_uncertainty(q.at("uncertainty").get<std::string>());
  c.query.diversity = q.at("diversity").get<bool>();
  c.query.budget = q.at("budget").get<int>();
  c.query.multiplier = q.at("multiplier").get<int>();
  c.query.include_bias = q.at("include_bias").get<bool>();
  c.query.seed = q.at("seed").get<std::uint64_t>();
  const auto& t = j.at("train");
  c.train.epochs = t.at("epochs").get<int>();
  c.train.batch_size = t.at("batch_size").get<int>();
  c.train.lr = t.at("lr").get<double>();
  c.train.lr_decay_factor = t.at("lr_decay_factor").get<double>();
  c.train.lr_decay_epoch = t.at("lr_decay_epoch").get<int>();
  c.train.lambda = t.at("lambda").get<double>();
  c.train.margin = t.at("margin").get<double>();
  c.train.grad_stop_epoch = t.at("grad_stop_epoch").get<int>();
  c.train.seed = t.at("seed").get<std::uint64_t>();
  c.hidden = j.at("model").at("hidden").get<std::vector<std::size_t>>();
  c.head_hidden = j.at("model").at("head_hidden").get<std::size_t>();
  c.init_mode = parse_init_mode(j.at("init_mode").get<std::string>());
  c.max_iterations = j.at("max_iterations").get<int>();
  if (!j.at("target_labeled").is_null()) c.target_labeled = j.at("target_labeled").get<std::size_t>();
  c.oracle = j.at("oracle").get<bool>();
  c.initial_labeled = j.at("initial_labeled").get<std::size_t>();
  c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  const auto& d = j.at("data");
  c.data.kind = d.at("source").get<std::string>() == "csv" ? DataSource::Kind::kCsv : DataSource::Kind::kSynthetic;
  c.data.features_path = d.at("features").get<std::string>();
  c.data.labels_path = d.at("labels").get<std::string>();
  c.data.splits_path = d.at("splits").get<std::string>();
  c.data.split_seed = d.at("split_seed").get<std::uint64_t>();
  auto& syn = c.data.synthetic;
  syn.num_classes = d.at("num_classes").get<std::size_t>();
  syn.feature_dim = d.at("feature_dim").get<std::size_t>();
  syn.pool_size = d.at("pool_size").get<std::size_t>();
  syn.val_size = d.at("val_size").get<std::size_t>();
  syn.test_size = d.at("test_size").get<std::size_t>();
  syn.max_labels = d.at("max_labels").get<std::size_t>();
  syn.noise_sigma = d.at("noise_sigma").get<double>();
  syn.seed = d.at("seed").get<std::uint64_t>();
  c.audit_scores = j.at("audit_scores").get<bool>();
  c.validate();
  return c;
}

Json pool_to_json(const DatasetPool& pool) {
  Json samples = Json::array();
  for (const auto& [id, s] : pool.samples) {
    Json labels = nullptr;
    if (s.true_labels) labels = *s.true_labels;
    samples.push_back(Json{{"id", id}, {"features", s.features}, {"labels", labels}});
  }
  return Json{{"num_classes", pool.num_classes},
              {"feature_dim", pool.feature_dim},
              {"class_names", pool.class_names},
              {"labeled", pool.labeled},
              {"unlabeled", pool.unlabeled},
              {"validation", pool.validation},
              {"test", pool.test},
              {"samples", samples}};
}

DatasetPool pool_from_json(const Json& j) {
  DatasetPool pool;
  pool.num_classes = j.at("num_classes").get<std::size_t>();
  pool.feature_dim = j.at("feature_dim").get<std::size_t>();
  pool.class_names = j.at("class_names").get<std::vector<std::string>>();
  pool.labeled = j.at("labeled").get<std::set<SampleId>>();
  pool.unlabeled = j.at("unlabeled").get<std::set<SampleId>>();
  pool.validation = j.at("validation").get<std::set<SampleId>>();
  pool.test = j.at("test").get<std::set<SampleId>>();
  for (const auto& s : j.at("samples")) {
    Sample sample;
    sample.id = s.at("id").get<std::string>();
    sample.features = s.at("features").get<std::vector<double>>();
    if (!s.at("labels").is_null()) sample.true_labels = s.at("labels").get<LabelVector>();
    pool.samples.emplace(sample.id, std::move(sample));
  }
  check_pool_invariants(pool);
  return pool;
}

Json report_to_json(const MetricReport& r) {
  return Json{{"micro_f1", r.micro_f1}, {"macro_f1", r.macro_f1},
              {"per_class_f1", r.per_class_f1}, {"num_labeled", r.num_labeled}};
}

MetricReport report_from_json(const Json& j) {
  MetricReport r;
  r.micro_f1 = j.at("micro_f1").get<double>();
  r.macro_f1 = j.at("macro_f1").get<double>();
  r.per_class_f1 = j.at("per_class_f1").get<std::vector<double>>();
  r.num_labeled = j.at("num_labeled").get<std::size_t>();
  return r;
}

}  // namespace

std::string save_checkpoint(const ALState& state) {
  Json history = Json::array();
  for (const auto& r : state.history) history.push_back(report_to_json(r));
  Json selections = Json::array();
  for (const auto& s : state.selections) {
    selections.push_back(Json{{"iteration", s.iteration}, {"sample_id", s.sample_id},
                              {"strategy", s.strategy}, {"score", score_to_json(s.score)}});
  }
  Json pending = nullptr;
  if (state.pending) {
    pending = Json{{"iteration", state.pending->iteration},
                   {"ids", state.pending->ids},
                   {"issued_at", state.pending->issued_at},
                   {"received", state.pending->received}};
  }
  Json doc{{"format_version", kCheckpointFormatVersion},
           {"seed", state.seed},
           {"tau", state.tau},
           {"config", config_to_json(state.config)},
           {"params_now", network_to_json(state.params_now)},
           {"params_prev", network_to_json(state.params_prev)},
           {"history", history},
           {"selections", selections},
           {"pending", pending},
           {"pool", pool_to_json(state.pool)}};
  return doc.dump();
}

ALState load_checkpoint(const std::string& bytes) {
  Json doc;
  try {
    doc = Json::parse(bytes);
  } catch (const Json::parse_error& e) {
    fail(ErrorCode::kData, std::string("corrupt checkpoint: ") + e.what());
  }
  try {
    require(doc.is_object() && doc.contains("format_version"), ErrorCode::kData,
            "checkpoint has no format_version");
    const int version = doc.at("format_version").get<int>();
    require(version == kCheckpointFormatVersion, ErrorCode::kData,
            "unsupported checkpoint format_version " + std::to_string(version) + " (expected " +
                std::to_string(kCheckpointFormatVersion) + ")");
    ALState state;
    state.seed = doc.at("seed").get<std::uint64_t>();
    state.tau = doc.at("tau").get<std::uint64_t>();
    state.config = config_from_json(doc.at("config"));
    state.params_now = network_from_json(doc.at("params_now"));
    state.params_prev = network_from_json(doc.at("params_prev"));
    for (const auto& r : doc.at("history")) state.history.push_back(report_from_json(r));
    for (const auto& s : doc.at("selections")) {
      state.selections.push_back({s.at("iteration").get<std::uint64_t>(), s.at("sample_id").get<std::string>(),
                                  s.at("strategy").get<std::string>(), score_from_json(s.at("score"))});
    }
    if (!doc.at("pending").is_null()) {
      const auto& p = doc.at("pending");
      state.pending = PendingBatch{p.at("iteration").get<std::uint64_t>(),
                                   p.at("ids").get<std::vector<SampleId>>(),
                                   p.at("issued_at").get<std::string>(),
                                   p.at("received").get<LabelMap>()};
    }
    state.pool = pool_from_json(doc.at("pool"));
    return state;
  } catch (const Json::exception& e) {
    fail(ErrorCode::kData, std::string("malformed checkpoint: ") + e.what());
  }
}

}  // namespace mlal
