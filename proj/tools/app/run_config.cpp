/*
 * Copyright 2026 The idioprobe Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "run_config.hpp"

#include <fstream>
#include <set>
#include <thread>

#include "idioprobe/analyses.hpp"
#include "idioprobe/error.hpp"
#include "idioprobe/executor.hpp"

namespace idioprobe::app {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& msg) { throw Error(Errc::ConfigInvalid, msg); }

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (!known.contains(key)) invalid("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
T get(const json& obj, const char* key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    invalid("bad value for '" + std::string(key) + "' in " + where);
  }
}

template <typename T>
void read_if(const json& obj, const char* key, T& out, const std::string& where) {
  if (obj.contains(key)) out = get<T>(obj, key, where);
}

/// "ALL" or a list of strings; ALL maps to the empty list.
void read_list_or_all(const json& obj, const char* key, std::vector<std::string>& out) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  if (v.is_string() && v.get<std::string>() == "ALL") {
    out.clear();
    return;
  }
  if (!v.is_array()) invalid("'" + std::string(key) + "' must be \"ALL\" or a list");
  out.clear();
  for (const auto& e : v) {
    if (!e.is_string()) invalid("'" + std::string(key) + "' entries must be strings");
    out.push_back(e.get<std::string>());
  }
}

json list_or_all(const std::vector<std::string>& v) {
  return v.empty() ? json("ALL") : json(v);
}

}  // namespace

std::filesystem::path RunConfig::embedding_path(std::uint32_t layer) const {
  std::string p = embeddings;
  const std::string token = "{layer}";
  for (auto pos = p.find(token); pos != std::string::npos; pos = p.find(token)) {
    p.replace(pos, token.size(), std::to_string(layer));
  }
  return p;
}

SweepConfig RunConfig::sweep_config() const {
  SweepConfig sc;
  for (const auto l : layers) sc.layer_files[l] = embedding_path(l);
  sc.layers = layers;
  sc.pca_dims = pca_dims;
  sc.features = features;
  sc.participants = participants;
  sc.k_folds = k_folds;
  sc.fold_seed = seed_folds;
  sc.grid = AlphaGrid(alpha_grid);
  sc.bootstrap_seed = seed_bootstrap;
  sc.bootstrap_b = bootstrap_b;
  sc.confidence = confidence;
  return sc;
}

RunConfig config_from_json(const json& input) {
  if (!input.is_object()) invalid("config must be a JSON object");
  const json& doc = input.contains("config") && input.at("config").is_object() ? input.at("config")
                                                                               : input;
  reject_unknown(doc,
                 {"paths", "layers", "pca_dims", "features", "participants", "k_folds",
                  "alpha_grid", "seeds", "bootstrap", "analyses", "threads"},
                 "config");
  RunConfig c;
  if (doc.contains("paths")) {
    const json& p = doc.at("paths");
    reject_unknown(p, {"embeddings", "targets", "out", "static_embeddings"}, "paths");
    read_if(p, "embeddings", c.embeddings, "paths");
    read_if(p, "targets", c.targets, "paths");
    read_if(p, "out", c.out, "paths");
    read_if(p, "static_embeddings", c.static_embeddings, "paths");
  }
  read_if(doc, "layers", c.layers, "config");
  read_if(doc, "pca_dims", c.pca_dims, "config");
  read_list_or_all(doc, "features", c.features);
  read_list_or_all(doc, "participants", c.participants);
  read_if(doc, "k_folds", c.k_folds, "config");
  read_if(doc, "alpha_grid", c.alpha_grid, "config");
  if (doc.contains("seeds")) {
    const json& s = doc.at("seeds");
    reject_unknown(s, {"folds", "bootstrap", "controls"}, "seeds");
    read_if(s, "folds", c.seed_folds, "seeds");
    read_if(s, "bootstrap", c.seed_bootstrap, "seeds");
    read_if(s, "controls", c.seed_controls, "seeds");
  }
  if (doc.contains("bootstrap")) {
    const json& b = doc.at("bootstrap");
    reject_unknown(b, {"b", "confidence"}, "bootstrap");
    read_if(b, "b", c.bootstrap_b, "bootstrap");
    read_if(b, "confidence", c.confidence, "bootstrap");
  }
  if (doc.contains("analyses")) {
    const json& a = doc.at("analyses");
    reject_unknown(a,
                   {"residual_retrain", "controls", "n_permutations", "negative_feature",
                    "train_corpus", "test_corpus"},
                   "analyses");
    read_if(a, "residual_retrain", c.residual_retrain, "analyses");
    read_list_or_all(a, "controls", c.controls);
    read_if(a, "n_permutations", c.n_permutations, "analyses");
    read_if(a, "negative_feature", c.negative_feature, "analyses");
    read_if(a, "train_corpus", c.train_corpus, "analyses");
    read_if(a, "test_corpus", c.test_corpus, "analyses");
  }
  if (doc.contains("threads")) {
    const json& t = doc.at("threads");
    if (t.is_string() && t.get<std::string>() == "AUTO") {
      c.threads = 0;
    } else if (t.is_number_unsigned()) {
      c.threads = t.get<std::size_t>();
    } else {
      invalid("'threads' must be \"AUTO\" or a non-negative integer");
    }
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) invalid("cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    invalid(path.string() + ": " + e.what());
  }
  return config_from_json(doc);
}

json config_to_json(const RunConfig& c, bool with_runtime) {
  json paths = {{"embeddings", c.embeddings}, {"targets", c.targets}};
  if (!c.static_embeddings.empty()) paths["static_embeddings"] = c.static_embeddings;
  if (with_runtime) paths["out"] = c.out;
  json doc = {
      {"paths", paths},
      {"layers", c.layers},
      {"pca_dims", c.pca_dims},
      {"features", list_or_all(c.features)},
      {"participants", list_or_all(c.participants)},
      {"k_folds", c.k_folds},
      {"alpha_grid", c.alpha_grid},
      {"seeds", {{"folds", c.seed_folds}, {"bootstrap", c.seed_bootstrap}, {"controls", c.seed_controls}}},
      {"bootstrap", {{"b", c.bootstrap_b}, {"confidence", c.confidence}}},
      {"analyses",
       {{"residual_retrain", c.residual_retrain},
        {"controls", list_or_all(c.controls)},
        {"n_permutations", c.n_permutations},
        {"negative_feature", c.negative_feature},
        {"train_corpus", c.train_corpus},
        {"test_corpus", c.test_corpus}}},
  };
  if (with_runtime) doc["threads"] = c.threads == 0 ? json("AUTO") : json(c.threads);
  return doc;
}

void validate(const RunConfig& c) {
  if (c.targets.empty()) invalid("no targets file given (--targets)");
  if (!std::filesystem::exists(c.targets)) invalid("targets file not found: " + c.targets);
  if (c.embeddings.empty()) invalid("no embeddings given (--embeddings)");
  if (c.layers.empty()) invalid("no layers requested");
  for (const auto l : c.layers) {
    const auto p = c.embedding_path(l);
    if (!std::filesystem::exists(p)) {
      throw Error(Errc::MissingLayerFile, "embedding file for layer " + std::to_string(l) +
                                              " not found: " + p.string());
    }
  }
  if (!c.static_embeddings.empty() && !std::filesystem::exists(c.static_embeddings)) {
    invalid("static embedding file not found: " + c.static_embeddings);
  }
  if (c.pca_dims.empty()) invalid("no PCA dims requested");
  for (const auto d : c.pca_dims) {
    if (d == 0) invalid("PCA dims must be positive");
  }
  if (c.k_folds < 2) invalid("k_folds must be >= 2");
  try {
    AlphaGrid grid(c.alpha_grid);
  } catch (const Error& e) {
    invalid(std::string("alpha_grid: ") + e.what());
  }
  if (!(c.confidence > 0.0 && c.confidence < 1.0)) invalid("confidence must be in (0, 1)");
  if (c.bootstrap_b != 0 && c.bootstrap_b < 100) invalid("bootstrap b must be 0 or >= 100");
  if (c.n_permutations == 0) invalid("n_permutations must be >= 1");
  for (const auto& k : c.controls) {
    try {
      parse_control_kind(k);
    } catch (const Error& e) {
      invalid(e.what());
    }
  }
}

std::size_t effective_threads(const RunConfig& c) {
  std::size_t fallback = c.threads;
  if (fallback == 0) fallback = std::max(1u, std::thread::hardware_concurrency());
  return threads_from_env(fallback);
}

}  // namespace idioprobe::app
