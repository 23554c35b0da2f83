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

#include "report.hpp"

#include <fstream>

#include "idioprobe/error.hpp"

namespace idioprobe::app {

using nlohmann::json;

namespace {

template <typename T>
json optional_json(const std::optional<T>& v) {
  return v ? to_json(*v) : json(nullptr);
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json probe_json(const RidgeProbe& p) {
  return {{"weights", p.weights}, {"bias", p.bias}, {"alpha", p.alpha}};
}

json probe_set_json(const ProbeScope& scope, std::span<const RidgeProbe> probes) {
  double bias = 0.0;
  json folds = json::array();
  for (const auto& p : probes) {
    folds.push_back(probe_json(p));
    bias += p.bias;
  }
  return {{"scope", scope.kind == ScopeKind::Person ? "PERSON" : "POPULATION"},
          {"participant_id", scope.participant_id},
          {"alpha", probes.empty() ? 0.0 : probes.front().alpha},
          {"mean_weights", mean_fold_weights(probes)},
          {"mean_bias", probes.empty() ? 0.0 : bias / static_cast<double>(probes.size())},
          {"folds", folds}};
}

}  // namespace

json to_json(const ProbeResult& r) {
  return {{"scope", r.scope.kind == ScopeKind::Person ? "PERSON" : "POPULATION"},
          {"participant_id", r.scope.participant_id},
          {"feature", r.feature_name},
          {"layer", r.layer},
          {"pca_dim", r.pca_dim},
          {"per_fold_rho", r.per_fold_rho},
          {"mean_rho", r.mean_rho},
          {"alpha_used", r.alpha_used},
          {"alpha_fold", r.alpha_fold},
          {"n_words_per_fold", r.n_words_per_fold},
          {"undefined_folds", r.undefined_folds}};
}

json to_json(const Comparison& c) {
  return {{"delta_mean", c.delta_mean}, {"t", c.t}, {"p", c.p}, {"log10_p", c.log10_p}, {"df", c.df}};
}

json to_json(const stats::TTest& t) {
  return {{"t", t.t}, {"p", t.p}, {"df", t.df}, {"log10_p", t.log10_p}};
}

json to_json(const stats::BootstrapCI& ci) {
  return {{"low", ci.low}, {"high", ci.high}, {"b", ci.b}, {"confidence", ci.confidence}, {"seed", ci.seed}};
}

json to_json(const CellKey& key) {
  return {{"layer", key.layer}, {"pca_dim", key.pca_dim}, {"feature", key.feature}};
}

json to_json(const SweepReport& report) {
  json assignment = json::array();
  for (const auto& [s, f] : report.plan.assignment()) {
    assignment.push_back({s.corpus_id, s.sentence_id, f});
  }
  json pca = json::array();
  for (const auto& p : report.pca) {
    pca.push_back({{"layer", p.layer},
                   {"pca_dim", p.pca_dim},
                   {"input_dim", p.input_dim},
                   {"n_rows", p.n_rows},
                   {"retained_variance", p.retained_variance},
                   {"explained_variance_ratio", p.explained_variance_ratio}});
  }
  json cells = json::array();
  for (const auto& c : report.cells) {
    json person = json::array();
    for (const auto& p : c.person) person.push_back(to_json(p.result));
    json per_participant = json::array();
    for (const auto& p : c.population.per_participant) per_participant.push_back(to_json(p));
    json cell = to_json(c.key);
    cell["person"] = person;
    cell["population"] = to_json(c.population.result);
    cell["population_per_participant"] = per_participant;
    cell["coverage"] = c.coverage;
    cell["comparison"] = optional_json(c.comparison);
    cell["cohens_d"] = optional_number(c.cohens_d);
    cell["delta_ci"] = c.delta_ci ? to_json(*c.delta_ci) : json(nullptr);
    cells.push_back(std::move(cell));
  }
  return {{"participants", report.participants},
          {"fold_plan",
           {{"k", report.plan.k()},
            {"seed", report.plan.seed()},
            {"unit", "sentence (corpus_id, sentence_id)"},
            {"assignment", assignment}}},
          {"alpha_grid", report.alpha_grid},
          {"alpha_selection", {{"validation_fold", 0}, {"train_folds", "all others"}}},
          {"bootstrap",
           {{"b", report.bootstrap_b},
            {"confidence", report.confidence},
            {"seed", report.bootstrap_seed},
            {"statistic", "mean person-minus-population rho"}}},
          {"pca", pca},
          {"cells", cells},
          {"probe_result_count", report.probe_result_count()}};
}

json to_json(const TransferMatrix& m) {
  json rho = json::array();
  for (std::size_t i = 0; i < m.rho.rows(); ++i) {
    const auto row = m.rho.row(i);
    rho.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return {{"participant_ids", m.participant_ids},
          {"rho", rho},
          {"self_mean", m.self_mean},
          {"other_mean", m.other_mean},
          {"self_vs_other", optional_json(m.self_vs_other)}};
}

json to_json(const WeightGeometry& g) {
  return {{"mean_pairwise_cosine", g.mean_pairwise_cosine},
          {"mean_cosine_to_population", g.mean_cosine_to_population},
          {"n_pairs", g.n_pairs},
          {"weight_vectors", "mean of per-fold weights"}};
}

json to_json(const SplitHalfSummary& s) {
  return {{"participant_ids", s.participant_ids},
          {"cosines", s.cosines},
          {"mean_cosine", s.mean_cosine},
          {"versus_zero", optional_json(s.versus_zero)},
          {"session_order", "(corpus_id, sentence_id, word_pos)"}};
}

json to_json(const ResidualSummary& s) {
  json per = json::array();
  for (const auto& r : s.per_participant) per.push_back(to_json(r));
  return {{"mode", s.mode == ResidualMode::Evaluate ? "EVALUATE" : "RETRAIN"},
          {"mean_rho", s.mean_rho},
          {"unresidualized_rho", s.unresidualized_rho},
          {"versus_zero", optional_json(s.versus_zero)},
          {"per_participant", per}};
}

json to_json(const ConfoundControl& c) {
  return {{"feature", c.feature},
          {"person_raw", c.person_raw},
          {"pop_raw", c.pop_raw},
          {"person_residualized", c.person_residualized},
          {"pop_residualized", c.pop_residualized},
          {"residualized_comparison", optional_json(c.residualized_comparison)},
          {"mean_r_squared", c.mean_r_squared},
          {"r_squared", c.r_squared},
          {"warnings", c.warnings}};
}

json to_json(const ControlOutcome& c) {
  json out = {{"control_kind", std::string(to_string(c.kind))},
              {"person_rho", c.person_rho},
              {"pop_rho", c.pop_rho},
              {"delta", c.delta},
              {"p", optional_number(c.p)},
              {"detail", c.detail}};
  if (c.n_permutations) {
    out["n_permutations"] = *c.n_permutations;
    out["permutation_deltas"] = c.permutation_deltas;
  }
  return out;
}

json to_json(const CrossDatasetResult& r) {
  return {{"train_corpus", r.train_corpus},
          {"test_corpus", r.test_corpus},
          {"feature", r.feature},
          {"within_rho", r.within_rho},
          {"cross_rho", r.cross_rho},
          {"retention", optional_number(r.retention)},
          {"alpha_used", r.alpha_used}};
}

json probes_to_json(const SweepCell& cell) {
  json person = json::array();
  for (const auto& p : cell.person) person.push_back(probe_set_json(p.result.scope, p.fold_probes));
  json out = to_json(cell.key);
  out["person"] = person;
  out["population"] = probe_set_json(ProbeScope::population(), cell.population.fold_probes);
  return out;
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

void write_json(const json& doc, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  out << dump(doc);
  if (!out) throw Error(Errc::IoError, "write failed: " + path.string());
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(Errc::ParseError, path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// tables

namespace {

std::string cell_text(const json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (const char ch : s) {
      if (ch == '"') quoted += '"';
      quoted += ch;
    }
    return quoted + "\"";
  }
  return v.dump();
}

class Csv {
 public:
  explicit Csv(std::vector<std::string> header) : header_(std::move(header)) {}
  void add(std::vector<json> row) { rows_.push_back(std::move(row)); }
  bool empty() const { return rows_.empty(); }
  void save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
    for (std::size_t i = 0; i < header_.size(); ++i) out << (i ? "," : "") << header_[i];
    out << '\n';
    for (const auto& row : rows_) {
      for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << cell_text(row[i]);
      out << '\n';
    }
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<json>> rows_;
};

json field(const json& obj, const char* key) {
  return obj.is_object() && obj.contains(key) ? obj.at(key) : json(nullptr);
}

json mean_of(const json& results) {
  if (!results.is_array() || results.empty()) return nullptr;
  double sum = 0.0;
  for (const auto& r : results) sum += r.at("mean_rho").get<double>();
  return sum / static_cast<double>(results.size());
}

}  // namespace

std::vector<std::string> write_tables(const json& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> written;
  auto save = [&](const Csv& csv, const std::string& name) {
    if (csv.empty()) return;
    csv.save(dir / name);
    written.push_back(name);
  };

  const json sweep = field(report, "sweep");
  if (sweep.is_object()) {
    Csv t1({"layer", "pca_dim", "feature", "person_rho", "pop_rho", "delta", "t", "p", "log10_p",
            "cohens_d", "delta_ci_low", "delta_ci_high", "n_participants"});
    Csv per({"layer", "pca_dim", "feature", "participant_id", "person_rho", "pop_rho",
             "alpha_person", "alpha_population", "coverage"});
    for (const auto& c : sweep.at("cells")) {
      const json cmp = field(c, "comparison");
      const json ci = field(c, "delta_ci");
      const json person_mean = mean_of(c.at("person"));
      const double pop = c.at("population").at("mean_rho").get<double>();
      t1.add({c.at("layer"), c.at("pca_dim"), c.at("feature"), person_mean, pop,
              person_mean.is_null() ? json(nullptr) : json(person_mean.get<double>() - pop),
              field(cmp, "t"), field(cmp, "p"), field(cmp, "log10_p"), c.at("cohens_d"),
              field(ci, "low"), field(ci, "high"), c.at("person").size()});
      const auto& persons = c.at("person");
      const auto& pops = c.at("population_per_participant");
      for (std::size_t i = 0; i < persons.size(); ++i) {
        per.add({c.at("layer"), c.at("pca_dim"), c.at("feature"), persons[i].at("participant_id"),
                 persons[i].at("mean_rho"), pops[i].at("mean_rho"), persons[i].at("alpha_used"),
                 pops[i].at("alpha_used"), c.at("coverage")[i]});
      }
    }
    save(t1, "table1_person_vs_population.csv");
    save(per, "per_participant.csv");
  }

  const json analyses = field(report, "analyses");
  if (!analyses.is_object()) return written;

  if (analyses.contains("transfer")) {
    Csv summary({"layer", "pca_dim", "feature", "self_mean", "other_mean", "t", "p", "log10_p",
                 "mean_pairwise_cosine", "mean_cosine_to_population"});
    Csv cells({"layer", "pca_dim", "feature", "probe_of", "scored_on", "rho"});
    for (const auto& e : analyses.at("transfer")) {
      const json& m = e.at("matrix");
      const json cmp = field(m, "self_vs_other");
      const json geo = field(e, "weight_geometry");
      summary.add({e.at("layer"), e.at("pca_dim"), e.at("feature"), m.at("self_mean"),
                   m.at("other_mean"), field(cmp, "t"), field(cmp, "p"), field(cmp, "log10_p"),
                   field(geo, "mean_pairwise_cosine"), field(geo, "mean_cosine_to_population")});
      const auto& ids = m.at("participant_ids");
      for (std::size_t i = 0; i < ids.size(); ++i) {
        for (std::size_t j = 0; j < ids.size(); ++j) {
          cells.add({e.at("layer"), e.at("pca_dim"), e.at("feature"), ids[i], ids[j],
                     m.at("rho")[i][j]});
        }
      }
    }
    save(summary, "transfer_summary.csv");
    save(cells, "transfer_matrix.csv");
  }

  if (analyses.contains("split_half")) {
    Csv t({"layer", "pca_dim", "feature", "participant_id", "cosine"});
    for (const auto& e : analyses.at("split_half")) {
      const json& s = e.at("summary");
      for (std::size_t i = 0; i < s.at("participant_ids").size(); ++i) {
        t.add({e.at("layer"), e.at("pca_dim"), e.at("feature"), s.at("participant_ids")[i],
               s.at("cosines")[i]});
      }
      t.add({e.at("layer"), e.at("pca_dim"), e.at("feature"), "MEAN", s.at("mean_cosine")});
    }
    save(t, "split_half.csv");
  }

  if (analyses.contains("residual")) {
    Csv t({"layer", "pca_dim", "feature", "mode", "residual_rho", "unresidualized_rho", "t", "p",
           "log10_p"});
    for (const auto& e : analyses.at("residual")) {
      for (const auto& s : e.at("summaries")) {
        const json test = field(s, "versus_zero");
        t.add({e.at("layer"), e.at("pca_dim"), e.at("feature"), s.at("mode"), s.at("mean_rho"),
               s.at("unresidualized_rho"), field(test, "t"), field(test, "p"),
               field(test, "log10_p")});
      }
    }
    save(t, "residual_independence.csv");
  }

  if (analyses.contains("confounds")) {
    Csv t({"layer", "pca_dim", "feature", "person_rho_raw", "pop_rho_raw",
           "person_rho_residualized", "pop_rho_residualized", "p_residualized",
           "log10_p_residualized", "mean_r_squared"});
    for (const auto& e : analyses.at("confounds")) {
      const json& c = e.at("result");
      const json cmp = field(c, "residualized_comparison");
      t.add({e.at("layer"), e.at("pca_dim"), c.at("feature"), c.at("person_raw"), c.at("pop_raw"),
             c.at("person_residualized"), c.at("pop_residualized"), field(cmp, "p"),
             field(cmp, "log10_p"), c.at("mean_r_squared")});
    }
    save(t, "table2_confounds.csv");
  }

  if (analyses.contains("controls")) {
    Csv t({"layer", "pca_dim", "feature", "condition", "person_rho", "pop_rho", "delta", "p",
           "n_permutations"});
    for (const auto& e : analyses.at("controls")) {
      const json full = field(e, "full_model");
      if (full.is_object()) {
        t.add({e.at("layer"), e.at("pca_dim"), e.at("feature"), "FULL_MODEL", full.at("person_rho"),
               full.at("pop_rho"), full.at("delta"), full.at("p"), nullptr});
      }
      for (const auto& c : e.at("outcomes")) {
        t.add({e.at("layer"), e.at("pca_dim"), e.at("feature"), c.at("control_kind"),
               c.at("person_rho"), c.at("pop_rho"), c.at("delta"), c.at("p"),
               field(c, "n_permutations")});
      }
    }
    save(t, "table3_controls.csv");
  }

  if (analyses.contains("cross_dataset")) {
    Csv t({"layer", "pca_dim", "feature", "train_corpus", "test_corpus", "within_rho", "cross_rho",
           "retention"});
    for (const auto& e : analyses.at("cross_dataset")) {
      const json& r = e.at("result");
      t.add({e.at("layer"), e.at("pca_dim"), r.at("feature"), r.at("train_corpus"),
             r.at("test_corpus"), r.at("within_rho"), r.at("cross_rho"), r.at("retention")});
    }
    save(t, "cross_dataset.csv");
  }
  return written;
}

}  // namespace idioprobe::app
