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

#include "commands.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include <CLI11/CLI11.hpp>

#include "idioprobe/analyses.hpp"
#include "idioprobe/error.hpp"
#include "idioprobe/sweep.hpp"
#include "report.hpp"

namespace idioprobe::app {

using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

bool is_validation(Errc code) {
  switch (code) {
    case Errc::ConfigInvalid:
    case Errc::InvalidArgument:
    case Errc::FeatureUnknown:
    case Errc::MissingLayerFile:
    case Errc::CorpusMissing:
      return true;
    default:
      return false;
  }
}

std::string file_stem(const CellKey& key) {
  std::string feature = key.feature;
  for (auto& ch : feature) {
    if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' || ch == '.')) ch = '_';
  }
  return "L" + std::to_string(key.layer) + "_d" + std::to_string(key.pca_dim) + "_" + feature;
}

/// Inputs loaded once per command run.
struct Inputs {
  RunConfig config;
  SweepConfig sweep_config;
  std::vector<TargetTable> tables;
  std::vector<EmbeddingMatrix> layers;
  std::optional<EmbeddingMatrix> static_embeddings;
  std::vector<std::string> features;
};

Inputs load_inputs(const RunConfig& config, std::ostream& log) {
  validate(config);
  Inputs in;
  in.config = config;
  in.sweep_config = config.sweep_config();
  const auto all_tables = read_targets(config.targets);
  in.tables = filter_participants(all_tables, config.participants);
  const auto known = all_features(in.tables);
  in.features = config.features.empty() ? known : config.features;
  auto require_feature = [&](const std::string& f) {
    if (std::find(known.begin(), known.end(), f) == known.end()) {
      throw Error(Errc::FeatureUnknown, "unknown feature '" + f + "' (targets have: " +
                                            [&] {
                                              std::string s;
                                              for (const auto& k : known) s += (s.empty() ? "" : ", ") + k;
                                              return s;
                                            }() + ")");
    }
  };
  for (const auto& f : in.features) require_feature(f);
  if (!config.negative_feature.empty()) require_feature(config.negative_feature);
  in.sweep_config.features = in.features;
  for (const auto l : config.layers) {
    log << "reading layer " << l << " from " << config.embedding_path(l).string() << "\n";
    in.layers.push_back(read_embeddings(config.embedding_path(l)));
  }
  if (!config.static_embeddings.empty()) {
    in.static_embeddings = read_embeddings(config.static_embeddings);
  }
  return in;
}

/// Position of a cell's layer in the loaded list.
std::size_t layer_slot(const Inputs& in, std::uint32_t layer) {
  const auto it = std::find(in.config.layers.begin(), in.config.layers.end(), layer);
  return static_cast<std::size_t>(it - in.config.layers.begin());
}

json cell_header(const CellKey& key) { return to_json(key); }

std::vector<std::string> corpora_of(std::span<const TargetTable> tables) {
  std::set<std::string> s;
  for (const auto& t : tables) s.insert(t.corpus_id());
  return {s.begin(), s.end()};
}

json run_analysis(Command cmd, const Inputs& in, const SweepReport& sweep, const Executor& ex,
                  std::ostream& log) {
  json list = json::array();
  const auto& grid = in.sweep_config.grid;
  // Projected embeddings per (layer, pca_dim), recomputed on demand.
  std::optional<CellKey> cached_key;
  std::optional<ProjectedLayer> cached;
  auto projected_for = [&](const CellKey& key) -> const ProjectedLayer& {
    if (!cached_key || cached_key->layer != key.layer || cached_key->pca_dim != key.pca_dim) {
      cached = reduce(in.layers[layer_slot(in, key.layer)], key.pca_dim);
      cached_key = key;
    }
    return *cached;
  };

  for (const auto& cell : sweep.cells) {
    const CellKey& key = cell.key;
    log << command_name(cmd) << ": layer " << key.layer << ", d=" << key.pca_dim << ", "
        << key.feature << "\n";
    json entry = cell_header(key);
    switch (cmd) {
      case Command::Transfer: {
        const auto data = align_participants(projected_for(key).projected, in.tables, key.feature);
        entry["matrix"] = to_json(transfer_matrix(cell.person, data, sweep.plan, &ex));
        entry["weight_geometry"] = cell.person.size() >= 2
                                       ? to_json(weight_geometry(cell.person, cell.population))
                                       : json(nullptr);
        break;
      }
      case Command::SplitHalf: {
        const auto data = align_participants(projected_for(key).projected, in.tables, key.feature);
        entry["summary"] = to_json(split_half_all(data, grid, &ex));
        break;
      }
      case Command::Residual: {
        const auto data = align_participants(projected_for(key).projected, in.tables, key.feature);
        PipelineRun run{cell.person, cell.population};
        json summaries = json::array();
        summaries.push_back(to_json(residual_summary(run, data, sweep.plan, ResidualMode::Evaluate)));
        if (in.config.residual_retrain) {
          summaries.push_back(to_json(residual_summary(run, data, sweep.plan, ResidualMode::Retrain)));
        }
        entry["summaries"] = summaries;
        break;
      }
      case Command::Confounds: {
        entry["result"] = to_json(confound_control(projected_for(key).projected, in.tables,
                                                   key.feature, sweep.plan, grid, &ex));
        break;
      }
      case Command::Controls: {
        std::vector<ControlKind> kinds;
        if (in.config.controls.empty()) {
          kinds = {ControlKind::Shuffle, ControlKind::RandomProjection, ControlKind::RandomEmbedding};
          if (in.static_embeddings) kinds.push_back(ControlKind::StaticEmbedding);
          if (!in.config.negative_feature.empty()) kinds.push_back(ControlKind::NegativeFeature);
        } else {
          for (const auto& k : in.config.controls) kinds.push_back(parse_control_kind(k));
        }
        ControlInputs ci;
        ci.embeddings = &in.layers[layer_slot(in, key.layer)];
        ci.targets = in.tables;
        ci.feature = key.feature;
        ci.pca_dim = key.pca_dim;
        ci.plan = &sweep.plan;
        ci.grid = &grid;
        ci.seed = in.config.seed_controls;
        ci.n_permutations = in.config.n_permutations;
        ci.static_embeddings = in.static_embeddings ? &*in.static_embeddings : nullptr;
        ci.negative_feature = in.config.negative_feature;
        ci.executor = &ex;
        double person = 0.0;
        for (const auto& p : cell.person) person += p.result.mean_rho;
        person /= static_cast<double>(cell.person.size());
        const double pop = cell.population.result.mean_rho;
        entry["full_model"] = {{"person_rho", person},
                               {"pop_rho", pop},
                               {"delta", person - pop},
                               {"p", cell.comparison ? json(cell.comparison->p) : json(nullptr)}};
        json outcomes = json::array();
        for (const auto kind : kinds) outcomes.push_back(to_json(run_control(kind, ci)));
        entry["outcomes"] = outcomes;
        break;
      }
      case Command::CrossDataset: {
        const auto data = align_participants(projected_for(key).projected, in.tables, key.feature);
        std::vector<std::pair<std::string, std::string>> directions;
        if (!in.config.train_corpus.empty() || !in.config.test_corpus.empty()) {
          directions.emplace_back(in.config.train_corpus, in.config.test_corpus);
        } else {
          const auto corpora = corpora_of(in.tables);
          if (corpora.size() != 2) {
            throw Error(Errc::ConfigInvalid,
                        "crossdataset: name --train-corpus and --test-corpus (found " +
                            std::to_string(corpora.size()) + " corpora)");
          }
          directions = {{corpora[0], corpora[1]}, {corpora[1], corpora[0]}};
        }
        for (const auto& [train, test] : directions) {
          json e = entry;
          e["result"] = to_json(cross_dataset_transfer(data, train, test, sweep.plan, grid));
          list.push_back(std::move(e));
        }
        continue;
      }
      case Command::Probe:
      case Command::Sweep:
        break;
    }
    list.push_back(std::move(entry));
  }
  return list;
}

const char* analysis_key(Command cmd) {
  switch (cmd) {
    case Command::Transfer: return "transfer";
    case Command::SplitHalf: return "split_half";
    case Command::Residual: return "residual";
    case Command::Confounds: return "confounds";
    case Command::Controls: return "controls";
    case Command::CrossDataset: return "cross_dataset";
    default: return nullptr;
  }
}

}  // namespace

std::string_view command_name(Command cmd) noexcept {
  switch (cmd) {
    case Command::Probe: return "probe";
    case Command::Sweep: return "sweep";
    case Command::Transfer: return "transfer";
    case Command::SplitHalf: return "splithalf";
    case Command::Residual: return "residual";
    case Command::Confounds: return "confounds";
    case Command::Controls: return "controls";
    case Command::CrossDataset: return "crossdataset";
  }
  return "unknown";
}

json run_command(Command cmd, const RunConfig& config, std::ostream& log) {
  if (cmd == Command::Probe && (config.layers.size() != 1 || config.pca_dims.size() != 1)) {
    throw Error(Errc::ConfigInvalid, "probe runs a single layer and PCA dim; use sweep for grids");
  }
  const Inputs in = load_inputs(config, log);
  const Executor ex(effective_threads(config));
  log << "participants: " << in.tables.size() << ", features: " << in.features.size()
      << ", workers: " << ex.threads() << "\n";

  const SweepReport sweep = layer_sweep(in.sweep_config, in.layers, in.tables, &ex);

  json report = {{"report_version", kReportVersion},
                 {"command", std::string(command_name(cmd))},
                 {"config", config_to_json(config, false)},
                 {"sweep", to_json(sweep)}};
  if (const char* key = analysis_key(cmd)) {
    report["analyses"] = {{key, run_analysis(cmd, in, sweep, ex, log)}};
  }

  const std::filesystem::path out = config.out;
  std::filesystem::create_directories(out / "probes");
  write_json(report, out / "report.json");
  for (const auto& cell : sweep.cells) {
    write_json(probes_to_json(cell), out / "probes" / (file_stem(cell.key) + ".json"));
  }
  const auto tables = write_tables(report, out / "tables");

  json pca = json::array();
  for (const auto& p : sweep.pca) {
    pca.push_back({{"layer", p.layer}, {"pca_dim", p.pca_dim}, {"retained_variance", p.retained_variance}});
  }
  const json meta = {
      {"report_version", kReportVersion},
      {"idioprobe_version", kVersion},
      {"command", std::string(command_name(cmd))},
      {"config", config_to_json(config, true)},
      {"seeds",
       {{"folds", config.seed_folds}, {"bootstrap", config.seed_bootstrap}, {"controls", config.seed_controls}}},
      {"pca_variance_retained", pca},
      {"protocol",
       {{"fold_unit", "sentence (corpus_id, sentence_id)"},
        {"alpha_selection_fold", 0},
        {"folds_scored", "all"},
        {"undefined_rho", "scored as 0"},
        {"split_half_order", "(corpus_id, sentence_id, word_pos)"},
        {"cosine_weight_vectors", "mean of per-fold weights"},
        {"residual_mode", config.residual_retrain ? "EVALUATE and RETRAIN" : "EVALUATE"}}},
      {"tables", tables},
  };
  write_json(meta, out / "meta.json");
  log << "wrote " << (out / "report.json").string() << "\n";
  return report;
}

void write_synth(const SynthConfig& synth, const std::filesystem::path& dir) {
  synth.validate();
  std::filesystem::create_directories(dir);
  const SynthData data = generate(synth);
  const auto abs = std::filesystem::absolute(dir);
  const auto emb = abs / ("emb_L" + std::to_string(synth.layer) + ".emb1");
  write_embeddings(data.embeddings, emb);
  write_targets(data.targets, abs / "targets.csv");

  RunConfig rc;
  rc.embeddings = (abs / "emb_L{layer}.emb1").string();
  rc.targets = (abs / "targets.csv").string();
  rc.out = (abs / "report").string();
  rc.layers = {synth.layer};
  rc.pca_dims = {std::min<std::size_t>(50, synth.dim)};
  rc.features = {kSynthSignalFeature};
  rc.negative_feature = kSynthStructuralFeature;
  write_json(config_to_json(rc, true), abs / "config.json");

  const char* person_dirs[] = {"RANDOM_UNIT", "ORTHOGONAL", "SHARED"};
  const char* corpus_dirs[] = {"SHARED", "ORTHOGONAL"};
  write_json({{"n_participants", synth.n_participants},
              {"n_sentences", synth.n_sentences},
              {"words_per_sentence", synth.words_per_sentence},
              {"dim", synth.dim},
              {"pop_strength", synth.pop_strength},
              {"person_strength", synth.person_strength},
              {"noise_sd", synth.noise_sd},
              {"person_dirs", person_dirs[static_cast<int>(synth.person_dirs)]},
              {"missing_rate", synth.missing_rate},
              {"seed", synth.seed},
              {"n_corpora", synth.n_corpora},
              {"corpus_dirs", corpus_dirs[static_cast<int>(synth.corpus_dirs)]},
              {"confound_weight", synth.confound_weight},
              {"layer", synth.layer},
              {"model_id", synth.model_id}},
             abs / "synth.json");
}

void regenerate_tables(const std::filesystem::path& dir, std::ostream& log) {
  const json report = read_json(dir / "report.json");
  if (report.value("report_version", 0) != kReportVersion) {
    throw Error(Errc::VersionUnsupported, "report.json has an unsupported report_version");
  }
  for (const auto& name : write_tables(report, dir / "tables")) log << "wrote tables/" << name << "\n";
}

// ---------------------------------------------------------------------------
// argv

namespace {

struct Flags {
  std::string config_file;
  std::string embeddings, targets, out, static_embeddings;
  std::vector<std::uint32_t> layers;
  std::vector<std::size_t> pca_dims;
  std::vector<std::string> features, participants, controls;
  std::size_t k_folds = 0;
  std::uint64_t seed_folds = 0, seed_bootstrap = 0, seed_controls = 0;
  std::size_t bootstrap_b = 0, n_permutations = 0, threads = 0;
  bool retrain = false;
  std::string negative_feature, train_corpus, test_corpus;
};

void add_run_options(CLI::App& sub, Flags& f) {
  sub.add_option("--config", f.config_file, "JSON config file (meta.json is accepted)");
  sub.add_option("--embeddings", f.embeddings, "EMB1 path, '{layer}' replaced by the layer");
  sub.add_option("--targets", f.targets, "targets CSV");
  sub.add_option("--out", f.out, "output directory");
  sub.add_option("--layers", f.layers, "layers, comma separated")->delimiter(',');
  sub.add_option("--pca-dim", f.pca_dims, "PCA dims, comma separated")->delimiter(',');
  sub.add_option("--feature", f.features, "features, comma separated (default ALL)")->delimiter(',');
  sub.add_option("--participants", f.participants, "participant filter")->delimiter(',');
  sub.add_option("--k-folds", f.k_folds, "number of CV folds");
  sub.add_option("--seed-folds", f.seed_folds, "fold assignment seed");
  sub.add_option("--seed-bootstrap", f.seed_bootstrap, "bootstrap seed");
  sub.add_option("--seed-controls", f.seed_controls, "control seed");
  sub.add_option("--bootstrap-b", f.bootstrap_b, "bootstrap resamples (0 disables)");
  sub.add_option("--threads", f.threads, "worker threads (0 = AUTO)");
}

RunConfig resolve(const CLI::App& sub, const Flags& f) {
  RunConfig c = f.config_file.empty() ? RunConfig{} : load_config(f.config_file);
  auto given = [&](const char* name) {
    const auto* opt = sub.get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
  };
  if (given("--embeddings")) c.embeddings = f.embeddings;
  if (given("--targets")) c.targets = f.targets;
  if (given("--out")) c.out = f.out;
  if (given("--static-embeddings")) c.static_embeddings = f.static_embeddings;
  if (given("--layers")) c.layers = f.layers;
  if (given("--pca-dim")) c.pca_dims = f.pca_dims;
  if (given("--feature")) {
    c.features = f.features;
    if (c.features.size() == 1 && c.features[0] == "ALL") c.features.clear();
  }
  if (given("--participants")) {
    c.participants = f.participants;
    if (c.participants.size() == 1 && c.participants[0] == "ALL") c.participants.clear();
  }
  if (given("--k-folds")) c.k_folds = f.k_folds;
  if (given("--seed-folds")) c.seed_folds = f.seed_folds;
  if (given("--seed-bootstrap")) c.seed_bootstrap = f.seed_bootstrap;
  if (given("--seed-controls")) c.seed_controls = f.seed_controls;
  if (given("--bootstrap-b")) c.bootstrap_b = f.bootstrap_b;
  if (given("--threads")) c.threads = f.threads;
  if (given("--retrain")) c.residual_retrain = f.retrain;
  if (given("--controls")) c.controls = f.controls;
  if (given("--permutations")) c.n_permutations = f.n_permutations;
  if (given("--negative-feature")) c.negative_feature = f.negative_feature;
  if (given("--train-corpus")) c.train_corpus = f.train_corpus;
  if (given("--test-corpus")) c.test_corpus = f.test_corpus;
  return c;
}

PersonDirs parse_person_dirs(const std::string& s) {
  if (s == "random" || s == "RANDOM_UNIT") return PersonDirs::RandomUnit;
  if (s == "orthogonal" || s == "ORTHOGONAL") return PersonDirs::Orthogonal;
  if (s == "shared" || s == "SHARED") return PersonDirs::Shared;
  throw Error(Errc::ConfigInvalid, "unknown person-dirs '" + s + "'");
}

CorpusDirs parse_corpus_dirs(const std::string& s) {
  if (s == "shared" || s == "SHARED") return CorpusDirs::Shared;
  if (s == "orthogonal" || s == "ORTHOGONAL") return CorpusDirs::Orthogonal;
  throw Error(Errc::ConfigInvalid, "unknown corpus-dirs '" + s + "'");
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"idioprobe: per-participant linear probes on frozen word representations"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  Flags flags;
  struct Entry {
    Command cmd;
    CLI::App* sub;
  };
  std::vector<Entry> entries;
  const std::pair<Command, const char*> commands[] = {
      {Command::Probe, "person and population CV for one layer and PCA dim"},
      {Command::Sweep, "CV over every (layer, pca_dim, feature) cell"},
      {Command::Transfer, "cross-participant transfer matrix and weight geometry"},
      {Command::SplitHalf, "split-half weight stability"},
      {Command::Residual, "person probes scored on population residuals"},
      {Command::Confounds, "pipeline on confound-residualized targets"},
      {Command::Controls, "specificity controls"},
      {Command::CrossDataset, "population transfer across corpora"},
  };
  for (const auto& [cmd, help] : commands) {
    CLI::App* sub = app.add_subcommand(std::string(command_name(cmd)), help);
    add_run_options(*sub, flags);
    entries.push_back({cmd, sub});
    if (cmd == Command::Residual) sub->add_flag("--retrain", flags.retrain, "also refit on residuals");
    if (cmd == Command::Controls) {
      sub->add_option("--controls", flags.controls, "control kinds (default: all available)")
          ->delimiter(',');
      sub->add_option("--permutations", flags.n_permutations, "SHUFFLE permutations");
      sub->add_option("--static-embeddings", flags.static_embeddings, "EMB1 file of static vectors");
      sub->add_option("--negative-feature", flags.negative_feature, "negative-control feature");
    }
    if (cmd == Command::CrossDataset) {
      sub->add_option("--train-corpus", flags.train_corpus, "corpus the probe is fit on");
      sub->add_option("--test-corpus", flags.test_corpus, "corpus the probe is scored on");
    }
  }

  std::string preset = "reference";
  std::string synth_out = "synth_data";
  std::optional<std::uint64_t> synth_seed;
  std::optional<std::size_t> synth_participants, synth_sentences, synth_dim, synth_corpora;
  std::optional<double> synth_b, synth_a, synth_missing, synth_confound;
  std::string synth_person_dirs, synth_corpus_dirs;
  CLI::App* synth = app.add_subcommand("synth", "write a synthetic dataset with planted directions");
  synth->add_option("--preset", preset, "reference | null")->check(CLI::IsMember({"reference", "null"}));
  synth->add_option("--out", synth_out, "output directory");
  synth->add_option("--seed", synth_seed, "generator seed");
  synth->add_option("--participants", synth_participants, "number of participants");
  synth->add_option("--sentences", synth_sentences, "sentences per corpus");
  synth->add_option("--dim", synth_dim, "embedding dimension");
  synth->add_option("--corpora", synth_corpora, "number of corpora");
  synth->add_option("--person-strength", synth_b, "b");
  synth->add_option("--pop-strength", synth_a, "a");
  synth->add_option("--missing-rate", synth_missing, "fraction of MISSING targets");
  synth->add_option("--confound-weight", synth_confound, "confound leakage into targets");
  synth->add_option("--person-dirs", synth_person_dirs, "random | orthogonal | shared");
  synth->add_option("--corpus-dirs", synth_corpus_dirs, "shared | orthogonal");

  std::string report_dir;
  CLI::App* report = app.add_subcommand("report", "regenerate tables/*.csv from report.json");
  report->add_option("--out", report_dir, "report directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (synth->parsed()) {
      SynthConfig sc = SynthConfig::reference();
      if (preset == "null") sc.person_strength = 0.0;
      if (synth_seed) sc.seed = *synth_seed;
      if (synth_participants) sc.n_participants = *synth_participants;
      if (synth_sentences) sc.n_sentences = *synth_sentences;
      if (synth_dim) sc.dim = *synth_dim;
      if (synth_corpora) sc.n_corpora = *synth_corpora;
      if (synth_b) sc.person_strength = *synth_b;
      if (synth_a) sc.pop_strength = *synth_a;
      if (synth_missing) sc.missing_rate = *synth_missing;
      if (synth_confound) sc.confound_weight = *synth_confound;
      if (!synth_person_dirs.empty()) sc.person_dirs = parse_person_dirs(synth_person_dirs);
      if (!synth_corpus_dirs.empty()) sc.corpus_dirs = parse_corpus_dirs(synth_corpus_dirs);
      write_synth(sc, synth_out);
      out << "wrote synthetic dataset to " << synth_out << "\n";
      return kExitOk;
    }
    if (report->parsed()) {
      regenerate_tables(report_dir, out);
      return kExitOk;
    }
    for (const auto& e : entries) {
      if (e.sub->parsed()) {
        run_command(e.cmd, resolve(*e.sub, flags), out);
        return kExitOk;
      }
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return is_validation(e.code()) ? kExitValidation : kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitValidation;
}

}  // namespace idioprobe::app
