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

#include "idioprobe/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "idioprobe/error.hpp"
#include "idioprobe/numerics.hpp"
#include "idioprobe/rng.hpp"

namespace idioprobe {

namespace {

// Seed streams.
constexpr std::uint64_t kDirectionStream = 1;
constexpr std::uint64_t kAltDirectionStream = 2;
constexpr std::uint64_t kEmbeddingStream = 100;
constexpr std::uint64_t kConfoundStream = 200;
constexpr std::uint64_t kNoiseStream = 1000;
constexpr std::uint64_t kMissingStream = 100000;
constexpr std::uint64_t kOracleStream = 0x0eac1e;

constexpr double kFreqMean = 3.0;
constexpr double kFreqSd = 1.5;

Vector random_unit(Rng& rng, std::size_t dim) {
  Vector v(dim);
  double len = 0.0;
  while (len < 1e-12) {
    for (auto& x : v) x = rng.normal();
    len = norm(v);
  }
  for (auto& x : v) x /= len;
  return v;
}

struct Directions {
  std::vector<Vector> gammas;  // per distinct population direction
  std::vector<Vector> betas;   // per participant
};

Directions make_directions(const SynthConfig& c) {
  const std::size_t n = c.n_participants;
  const std::size_t n_gamma = c.corpus_dirs == CorpusDirs::Orthogonal ? c.n_corpora : 1;
  const std::uint64_t seed = derive_seed(c.seed, kDirectionStream);
  const std::uint64_t alt_seed = derive_seed(c.seed, kAltDirectionStream);
  Directions d;

  auto columns = [](const Matrix& m, std::size_t from, std::size_t count) {
    std::vector<Vector> out;
    for (std::size_t j = from; j < from + count; ++j) out.push_back(m.column(j));
    return out;
  };
  auto independent_gammas = [&](std::uint64_t s) {
    if (n_gamma == 1) {
      Rng rng(s);
      return std::vector<Vector>{random_unit(rng, c.dim)};
    }
    return columns(orthonormal_basis(s, c.dim, n_gamma), 0, n_gamma);
  };

  switch (c.person_dirs) {
    case PersonDirs::RandomUnit: {
      d.gammas = independent_gammas(alt_seed);
      Rng rng(seed);
      for (std::size_t i = 0; i < n; ++i) d.betas.push_back(random_unit(rng, c.dim));
      break;
    }
    case PersonDirs::Orthogonal: {
      if (n + n_gamma <= c.dim) {
        const Matrix basis = orthonormal_basis(seed, c.dim, n + n_gamma);
        d.betas = columns(basis, 0, n);
        d.gammas = columns(basis, n, n_gamma);
      } else {
        d.betas = columns(orthonormal_basis(seed, c.dim, n), 0, n);
        d.gammas = independent_gammas(alt_seed);
      }
      break;
    }
    case PersonDirs::Shared: {
      const Matrix basis = orthonormal_basis(seed, c.dim, 1 + n_gamma);
      d.betas.assign(n, basis.column(0));
      d.gammas = columns(basis, 1, n_gamma);
      break;
    }
  }
  return d;
}

}  // namespace

SynthConfig SynthConfig::reference() { return SynthConfig{}; }

void SynthConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(Errc::ConfigInvalid, "synth: " + msg); };
  if (n_participants == 0) fail("n_participants must be > 0");
  if (n_sentences == 0 || words_per_sentence == 0) fail("need at least one sentence and word");
  if (dim == 0) fail("dim must be > 0");
  if (n_corpora == 0) fail("n_corpora must be > 0");
  if (n_corpora > n_participants) fail("more corpora than participants");
  if (!std::isfinite(pop_strength) || pop_strength < 0.0) fail("pop_strength must be >= 0");
  if (!std::isfinite(person_strength) || person_strength < 0.0) fail("person_strength must be >= 0");
  if (!std::isfinite(noise_sd) || !(noise_sd > 0.0)) fail("noise_sd must be > 0");
  if (!std::isfinite(confound_weight)) fail("confound_weight must be finite");
  if (!(missing_rate >= 0.0 && missing_rate < 1.0)) fail("missing_rate must be in [0, 1)");
  if (person_dirs == PersonDirs::Orthogonal && n_participants > dim) {
    fail("ORTHOGONAL person directions need n_participants <= dim");
  }
  const std::size_t n_gamma = corpus_dirs == CorpusDirs::Orthogonal ? n_corpora : 1;
  if (n_gamma > dim) fail("orthogonal corpus directions need n_corpora <= dim");
  if (person_dirs == PersonDirs::Shared && 1 + n_gamma > dim) {
    fail("SHARED person directions need dim > number of population directions");
  }
}

std::string synth_corpus_id(std::size_t corpus, std::size_t n_corpora) {
  if (n_corpora == 1) return "synth";
  return "synth" + std::string(1, static_cast<char>('A' + corpus % 26)) +
         (corpus >= 26 ? std::to_string(corpus / 26) : "");
}

std::string synth_participant_id(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "P%03zu", i + 1);
  return buf;
}

SynthData generate(const SynthConfig& c) {
  c.validate();
  const Directions dirs = make_directions(c);
  const std::size_t words_per_corpus = c.n_sentences * c.words_per_sentence;
  const std::size_t total_words = words_per_corpus * c.n_corpora;

  // Embeddings and per-word confounds, corpus-major then sentence then position.
  std::vector<WordKey> index;
  index.reserve(total_words);
  std::vector<double> values;
  values.reserve(total_words * c.dim);
  std::vector<Confounds> confounds;
  confounds.reserve(total_words);
  for (std::size_t corpus = 0; corpus < c.n_corpora; ++corpus) {
    Rng emb_rng(derive_seed(c.seed, kEmbeddingStream + corpus));
    Rng conf_rng(derive_seed(c.seed, kConfoundStream + corpus));
    const std::string corpus_id = synth_corpus_id(corpus, c.n_corpora);
    for (std::size_t s = 0; s < c.n_sentences; ++s) {
      for (std::size_t p = 0; p < c.words_per_sentence; ++p) {
        WordKey key;
        key.corpus_id = corpus_id;
        key.sentence_id = static_cast<std::uint32_t>(s);
        key.word_pos = static_cast<std::uint32_t>(p);
        key.word_text = "w" + std::to_string(s) + "_" + std::to_string(p);
        index.push_back(std::move(key));
        for (std::size_t j = 0; j < c.dim; ++j) values.push_back(emb_rng.normal());
        Confounds conf;
        conf.freq_log = kFreqMean + kFreqSd * conf_rng.normal();
        conf.length = 1.0 + static_cast<double>(conf_rng.below(12));
        conf.sent_position = c.words_per_sentence > 1
                                 ? static_cast<double>(p) /
                                       static_cast<double>(c.words_per_sentence - 1)
                                 : 0.0;
        conf.surprisal = 2.0 + 3.0 * std::abs(conf_rng.normal());
        confounds.push_back(conf);
      }
    }
  }
  Matrix x(total_words, c.dim, std::move(values));

  SynthData out;
  out.population_directions = dirs.gammas;
  out.person_directions = dirs.betas;
  out.corpus_of_participant.resize(c.n_participants);

  const std::vector<std::string> features = {kSynthSignalFeature, kSynthStructuralFeature};
  for (std::size_t i = 0; i < c.n_participants; ++i) {
    const std::size_t corpus = i % c.n_corpora;
    out.corpus_of_participant[i] = corpus;
    const Vector& gamma = dirs.gammas[corpus % dirs.gammas.size()];
    const Vector& beta = dirs.betas[i];
    Rng noise(derive_seed(c.seed, kNoiseStream + i));
    Rng missing(derive_seed(c.seed, kMissingStream + i));

    std::vector<TargetRow> rows;
    rows.reserve(words_per_corpus);
    const std::size_t first = corpus * words_per_corpus;
    for (std::size_t w = first; w < first + words_per_corpus; ++w) {
      const auto xw = x.row(w);
      const double pop = dot(xw, gamma);
      const double own = dot(xw, beta);
      const double conf = c.confound_weight * (confounds[w].freq_log - kFreqMean) / kFreqSd;
      const double signal = c.pop_strength * pop + c.person_strength * own +
                            c.noise_sd * noise.normal() + conf;
      const double structural =
          (c.pop_strength + c.person_strength) * pop + c.noise_sd * noise.normal() + conf;
      const bool is_missing = c.missing_rate > 0.0 && missing.uniform() < c.missing_rate;

      TargetRow row;
      row.key = index[w];
      row.confounds = confounds[w];
      if (is_missing) {
        row.values = {std::nullopt, std::nullopt};
      } else {
        row.values = {signal, structural};
      }
      rows.push_back(std::move(row));
    }
    out.targets.emplace_back(synth_participant_id(i), synth_corpus_id(corpus, c.n_corpora),
                             features, std::move(rows));
  }
  out.embeddings = EmbeddingMatrix(c.model_id, c.layer, std::move(index), std::move(x));
  return out;
}

// ---------------------------------------------------------------------------
// Oracle. Deliberately self-contained: plain loops, Gaussian elimination and
// sort-based ranks, none of the library's ridge/CV/stats code.

namespace {

// Solves the (dim+1)x(dim+1) system in place with partial pivoting.
std::vector<double> eliminate(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    if (std::abs(a[pivot][col]) < 1e-300) throw Error(Errc::DegenerateData, "oracle: singular system");
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double factor = a[r][col] / a[col][col];
      for (std::size_t k = col; k < n; ++k) a[r][k] -= factor * a[col][k];
      b[r] -= factor * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
    x[i] = s / a[i][i];
  }
  return x;
}

std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    for (std::size_t t = i; t <= j; ++t) r[idx[t]] = 0.5 * static_cast<double>(i + j) + 1.0;
    i = j + 1;
  }
  return r;
}

double rank_correlation(const std::vector<double>& a, const std::vector<double>& b) {
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const double n = static_cast<double>(ra.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    ma += ra[i];
    mb += rb[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

struct Normal {
  std::vector<std::vector<double>> xtx;
  std::vector<double> xty;
  explicit Normal(std::size_t p) : xtx(p, std::vector<double>(p, 0.0)), xty(p, 0.0) {}
  void add(std::span<const double> x, double y) {
    const std::size_t p = xty.size();
    // Augmented row [1, x].
    for (std::size_t i = 0; i < p; ++i) {
      const double xi = i == 0 ? 1.0 : x[i - 1];
      for (std::size_t j = 0; j <= i; ++j) xtx[i][j] += xi * (j == 0 ? 1.0 : x[j - 1]);
      xty[i] += xi * y;
    }
  }
  void add(const Normal& o) {
    for (std::size_t i = 0; i < xty.size(); ++i) {
      for (std::size_t j = 0; j < xty.size(); ++j) xtx[i][j] += o.xtx[i][j];
      xty[i] += o.xty[i];
    }
  }
  std::vector<double> solve() const {
    auto full = xtx;
    for (std::size_t i = 0; i < full.size(); ++i) {
      for (std::size_t j = i + 1; j < full.size(); ++j) full[i][j] = full[j][i];
    }
    return eliminate(std::move(full), xty);
  }
};

double apply(const std::vector<double>& coef, std::span<const double> x) {
  double s = coef[0];
  for (std::size_t j = 0; j < x.size(); ++j) s += coef[j + 1] * x[j];
  return s;
}

}  // namespace

OracleRho oracle_expected_rho(const SynthConfig& config, std::size_t trials) {
  config.validate();
  if (trials < 10) throw Error(Errc::ConfigInvalid, "oracle_expected_rho: need trials >= 10");
  const std::size_t p = config.dim + 1;
  const auto train_sentences =
      static_cast<std::uint32_t>(std::floor(0.8 * static_cast<double>(config.n_sentences)));

  double person_sum = 0.0;
  double pop_sum = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    SynthConfig trial = config;
    trial.seed = derive_seed(config.seed, kOracleStream + t);
    const SynthData data = generate(trial);
    const auto& x = data.embeddings.values();

    struct Split {
      std::vector<std::size_t> test_rows;
      std::vector<double> test_y;
    };
    std::vector<Split> splits(data.targets.size());
    std::vector<Normal> normals(data.targets.size(), Normal(p));
    Normal pooled(p);
    for (std::size_t i = 0; i < data.targets.size(); ++i) {
      const auto& table = data.targets[i];
      for (const auto& row : table.rows()) {
        if (!row.values[0]) continue;
        const auto r = *data.embeddings.find(row.key);
        if (row.key.sentence_id < train_sentences) {
          normals[i].add(x.row(r), *row.values[0]);
        } else {
          splits[i].test_rows.push_back(r);
          splits[i].test_y.push_back(*row.values[0]);
        }
      }
      pooled.add(normals[i]);
    }
    const auto pooled_coef = pooled.solve();
    double person_trial = 0.0;
    double pop_trial = 0.0;
    for (std::size_t i = 0; i < data.targets.size(); ++i) {
      const auto coef = normals[i].solve();
      std::vector<double> own_pred, pop_pred;
      for (const auto r : splits[i].test_rows) {
        own_pred.push_back(apply(coef, x.row(r)));
        pop_pred.push_back(apply(pooled_coef, x.row(r)));
      }
      person_trial += rank_correlation(own_pred, splits[i].test_y);
      pop_trial += rank_correlation(pop_pred, splits[i].test_y);
    }
    person_sum += person_trial / static_cast<double>(data.targets.size());
    pop_sum += pop_trial / static_cast<double>(data.targets.size());
  }
  OracleRho out;
  out.person = person_sum / static_cast<double>(trials);
  out.population = pop_sum / static_cast<double>(trials);
  out.trials = trials;
  return out;
}

}  // namespace idioprobe
