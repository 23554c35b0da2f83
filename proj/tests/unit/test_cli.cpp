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


#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <iterator>
#include <sstream>

#include "commands.hpp"
#include "idioprobe/error.hpp"
#include "oracles.hpp"
#include "pinned_oracle.hpp"
#include "report.hpp"
#include "run_config.hpp"

using namespace idioprobe;
namespace fs = std::filesystem;

namespace {

int cli(std::vector<std::string> args, std::string* err_text = nullptr) {
  args.insert(args.begin(), "idioprobe");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = app::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  if (err_text != nullptr) *err_text = err.str();
  return code;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// One small synthetic dataset shared by every test in this file.
class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    root_ = new fs::path(oracle::temp_dir("cli"));
    ASSERT_EQ(cli({"synth", "--out", (*root_ / "data").string(), "--participants", "6",
                   "--sentences", "60", "--dim", "12", "--seed", "5"}),
              0);
  }
  static void TearDownTestSuite() {
    fs::remove_all(*root_);
    delete root_;
  }
  static fs::path data() { return *root_ / "data"; }
  static fs::path dir(const std::string& name) { return *root_ / name; }
  static std::vector<std::string> probe_args(const std::string& out) {
    return {"probe", "--config", (data() / "config.json").string(), "--out", dir(out).string(),
            "--pca-dim", "8", "--bootstrap-b", "200"};
  }

 private:
  static fs::path* root_;
};

fs::path* CliTest::root_ = nullptr;

}  // namespace

TEST_F(CliTest, SynthWritesARunnableDataset) {
  for (const char* f : {"emb_L24.emb1", "targets.csv", "config.json", "synth.json"}) {
    EXPECT_TRUE(fs::exists(data() / f)) << f;
  }
  const auto cfg = app::load_config(data() / "config.json");
  EXPECT_EQ(cfg.layers, (std::vector<std::uint32_t>{24}));
  EXPECT_EQ(cfg.pca_dims, (std::vector<std::size_t>{12}));
  EXPECT_EQ(cfg.features, (std::vector<std::string>{"signal"}));
}

TEST_F(CliTest, ProbeWritesReportProbesTablesAndMeta) {
  ASSERT_EQ(cli(probe_args("probe")), 0);
  const auto report = app::read_json(dir("probe") / "report.json");
  EXPECT_EQ(report["report_version"], app::kReportVersion);
  EXPECT_EQ(report["command"], "probe");
  EXPECT_EQ(report["sweep"]["probe_result_count"], 7);
  EXPECT_TRUE(fs::exists(dir("probe") / "probes" / "L24_d8_signal.json"));
  EXPECT_TRUE(fs::exists(dir("probe") / "tables" / "table1_person_vs_population.csv"));
  const auto meta = app::read_json(dir("probe") / "meta.json");
  EXPECT_TRUE(meta.contains("seeds"));
  EXPECT_TRUE(meta.contains("pca_variance_retained"));
}

TEST_F(CliTest, ReportsAreByteIdenticalAcrossRunsAndThreadCounts) {
  auto a = probe_args("det_a");
  a.insert(a.end(), {"--threads", "1"});
  auto b = probe_args("det_b");
  b.insert(b.end(), {"--threads", "4"});
  ASSERT_EQ(cli(a), 0);
  ASSERT_EQ(cli(b), 0);
  EXPECT_EQ(slurp(dir("det_a") / "report.json"), slurp(dir("det_b") / "report.json"));
  EXPECT_EQ(slurp(dir("det_a") / "probes" / "L24_d8_signal.json"),
            slurp(dir("det_b") / "probes" / "L24_d8_signal.json"));
}

TEST_F(CliTest, MetaJsonFeedsBackAsConfig) {
  ASSERT_EQ(cli(probe_args("meta_a")), 0);
  ASSERT_EQ(cli({"probe", "--config", (dir("meta_a") / "meta.json").string(), "--out",
                 dir("meta_b").string()}),
            0);
  EXPECT_EQ(slurp(dir("meta_a") / "report.json"), slurp(dir("meta_b") / "report.json"));
}

TEST_F(CliTest, TablesRegenerateFromReportAlone) {
  ASSERT_EQ(cli(probe_args("tables")), 0);
  const auto table = dir("tables") / "tables" / "table1_person_vs_population.csv";
  const std::string before = slurp(table);
  fs::remove_all(dir("tables") / "tables");
  ASSERT_EQ(cli({"report", "--out", dir("tables").string()}), 0);
  EXPECT_EQ(slurp(table), before);
}

TEST_F(CliTest, AnalysisCommandsRun) {
  const std::string cfg = (data() / "config.json").string();
  for (const char* cmd : {"transfer", "splithalf", "residual", "confounds"}) {
    EXPECT_EQ(cli({cmd, "--config", cfg, "--out", dir(cmd).string(), "--pca-dim", "8",
                   "--bootstrap-b", "0"}),
              0)
        << cmd;
    EXPECT_TRUE(fs::exists(dir(cmd) / "report.json"));
  }
  EXPECT_EQ(cli({"controls", "--config", cfg, "--out", dir("controls").string(), "--pca-dim", "8",
                 "--bootstrap-b", "0", "--controls", "SHUFFLE,NEGATIVE_FEATURE",
                 "--permutations", "2"}),
            0);
  const auto report = app::read_json(dir("controls") / "report.json");
  EXPECT_EQ(report["analyses"]["controls"][0]["outcomes"].size(), 2u);
  EXPECT_TRUE(fs::exists(dir("controls") / "tables" / "table3_controls.csv"));
}

TEST_F(CliTest, ValidationFailuresExitOne) {
  const std::string cfg = (data() / "config.json").string();
  std::string err;
  EXPECT_EQ(cli({"probe", "--config", cfg, "--out", dir("v1").string(), "--feature", "nope"}, &err),
            1);
  EXPECT_NE(err.find("signal"), std::string::npos);  // lists the available features
  EXPECT_EQ(cli({"probe", "--config", cfg, "--out", dir("v2").string(), "--layers", "3"}), 1);
  EXPECT_EQ(cli({"probe", "--config", cfg, "--out", dir("v3").string(), "--k-folds", "1"}), 1);
  EXPECT_EQ(cli({"probe", "--bogus-flag"}), 1);
  EXPECT_EQ(cli({"probe", "--config", (dir("none") / "c.json").string()}), 1);
  EXPECT_EQ(cli({"probe", "--config", cfg, "--out", dir("v4").string(), "--layers", "24,25"}), 1);
}

TEST_F(CliTest, CorruptInputExitsTwo) {
  const auto bad = dir("bad");
  fs::create_directories(bad);
  std::ofstream(bad / "emb_L24.emb1") << "not an embedding file";
  EXPECT_EQ(cli({"probe", "--config", (data() / "config.json").string(), "--embeddings",
                 (bad / "emb_L{layer}.emb1").string(), "--out", dir("bad_out").string()}),
            2);
}

TEST(RunConfig, JsonRoundTripAndUnknownKeys) {
  app::RunConfig c;
  c.embeddings = "e_{layer}.emb1";
  c.targets = "t.csv";
  c.layers = {3, 7};
  c.features = {"TRT"};
  c.controls = {"SHUFFLE"};
  c.threads = 3;
  const auto doc = app::config_to_json(c, true);
  const auto back = app::config_from_json(doc);
  EXPECT_EQ(app::config_to_json(back, true), doc);
  EXPECT_EQ(back.embedding_path(7), fs::path("e_7.emb1"));
  EXPECT_EQ(app::config_from_json(nlohmann::json{{"config", doc}}).layers, c.layers);
  EXPECT_FALSE(app::config_to_json(c, false).contains("threads"));

  auto extra = doc;
  extra["surprise"] = 1;
  try {
    app::config_from_json(extra);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ConfigInvalid);
  }
}

TEST(RunConfig, ThreadsFromEnvironmentWin) {
  app::RunConfig c;
  c.threads = 3;
  ::unsetenv("IDIOPROBE_THREADS");
  EXPECT_EQ(app::effective_threads(c), 3u);
  ::setenv("IDIOPROBE_THREADS", "5", 1);
  EXPECT_EQ(app::effective_threads(c), 5u);
  ::unsetenv("IDIOPROBE_THREADS");
}

TEST(CliReference, SynthThenSweepMatchesThePinnedMargin) {
  const auto root = oracle::temp_dir("cli_reference");
  ASSERT_EQ(cli({"synth", "--preset", "reference", "--out", (root / "data").string()}), 0);
  ASSERT_EQ(cli({"sweep", "--config", (root / "data" / "config.json").string(), "--out",
                 (root / "run").string()}),
            0);
  const auto report = app::read_json(root / "run" / "report.json");
  const auto& cell = report["sweep"]["cells"][0];
  const double delta = cell["comparison"]["delta_mean"].get<double>();
  const double margin = oracle::kReferencePersonRho - oracle::kReferencePopulationRho;
  EXPECT_GT(delta, 0.0);
  EXPECT_NEAR(delta, margin, 0.03);
  EXPECT_LT(cell["comparison"]["p"].get<double>(), 1e-4);
  fs::remove_all(root);
}
