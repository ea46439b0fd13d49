// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <fstream>

#include <json.hpp>

#include "cli_runner.hpp"
#include "corerev/cli/run_config.hpp"
#include "corerev/error.hpp"
#include "synthetic.hpp"
#include "tempdir.hpp"

using namespace corerev;
using namespace corerev::testsupport;
using json = nlohmann::json;

namespace {

const std::string kCli = COREREV_CLI_PATH;

const char* kTinySettings =
    "# tiny pipeline\n"
    "word_dim=12\nhidden=8\nattn_dim=8\nchar_onehot=30\n"
    "epochs=2\nlr=0.01\nbatch=8\nneg_m=2\nseed=5\nsgns_epochs=1\n";

CommandResult run_cli(const std::vector<std::string>& args, const std::vector<std::string>& env = {}) {
  return run_command(kCli, args, env);
}

// prepare + vocab + pretrain + train into `dir` from `raw`.
void build_pipeline(const TempDir& dir, const std::filesystem::path& raw) {
  auto cfg = dir / "tiny.cfg";
  std::ofstream(cfg) << kTinySettings;
  const std::string data = (dir / "d").string();
  for (const char* stage : {"prepare", "vocab", "pretrain", "train"}) {
    std::vector<std::string> args = {stage, "--config", cfg.string(), "--data", data, "--quiet"};
    if (std::string(stage) == "prepare") {
      args.push_back("--dataset");
      args.push_back(raw.string());
    }
    auto r = run_cli(args);
    ASSERT_EQ(r.exit_code, 0) << stage << ": " << r.err;
  }
}

}  // namespace

TEST(RunConfig, ParsesSettingsText) {
  auto s = cli::parse_settings("# c\n\nhidden = 16\r\nlr=1e-3\n", "f");
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0], (std::pair<std::string, std::string>{"hidden", "16"}));
  EXPECT_EQ(s[1].second, "1e-3");
  try {
    cli::parse_settings("hidden=1\noops\n", "file.cfg");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("file.cfg:2"), std::string::npos) << e.what();
  }
}

TEST(RunConfig, FlagsBeatEnvironmentBeatFileBeatDefaults) {
  auto c = cli::resolve("train", {{"hidden", "16"}, {"lr", "0.5"}, {"data", "fromfile"}},
                        {{"data", "fromenv"}}, {{"lr", "0.25"}});
  EXPECT_EQ(c.model.hidden, 16u);
  EXPECT_EQ(c.model.lr, 0.25);
  EXPECT_EQ(c.model.epochs, 50u);
  EXPECT_EQ(c.path("data"), "fromenv");
  EXPECT_EQ(c.path("checkpoint"), std::filesystem::path("fromenv") / "model.ckpt");
  auto d = cli::resolve("train", {}, {}, {{"data", "x"}, {"checkpoint", "y.ckpt"}});
  EXPECT_EQ(d.path("checkpoint"), "y.ckpt");
}

TEST(RunConfig, EnvironmentOnlySuppliesPaths) {
  auto env = [](const std::string& name) -> std::optional<std::string> {
    if (name == "COREREV_DATA") return "/tmp/d";
    if (name == "COREREV_LR") return "9";
    if (name == "COREREV_HIDDEN") return "3";
    return std::nullopt;
  };
  auto paths = cli::environment_paths(env);
  ASSERT_EQ(paths.size(), 1u);
  EXPECT_EQ(paths[0].first, "data");
  EXPECT_THROW(cli::resolve("train", {}, {{"lr", "9"}}, {}), ConfigError);
}

TEST(RunConfig, RejectsUnknownAndInvalid) {
  EXPECT_THROW(cli::resolve("train", {{"learning_rate", "1"}}, {}, {}), ConfigError);
  EXPECT_THROW(cli::resolve("train", {}, {}, {{"pool_size", "-1"}}), ConfigError);
  EXPECT_THROW(cli::resolve("train", {}, {}, {{"dropout", "1.5"}}), ConfigError);
  EXPECT_THROW(cli::resolve("train", {}, {}, {{"pretrained", "maybe"}}), ConfigError);
}

TEST(RunConfig, EffectiveConfigListsEverything) {
  TempDir dir;
  auto c = cli::resolve("evaluate", {}, {}, {{"pool_size", "7"}, {"data", dir.path().string()}});
  auto path = cli::write_effective_config(c, dir.path());
  EXPECT_EQ(path.filename(), "effective_config.evaluate.txt");
  std::string text = read_file(path);
  for (const auto& [k, v] : model::describe(c.model)) {
    EXPECT_NE(text.find(k + "=" + v + "\n"), std::string::npos) << k;
  }
  EXPECT_NE(text.find("pool_size=7\n"), std::string::npos);
  EXPECT_NE(text.find("subcommand=evaluate\n"), std::string::npos);
  EXPECT_EQ(text, cli::render(c));
}

TEST(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(run_cli({}).exit_code, 1);
  EXPECT_EQ(run_cli({"nonsense"}).exit_code, 1);
  EXPECT_EQ(run_cli({"train", "--lr", "abc"}).exit_code, 1);
  EXPECT_EQ(run_cli({"train", "--set", "nokey=1"}).exit_code, 1);
  EXPECT_EQ(run_cli({"--help"}).exit_code, 0);
}

TEST(Cli, MissingArtifactNamesTheStage) {
  TempDir dir;
  auto r = run_cli({"train", "--data", dir.path().string()});
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.err.find("corerev prepare"), std::string::npos) << r.err;
  r = run_cli({"evaluate", "--data", dir.path().string()});
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.err.find("prepare"), std::string::npos) << r.err;
}

TEST(Cli, GradcheckSeedSevenPasses) {
  TempDir dir;
  auto r = run_cli({"gradcheck", "--seed", "7", "--json", "--data", dir.path().string()});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  auto j = json::parse(r.out);
  EXPECT_TRUE(j["passed"].get<bool>());
  EXPECT_LT(j["runs"][0]["max_rel_error"].get<double>(), 1e-4);
  EXPECT_EQ(j["runs"][0]["groups"].size(), 44u);
  // A tolerance nothing can meet is a check failure.
  r = run_cli({"gradcheck", "--seed", "7", "--tolerance", "0", "--quiet", "--data", dir.path().string()});
  EXPECT_EQ(r.exit_code, 3);
}

TEST(Cli, PipelineOracleRecommendAndDeterminism) {
  TempDir dir;
  auto raw = dir / "raw.jsonl";
  write_raw_dataset(raw, random_pairs(220, 12));
  build_pipeline(dir, raw);
  const std::string data = (dir / "d").string();

  auto oracle = run_cli({"evaluate", "--data", data, "--oracle", "--json", "--report",
                     (dir / "oracle.json").string()});
  ASSERT_EQ(oracle.exit_code, 0) << oracle.err;
  EXPECT_EQ(json::parse(oracle.out)["mrr"].get<double>(), 1.0);
  auto inverted = run_cli({"evaluate", "--data", data, "--inverted", "--json", "--report",
                       (dir / "inv.json").string()});
  ASSERT_EQ(inverted.exit_code, 0) << inverted.err;
  auto inv = json::parse(inverted.out);
  EXPECT_NEAR(inv["mrr"].get<double>(), 1.0 / 51, 1e-12);
  EXPECT_EQ(inv["recall_at"]["10"].get<double>(), 0.0);

  auto cfg = (dir / "tiny.cfg").string();
  auto first = run_cli({"evaluate", "--config", cfg, "--data", data, "--quiet"});
  ASSERT_EQ(first.exit_code, 0) << first.err;
  std::string report = read_file(dir / "d" / "report.json");
  auto j = json::parse(report);
  EXPECT_EQ(j["count"], 55);  // 220 * 2.5 / 10
  EXPECT_TRUE(j["mrr"].get<double>() > 0.0 && j["mrr"].get<double>() <= 1.0);

  auto diff = dir / "change.patch";
  std::ofstream(diff) << "@@ -1 +1 @@\n-int count = 0;\n+final int count = size;\n";
  auto rec = run_cli({"recommend", "--k", "10", "--diff", diff.string(), "--bank",
                  (dir / "d" / "test.jsonl").string(), "--data", data, "--json"});
  ASSERT_EQ(rec.exit_code, 0) << rec.err;
  auto list = json::parse(rec.out)["recommendations"];
  ASSERT_EQ(list.size(), 10u);
  for (std::size_t i = 1; i < list.size(); ++i) {
    EXPECT_GE(list[i - 1]["score"].get<double>(), list[i]["score"].get<double>());
    EXPECT_EQ(list[i]["rank"], i + 1);
  }

  // Same inputs and seed in a second directory: same bytes.
  TempDir other;
  build_pipeline(other, raw);
  auto second = run_cli({"evaluate", "--config", cfg, "--data", (other / "d").string(), "--quiet"});
  ASSERT_EQ(second.exit_code, 0) << second.err;
  EXPECT_EQ(read_file(other / "d" / "report.json"), report);
  EXPECT_EQ(read_file(other / "d" / "model.ckpt"), read_file(dir / "d" / "model.ckpt"));
  EXPECT_EQ(read_file(other / "d" / "test.jsonl"), read_file(dir / "d" / "test.jsonl"));
}

TEST(Cli, RecommendRejectsEmptyBankAndTrainMismatch) {
  TempDir dir;
  auto raw = dir / "raw.jsonl";
  write_raw_dataset(raw, random_pairs(120, 4));
  build_pipeline(dir, raw);
  std::ofstream(dir / "empty.jsonl") << "\n";
  std::ofstream(dir / "c.patch") << "+x = 1;\n";
  auto r = run_cli({"recommend", "--diff", (dir / "c.patch").string(), "--bank",
                (dir / "empty.jsonl").string(), "--data", (dir / "d").string()});
  EXPECT_EQ(r.exit_code, 2);
  r = run_cli({"train", "--config", (dir / "tiny.cfg").string(), "--char-onehot", "40", "--data",
           (dir / "d").string()});
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.err.find("corerev vocab"), std::string::npos) << r.err;
}

TEST(Cli, LexPrintsTokens) {
  TempDir dir;
  auto diff = dir / "x.diff";
  std::ofstream(diff) << "+private final int shuffleId;\n";
  auto r = run_cli({"lex", "--diff", diff.string(), "--json"});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(json::parse(r.out)["code_change_tokens"],
            json({"private", "final", "int", "shuffleId", ";"}));
}
