#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "commands.h"
#include "spoofsim/embed.h"
#include "spoofsim/rng.h"

namespace spoofsim::cli {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            ("spoofsim_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  int Cli(std::vector<std::string> args) {
    args.insert(args.begin(), {"--log-level", "off", "--seed", "5"});
    return cli::Run(args);
  }
  std::string P(const std::string& rel) const { return (root_ / rel).string(); }

  static std::string Slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  }

  fs::path root_;
};

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(Cli({}), kExitUsage);
  EXPECT_EQ(Cli({"no-such-command"}), kExitUsage);
  EXPECT_EQ(Cli({"simulate", "--protocol", P("p.txt")}), kExitUsage);
  EXPECT_EQ(Cli({"make-protocol", "--envs", "abz", "--out", P("p.txt")}), kExitUsage);
}

TEST_F(CliTest, ProtocolCellsAndProvenance) {
  ASSERT_EQ(Cli({"make-protocol", "--num-speakers", "1", "--utts-per-speaker", "1", "--out", P("p.txt")}),
            kExitOk);
  std::ifstream in(P("p.txt"));
  std::set<std::string> cells;
  std::string spk, utt, env, attack, key;
  while (in >> spk >> utt >> env >> attack >> key) {
    if (key == "spoof") cells.insert(env + "_" + attack);
  }
  EXPECT_EQ(cells.size(), 243u);
  const auto run = nlohmann::json::parse(Slurp(P("p.txt.run.json")));
  EXPECT_EQ(run["seed"], 5);
  EXPECT_EQ(run["command"], "make-protocol");
}

TEST_F(CliTest, MissingWavExitsOneAndNamesUtterance) {
  ASSERT_EQ(Cli({"make-corpus", "--out", P("corpus"), "--speakers", "1", "--utts", "2", "--seconds", "0.3"}),
            kExitOk);
  ASSERT_EQ(Cli({"make-protocol", "--num-speakers", "1", "--utts-per-speaker", "2", "--envs", "aaa",
                 "--attacks", "AA", "--out", P("p.txt")}),
            kExitOk);
  std::string missing;
  for (const auto& e : fs::directory_iterator(P("corpus"))) {
    if (e.path().extension() == ".wav") missing = e.path().stem().string();
  }
  ASSERT_FALSE(missing.empty());
  fs::remove(fs::path(P("corpus")) / (missing + ".wav"));
  EXPECT_EQ(Cli({"simulate", "--protocol", P("p.txt"), "--corpus", P("corpus"), "--out", P("audio"),
                 "--work-rate", "16000"}),
            kExitDataFailure);
  EXPECT_NE(Slurp(P("audio/run_report.json")).find(missing), std::string::npos);
}

TEST_F(CliTest, TrainRejectsTooManyComponents) {
  ASSERT_EQ(Cli({"make-corpus", "--out", P("corpus"), "--speakers", "1", "--utts", "1", "--seconds", "0.3"}),
            kExitOk);
  ASSERT_EQ(Cli({"make-protocol", "--num-speakers", "1", "--utts-per-speaker", "1", "--envs", "aaa",
                 "--attacks", "AA", "--out", P("p.txt")}),
            kExitOk);
  ASSERT_EQ(Cli({"simulate", "--protocol", P("p.txt"), "--corpus", P("corpus"), "--out", P("audio"),
                 "--work-rate", "16000"}),
            kExitOk);
  ASSERT_EQ(Cli({"extract-features", "--protocol", P("p.txt"), "--audio", P("audio"), "--out", P("feat"),
                 "--feature", "lfcc"}),
            kExitOk);
  EXPECT_NE(Cli({"train-cm", "--protocol", P("p.txt"), "--features", P("feat"), "--out", P("models"),
                 "--components", "100000"}),
            kExitOk);
  EXPECT_FALSE(fs::exists(P("models/bonafide.gmm")));

  ASSERT_EQ(Cli({"train-cm", "--protocol", P("p.txt"), "--features", P("feat"), "--out", P("models"),
                 "--components", "4"}),
            kExitOk);
  const auto meta = nlohmann::json::parse(Slurp(P("models/bonafide.json")));
  const auto& ll = meta["log_likelihood"];
  ASSERT_EQ(ll.size(), 21u);
  for (std::size_t i = 1; i < ll.size(); ++i) {
    EXPECT_GE(ll[i].get<double>(), ll[i - 1].get<double>() - 1e-8 * std::abs(ll[i - 1].get<double>()));
  }
  const std::string first = Slurp(P("models/spoof.gmm"));
  ASSERT_EQ(Cli({"train-cm", "--protocol", P("p.txt"), "--features", P("feat"), "--out", P("models"),
                 "--components", "4"}),
            kExitOk);
  EXPECT_EQ(Slurp(P("models/spoof.gmm")), first);
}

TEST_F(CliTest, DeviceRoundTrip) {
  ASSERT_EQ(Cli({"synth-device", "--quality", "low", "--rate", "48000", "--out", P("dev.json")}), kExitOk);
  ASSERT_EQ(Cli({"measure-device", "--device", P("dev.json"), "--out", P("m.json")}), kExitOk);
  const auto m = nlohmann::json::parse(Slurp(P("m.json")));
  EXPECT_EQ(m["class"], "low");
  ASSERT_EQ(Cli({"synth-device", "--quality", "perfect", "--out", P("perfect.json")}), kExitOk);
  ASSERT_EQ(Cli({"measure-device", "--device", P("perfect.json"), "--out", P("pm.json")}), kExitOk);
  EXPECT_EQ(nlohmann::json::parse(Slurp(P("pm.json")))["class"], "perfect");
  EXPECT_EQ(Cli({"measure-device", "--device", P("absent.json")}), kExitDataFailure);
}

TEST_F(CliTest, AnalyzeEmbeddings) {
  embed::EmbeddingSet e;
  e.dims = 3;
  Rng rng(1);
  for (int s = 0; s < 3; ++s) {
    for (const char* cls : {"AA", "AC", "CC", "bonafide"}) {
      for (int i = 0; i < 3; ++i) {
        e.utt_ids.push_back("u" + std::to_string(e.utt_ids.size()));
        e.speaker_ids.push_back("s" + std::to_string(s));
        e.class_ids.push_back(cls);
        for (int d = 0; d < 3; ++d) e.values.push_back(rng.Normal());
      }
    }
  }
  embed::WriteEmbeddingsCsv(P("emb.csv"), e);
  ASSERT_EQ(Cli({"analyze-embeddings", "--embeddings", P("emb.csv"), "--out", P("out")}), kExitOk);
  for (const char* f : {"distance.csv", "dendrogram.json", "dendrogram.nwk", "processed.csv", "run.json"}) {
    EXPECT_TRUE(fs::exists(fs::path(P("out")) / f)) << f;
  }
  const auto tree = nlohmann::json::parse(Slurp(P("out/dendrogram.json")));
  EXPECT_EQ(tree["merges"].size(), 3u);
}

}  // namespace
}  // namespace spoofsim::cli
