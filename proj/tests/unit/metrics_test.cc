#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "oracles.h"
#include "spoofsim/errors.h"
#include "spoofsim/metrics.h"
#include "spoofsim/rng.h"

namespace spoofsim::metrics {
namespace {

TdcfParams Asvspoof2019() {
  return TdcfParams::FromJson(R"({"cost_miss_asv":1,"cost_fa_asv":10,"cost_miss_cm":1,"cost_fa_cm":10,
      "prior_target":0.9405,"prior_nontarget":0.0095,"prior_spoof":0.05})");
}

TEST(EerTest, TrivialCases) {
  EXPECT_EQ(ComputeEer({{1, 2}, {-2, -1}}).eer, 0.0);
  EXPECT_EQ(ComputeEer({{0.3, 0.1, 0.2}, {0.2, 0.3, 0.1}}).eer, 0.5);
  EXPECT_NEAR(ComputeEer({{0.5, 1.5, 2.5}, {0, 1, 2}}).eer, 1.0 / 3.0, 1e-12);
  EXPECT_THROW(ComputeEer({{}, {1.0}}), ArgumentError);
}

TEST(EerTest, MatchesSweepOracle) {
  Rng rng(1);
  for (int i = 0; i < 50; ++i) {
    ScoreSet s;
    for (int k = 0; k < 30; ++k) s.positives.push_back(std::round(4 * (1.0 + rng.Normal())) / 4);
    for (int k = 0; k < 25; ++k) s.negatives.push_back(std::round(4 * rng.Normal()) / 4);
    EXPECT_NEAR(ComputeEer(s).eer, oracle::Eer(s.positives, s.negatives), 1e-12);
    // The convex hull can only improve on the empirical curve.
    EXPECT_LE(ComputeEerRocch(s).eer, ComputeEer(s).eer + 1e-12);
  }
}

TEST(DetTest, StaircaseMatchesCounting) {
  Rng rng(2);
  ScoreSet s;
  for (int k = 0; k < 40; ++k) s.positives.push_back(std::round(10 * (1 + rng.Normal())) / 10);
  for (int k = 0; k < 40; ++k) s.negatives.push_back(std::round(10 * rng.Normal()) / 10);
  const auto pts = DetPoints(s);
  const auto ref = oracle::CountRates(s.positives, s.negatives);
  ASSERT_EQ(pts.size(), ref.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    EXPECT_EQ(pts[i].p_miss, ref[i].p_miss);
    EXPECT_EQ(pts[i].p_fa, ref[i].p_fa);
  }
  EXPECT_EQ(pts.front().p_miss, 0.0);
  EXPECT_EQ(pts.front().p_fa, 1.0);
  EXPECT_EQ(pts.back().p_miss, 1.0);
  EXPECT_EQ(pts.back().p_fa, 0.0);

  const auto perfect = DetPoints({{1, 2, 3}, {-1, -2}});
  EXPECT_TRUE(std::any_of(perfect.begin(), perfect.end(),
                          [](const DetPoint& p) { return p.p_miss == 0.0 && p.p_fa == 0.0; }));
  EXPECT_LE(perfect.size(), 6u);
}

TEST(AsvRatesTest, Extremes) {
  AsvScores asv{{1.0, 2.0}, {-1.0, 0.0}, {0.5, 1.5}};
  const auto low = AsvRates(asv, -10.0);
  EXPECT_EQ(low.p_miss, 0.0);
  EXPECT_EQ(low.p_fa, 1.0);
  EXPECT_EQ(low.p_miss_spoof, 0.0);
  const auto high = AsvRates(asv, 10.0);
  EXPECT_EQ(high.p_miss, 1.0);
  EXPECT_EQ(high.p_fa, 0.0);
  EXPECT_EQ(high.p_miss_spoof, 1.0);
  const auto mid = AsvRates(asv, 1.0);
  EXPECT_EQ(mid.p_miss, 0.0);
  EXPECT_EQ(mid.p_fa, 0.0);
  EXPECT_EQ(mid.p_miss_spoof, 0.5);
}

TEST(TdcfTest, TrivialCases) {
  const auto params = Asvspoof2019();
  const AsvOperatingPoint ideal{};
  EXPECT_EQ(MinTdcf({{1, 2}, {-2, -1}}, ideal, params).min_tdcf, 0.0);
  EXPECT_NEAR(MinTdcf({{0.5, 0.5}, {0.5}}, ideal, params).min_tdcf, 1.0, 1e-12);
  const auto r = MinTdcf({{0.5, 0.5}, {0.5}}, ideal, params);
  EXPECT_NEAR(r.c1, 0.9405, 1e-12);
  EXPECT_NEAR(r.c2, 0.5, 1e-12);
}

TEST(TdcfTest, MatchesSweepOracle) {
  Rng rng(3);
  const auto params = Asvspoof2019();
  for (int i = 0; i < 50; ++i) {
    ScoreSet s;
    for (int k = 0; k < 20; ++k) s.positives.push_back(1.0 + rng.Normal());
    for (int k = 0; k < 35; ++k) s.negatives.push_back(rng.Normal());
    const AsvOperatingPoint asv{rng.Uniform(0, 0.1), rng.Uniform(0, 0.1), rng.Uniform(0, 0.9), 0};
    const auto r = MinTdcf(s, asv, params);
    EXPECT_NEAR(r.c1, params.prior_target * (params.cost_miss_cm - params.cost_miss_asv * asv.p_miss) -
                          params.prior_nontarget * params.cost_fa_asv * asv.p_fa,
                1e-12);
    EXPECT_NEAR(r.c2, params.cost_fa_cm * params.prior_spoof * (1 - asv.p_miss_spoof), 1e-12);
    EXPECT_NEAR(r.min_tdcf, oracle::MinTdcf(s.positives, s.negatives, r.c1, r.c2), 1e-12);
  }
}

TEST(TdcfTest, DegenerateCosts) {
  auto params = Asvspoof2019();
  const AsvOperatingPoint spoof_all_rejected{0.0, 0.0, 1.0, 0.0};
  EXPECT_THROW(MinTdcf({{1}, {0}}, spoof_all_rejected, params), DegenerateCostError);
  params.prior_target = 0.5;
  EXPECT_THROW(params.Validate(), ValidationError);
}

replay::TrialManifest Keys() {
  std::vector<replay::SpeakerUtterances> spk = replay::MakeSpeakerList({"A", "B", "C"}, 4);
  return replay::GenerateProtocol(spk, replay::Partition::kEval,
                                  {room::EnvironmentLabel::Parse("aaa"), room::EnvironmentLabel::Parse("ccc")},
                                  {replay::AttackLabel::Parse("AA"), replay::AttackLabel::Parse("CC")}, 1);
}

TEST(EvaluateTest, PerfectAndConstantScores) {
  const auto keys = Keys();
  std::vector<ScoreEntry> perfect, constant;
  for (const auto& r : keys.records) {
    perfect.push_back({r.TrialId(), r.key == replay::Key::kBonafide ? 1.0 : -1.0});
    constant.push_back({r.TrialId(), 0.25});
  }
  const auto p = Evaluate(perfect, keys, std::nullopt, Asvspoof2019());
  EXPECT_TRUE(p.asv_ideal);
  EXPECT_EQ(p.pooled.eer->eer, 0.0);
  EXPECT_EQ(p.pooled.tdcf->min_tdcf, 0.0);
  const auto c = Evaluate(constant, keys, std::nullopt, Asvspoof2019());
  EXPECT_EQ(c.pooled.eer->eer, 0.5);
  EXPECT_NEAR(c.pooled.tdcf->min_tdcf, 1.0, 1e-12);
  EXPECT_EQ(c.per_condition.size(), 4u);
}

TEST(EvaluateTest, ConditionsEqualSubsetRecomputation) {
  const auto keys = Keys();
  Rng rng(4);
  std::vector<ScoreEntry> scores;
  for (const auto& r : keys.records) {
    scores.push_back({r.TrialId(), (r.key == replay::Key::kBonafide ? 1.0 : 0.0) + rng.Normal()});
  }
  const auto report = Evaluate(scores, keys, std::nullopt, Asvspoof2019());
  for (const auto& [cell, result] : report.per_condition) {
    ScoreSet s;
    for (std::size_t i = 0; i < keys.records.size(); ++i) {
      const auto& r = keys.records[i];
      if (r.EnvString() != cell.substr(0, 3)) continue;
      if (r.key == replay::Key::kBonafide) s.positives.push_back(scores[i].score);
      else if (r.AttackString() == cell.substr(4)) s.negatives.push_back(scores[i].score);
    }
    EXPECT_EQ(result.bonafide, s.positives.size());
    EXPECT_EQ(result.spoof, s.negatives.size());
    EXPECT_EQ(result.eer->eer, ComputeEer(s).eer) << cell;
  }
}

TEST(EvaluateTest, UnknownIdsRejected) {
  const auto keys = Keys();
  EXPECT_THROW(Evaluate({{"nope", 1.0}}, keys, std::nullopt, Asvspoof2019()), ValidationError);
  std::vector<ScoreEntry> dup = {{keys.records[0].TrialId(), 1.0}, {keys.records[0].TrialId(), 2.0}};
  EXPECT_THROW(Evaluate(dup, keys, std::nullopt, Asvspoof2019()), ValidationError);
}

TEST(ScoreIoTest, RoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "spoofsim_scores.txt";
  WriteScores(path, {{"a_aaa_AA", -1.25}, {"b_aaa_-", 3.5}});
  const auto back = ReadScores(path);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].id, "b_aaa_-");
  EXPECT_EQ(back[0].score, -1.25);
  std::ofstream(path) << "x 1.0 target\ny -1 spoof\nz 0 nontarget\n";
  const auto asv = GroupAsv(ReadAsvScores(path));
  EXPECT_EQ(asv.targets.size(), 1u);
  EXPECT_EQ(asv.spoofs.size(), 1u);
  EXPECT_EQ(asv.nontargets.size(), 1u);
}

}  // namespace
}  // namespace spoofsim::metrics
