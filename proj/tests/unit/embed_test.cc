#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <filesystem>
#include <map>

#include "oracles.h"
#include "spoofsim/embed.h"
#include "spoofsim/errors.h"
#include "spoofsim/rng.h"

namespace spoofsim::embed {
namespace {

EmbeddingSet Make(std::size_t dims) {
  EmbeddingSet e;
  e.dims = dims;
  return e;
}

void Add(EmbeddingSet& e, const std::string& spk, const std::string& cls, std::vector<double> v) {
  e.utt_ids.push_back(spk + cls + std::to_string(e.size()));
  e.speaker_ids.push_back(spk);
  e.class_ids.push_back(cls);
  e.values.insert(e.values.end(), v.begin(), v.end());
}

EmbeddingSet Random(Rng& rng, int speakers, int classes, int per, std::size_t dims) {
  EmbeddingSet e = Make(dims);
  for (int s = 0; s < speakers; ++s) {
    for (int c = 0; c < classes; ++c) {
      for (int i = 0; i < per; ++i) {
        std::vector<double> v(dims);
        for (std::size_t d = 0; d < dims; ++d) v[d] = rng.Normal() * (1.0 + d) + c;
        Add(e, "s" + std::to_string(s), "c" + std::to_string(c), v);
      }
    }
  }
  return e;
}

TEST(WhitenTest, TwoVectors) {
  EmbeddingSet e = Make(2);
  Add(e, "a", "x", {0, 0});
  Add(e, "a", "y", {2, 2});
  const auto w = SpeakerWhiten(e);
  EXPECT_EQ(w.values, (std::vector<double>{-1, -1, 1, 1}));
}

TEST(WhitenTest, PerSpeakerMomentsAndFormula) {
  Rng rng(1);
  const auto e = Random(rng, 3, 2, 4, 3);
  const auto w = SpeakerWhiten(e);
  std::map<std::string, std::vector<std::size_t>> rows;
  for (std::size_t i = 0; i < e.size(); ++i) rows[e.speaker_ids[i]].push_back(i);
  for (const auto& [spk, idx] : rows) {
    for (std::size_t d = 0; d < 3; ++d) {
      double mean = 0.0, sq = 0.0;
      for (auto i : idx) mean += e.Row(i)[d];
      mean /= idx.size();
      for (auto i : idx) sq += (e.Row(i)[d] - mean) * (e.Row(i)[d] - mean);
      const double sd = std::max(std::sqrt(sq / idx.size()), kStdFloor);
      double wm = 0.0, wsq = 0.0;
      for (auto i : idx) {
        EXPECT_EQ(w.Row(i)[d], (e.Row(i)[d] - mean) / sd);
        wm += w.Row(i)[d];
        wsq += w.Row(i)[d] * w.Row(i)[d];
      }
      EXPECT_NEAR(wm / idx.size(), 0.0, 1e-12);
      EXPECT_NEAR(wsq / idx.size(), 1.0, 1e-12);
    }
  }
  EmbeddingSet single = Make(1);
  Add(single, "lonely", "x", {1.0});
  EXPECT_THROW(SpeakerWhiten(single), ValidationError);
}

TEST(LengthNormTest, Basics) {
  EmbeddingSet e = Make(2);
  Add(e, "a", "x", {3, 4});
  Add(e, "a", "x", {0.6, 0.8});
  const auto n = LengthNormalize(e);
  EXPECT_NEAR(n.values[0], 0.6, 1e-15);
  EXPECT_NEAR(n.values[1], 0.8, 1e-15);
  EXPECT_NEAR(n.values[2], 0.6, 1e-15);
  EXPECT_NEAR(n.values[3], 0.8, 1e-15);
  Rng rng(2);
  const auto r = LengthNormalize(Random(rng, 2, 2, 5, 4));
  for (std::size_t i = 0; i < r.size(); ++i) {
    double s = 0.0;
    for (double v : r.Row(i)) s += v * v;
    EXPECT_NEAR(std::sqrt(s), 1.0, 1e-12);
  }
  EmbeddingSet zero = Make(2);
  Add(zero, "a", "x", {0, 0});
  EXPECT_THROW(LengthNormalize(zero), NumericalError);
}

TEST(WccnTest, DiagonalClosedForm) {
  // Two classes, within-class covariance diag(4, 1) in each.
  EmbeddingSet e = Make(2);
  for (const auto& [cls, off] : {std::pair{"p", 0.0}, std::pair{"q", 5.0}}) {
    Add(e, "s", cls, {off + 2, off + 1});
    Add(e, "s", cls, {off - 2, off + 1});
    Add(e, "s", cls, {off + 2, off - 1});
    Add(e, "s", cls, {off - 2, off - 1});
  }
  const auto r = Wccn(e);
  EXPECT_FALSE(r.ridged);
  EXPECT_NEAR(r.transform[0], 0.5, 1e-12);
  EXPECT_NEAR(r.transform[1], 0.0, 1e-12);
  EXPECT_NEAR(r.transform[2], 0.0, 1e-12);
  EXPECT_NEAR(r.transform[3], 1.0, 1e-12);
}

TEST(WccnTest, IdentityAndWhitenedWithinClass) {
  EmbeddingSet id = Make(2);
  for (const char* cls : {"p", "q"}) {
    Add(id, "s", cls, {1, 0});
    Add(id, "s", cls, {-1, 0});
    Add(id, "s", cls, {0, 1});
    Add(id, "s", cls, {0, -1});
  }
  const auto ri = Wccn(id);
  // Within-class covariance diag(0.5, 0.5): B is sqrt(2) I.
  EXPECT_NEAR(ri.transform[0], std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(ri.transform[1], 0.0, 1e-12);

  Rng rng(3);
  const auto e = Random(rng, 1, 3, 30, 4);
  const auto r = Wccn(e);
  // Pooled within-class covariance of the output is the identity.
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(4, 4);
  std::map<std::string, std::vector<std::size_t>> rows;
  for (std::size_t i = 0; i < e.size(); ++i) rows[e.class_ids[i]].push_back(i);
  for (const auto& [cls, idx] : rows) {
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(4);
    for (auto i : idx) mean += Eigen::Map<const Eigen::VectorXd>(r.transformed.Row(i).data(), 4);
    mean /= idx.size();
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(4, 4);
    for (auto i : idx) {
      const Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(r.transformed.Row(i).data(), 4) - mean;
      c += v * v.transpose();
    }
    w += c / idx.size();
  }
  w /= rows.size();
  EXPECT_LT((w - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(WccnTest, SingularCovarianceIsRidged) {
  EmbeddingSet e = Make(3);
  for (const char* cls : {"p", "q"}) {
    Add(e, "s", cls, {1, 1, 0});
    Add(e, "s", cls, {-1, -1, 0});
    Add(e, "s", cls, {0.5, 0.5, 0});
  }
  const auto r = Wccn(e);
  EXPECT_TRUE(r.ridged);
  for (double v : r.transformed.values) EXPECT_TRUE(std::isfinite(v));
}

TEST(DistanceTest, ClosedFormsAndOracle) {
  EmbeddingSet e = Make(2);
  Add(e, "s", "i", {1, 0});
  Add(e, "s", "j", {0, 1});
  const auto d = AttackDistance(e);
  EXPECT_EQ(d.labels, (std::vector<std::string>{"i", "j"}));
  EXPECT_EQ(d.at(0, 0), 0.0);
  EXPECT_NEAR(d.at(0, 1), 1.0, 1e-15);

  Rng rng(4);
  const auto r = Random(rng, 1, 3, 5, 3);
  const auto dr = AttackDistance(r);
  std::map<std::string, std::vector<oracle::Vec>> by;
  for (std::size_t i = 0; i < r.size(); ++i) by[r.class_ids[i]].emplace_back(r.Row(i).begin(), r.Row(i).end());
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      const double expected = i == j ? 0.0 : oracle::AttackDistance(by[dr.labels[i]], by[dr.labels[j]]);
      EXPECT_NEAR(dr.at(i, j), expected, 1e-12);
    }
  }
}

DistanceMatrix Matrix(std::vector<std::string> labels, std::vector<double> values) {
  return {std::move(labels), std::move(values)};
}

TEST(UpgmaTest, ForcedOrder) {
  const auto tree = Upgma(Matrix({"1", "2", "3"}, {0, 1, 10, 1, 0, 10, 10, 10, 0}));
  ASSERT_EQ(tree.merges.size(), 2u);
  EXPECT_EQ(tree.merges[0].left, 0u);
  EXPECT_EQ(tree.merges[0].right, 1u);
  EXPECT_EQ(tree.merges[0].height, 1.0);
  EXPECT_EQ(tree.merges[1].height, 10.0);
  EXPECT_EQ(tree.merges[1].size, 3u);
  EXPECT_EQ(tree.ToNewick(), "((1:0.5,2:0.5):4.5,3:5);");
}

TEST(UpgmaTest, MatchesNaiveOracle) {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 8;
    std::vector<std::vector<double>> raw(m, std::vector<double>(m, 0.0));
    DistanceMatrix d;
    for (int i = 0; i < m; ++i) {
      d.labels.push_back("L" + std::to_string(i));
      for (int j = 0; j < m; ++j) raw[i][j] = i == j ? 0.0 : rng.Uniform(0.1, 2.0);
    }
    for (const auto& row : raw) d.values.insert(d.values.end(), row.begin(), row.end());
    const auto tree = Upgma(d);
    const auto ref = oracle::NaiveUpgma(raw);
    std::vector<std::set<int>> members;
    for (int i = 0; i < m; ++i) members.push_back({i});
    ASSERT_EQ(tree.merges.size(), ref.size());
    for (std::size_t k = 0; k < ref.size(); ++k) {
      std::set<int> s = members[tree.merges[k].left];
      s.insert(members[tree.merges[k].right].begin(), members[tree.merges[k].right].end());
      members.push_back(s);
      EXPECT_EQ(s, ref[k].members);
      EXPECT_NEAR(tree.merges[k].height, ref[k].height, 1e-12);
      if (k > 0) EXPECT_GE(tree.merges[k].height, tree.merges[k - 1].height - 1e-12);
    }
  }
}

TEST(UpgmaTest, TieBreakIsLexicographic) {
  // All distances equal: the first merge joins the two smallest labels.
  const auto tree = Upgma(Matrix({"b", "a", "c"}, {0, 1, 1, 1, 0, 1, 1, 1, 0}));
  EXPECT_EQ(std::min(tree.merges[0].left, tree.merges[0].right), 0u);
  EXPECT_EQ(std::max(tree.merges[0].left, tree.merges[0].right), 1u);
}

TEST(EmbeddingIoTest, CsvRoundTrip) {
  Rng rng(6);
  const auto e = Random(rng, 2, 2, 2, 3);
  const auto path = std::filesystem::temp_directory_path() / "spoofsim_embeddings.csv";
  WriteEmbeddingsCsv(path, e);
  const auto back = ReadEmbeddingsCsv(path);
  EXPECT_EQ(back.utt_ids, e.utt_ids);
  EXPECT_EQ(back.class_ids, e.class_ids);
  ASSERT_EQ(back.values.size(), e.values.size());
  for (std::size_t i = 0; i < e.values.size(); ++i) EXPECT_NEAR(back.values[i], e.values[i], 1e-12);
}

}  // namespace
}  // namespace spoofsim::embed
