// Acceptance suite: one PASS/FAIL line per criterion. Tolerances are pinned
// here. Run with criterion numbers as arguments to select a subset.

#include <spdlog/spdlog.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "../support/oracles.h"
#include "commands.h"
#include "spoofsim/device.h"
#include "spoofsim/embed.h"
#include "spoofsim/errors.h"
#include "spoofsim/features.h"
#include "spoofsim/gmm.h"
#include "spoofsim/metrics.h"
#include "spoofsim/replay.h"
#include "spoofsim/rng.h"
#include "spoofsim/room.h"

namespace fs = std::filesystem;
using namespace spoofsim;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void Check(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail = what;
      pass = false;
    }
  }
};

// Tolerances.
constexpr double kMetricTol = 1e-12;
constexpr double kT60Slack = 0.20;          // +-20% around the category interval
constexpr double kDelayTolSamples = 1.0;    // one fractional-delay tap
constexpr double kDeviceSuccess = 0.98;
constexpr double kGainTol = 1e-6;
constexpr double kEmSlack = 1e-8;           // relative
constexpr double kClusterMeanTol = 0.2;
constexpr double kClusterWeightTol = 0.05;
constexpr double kDistanceTol = 1e-12;
constexpr double kHeightTol = 1e-12;

// Runtime budgets, seconds.
constexpr double kBudget[] = {0, 1, 10, 120, 120, 600, 600, 600, 900, 600};

fs::path Scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("spoofsim_acceptance_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// 1. Protocol arithmetic.
Outcome ProtocolArithmetic() {
  Outcome o;
  auto speakers = [](int n) {
    std::vector<std::string> ids;
    for (int i = 0; i < n; ++i) ids.push_back("S" + std::to_string(i));
    return replay::MakeSpeakerList(ids, 10);
  };
  auto spoof_count = [](const replay::TrialManifest& m) {
    std::size_t n = 0;
    for (const auto& r : m.records) n += r.key == replay::Key::kSpoof;
    return n;
  };
  const auto all_envs = room::EnvironmentLabel::All();
  const auto attacks = replay::AttackLabel::All();
  const auto one_env = std::vector<room::EnvironmentLabel>{all_envs.front()};

  const auto train1 = replay::GenerateProtocol(speakers(20), replay::Partition::kTrain, one_env, attacks, 1);
  o.Check(spoof_count(train1) == 1800, "train single-environment spoof count != 1800");
  const auto train = replay::GenerateProtocol(speakers(20), replay::Partition::kTrain, all_envs, attacks, 1);
  o.Check(spoof_count(train) == 48600, "train spoof count != 48600");
  const auto dev = replay::GenerateProtocol(speakers(10), replay::Partition::kDev, all_envs, attacks, 1);
  o.Check(spoof_count(dev) == 24300, "dev spoof count != 24300");
  const auto eval1 = replay::GenerateProtocol(speakers(48), replay::Partition::kEval, one_env, attacks, 1);
  o.Check(spoof_count(eval1) == 4320, "eval single-environment spoof count != 4320");
  const auto eval = replay::GenerateProtocol(speakers(48), replay::Partition::kEval, all_envs, attacks, 1);
  o.Check(spoof_count(eval) == 116640, "eval spoof count != 116640");
  std::set<std::string> cells;
  for (const auto& r : eval.records) {
    if (r.attack) cells.insert(r.EnvString() + "_" + r.AttackString());
  }
  o.Check(cells.size() == 243, "condition cells != 243");
  o.detail = o.pass ? "1800 / 48600 / 24300 / 4320 / 116640 spoof records, 243 cells" : o.detail;
  return o;
}

// 2. Metric oracles.
Outcome MetricOracles() {
  Outcome o;
  Rng rng(2024);
  const auto params = metrics::TdcfParams::FromJson(
      R"({"cost_miss_asv":1,"cost_fa_asv":10,"cost_miss_cm":1,"cost_fa_cm":10,
          "prior_target":0.9405,"prior_nontarget":0.0095,"prior_spoof":0.05})");
  double worst_eer = 0.0, worst_tdcf = 0.0;
  for (int set = 0; set < 200; ++set) {
    const int np = 1 + static_cast<int>(rng.UniformIndex(60));
    const int nn = 1 + static_cast<int>(rng.UniformIndex(60));
    const double shift = rng.Uniform(-1.0, 3.0);
    const bool ties = set % 3 == 0;
    auto draw = [&](double mu) {
      const double v = mu + rng.Normal();
      return ties ? std::round(v * 4.0) / 4.0 : v;
    };
    metrics::ScoreSet s;
    for (int i = 0; i < np; ++i) s.positives.push_back(draw(shift));
    for (int i = 0; i < nn; ++i) s.negatives.push_back(draw(0.0));
    metrics::AsvOperatingPoint asv{rng.Uniform(0.0, 0.2), rng.Uniform(0.0, 0.2),
                                   rng.Uniform(0.0, 0.8), 0.0};
    const double eer = metrics::ComputeEer(s).eer;
    worst_eer = std::max(worst_eer, std::abs(eer - oracle::Eer(s.positives, s.negatives)));
    const auto t = metrics::MinTdcf(s, asv, params);
    worst_tdcf = std::max(worst_tdcf,
                          std::abs(t.min_tdcf - oracle::MinTdcf(s.positives, s.negatives, t.c1, t.c2)));
  }
  o.Check(worst_eer <= kMetricTol, "EER differs from the sweep oracle");
  o.Check(worst_tdcf <= kMetricTol, "min t-DCF differs from the sweep oracle");

  const metrics::AsvOperatingPoint ideal{};
  const metrics::ScoreSet perfect{{1, 2}, {-2, -1}};
  o.Check(metrics::ComputeEer(perfect).eer == 0.0, "perfect CM EER != 0");
  o.Check(metrics::MinTdcf(perfect, ideal, params).min_tdcf == 0.0, "perfect CM min t-DCF != 0");
  const metrics::ScoreSet constant{{0.5, 0.5, 0.5}, {0.5, 0.5}};
  o.Check(metrics::ComputeEer(constant).eer == 0.5, "constant CM EER != 0.5");
  o.Check(std::abs(metrics::MinTdcf(constant, ideal, params).min_tdcf - 1.0) <= kMetricTol,
          "constant CM min t-DCF != 1");
  const metrics::ScoreSet same{{0.1, 0.7, 1.3}, {1.3, 0.1, 0.7}};
  o.Check(metrics::ComputeEer(same).eer == 0.5, "identical sets EER != 0.5");
  if (o.pass) {
    o.detail = fmt::format("200 sets, max |EER err| {:.1e}, max |t-DCF err| {:.1e}; trivial cases exact",
                           worst_eer, worst_tdcf);
  }
  return o;
}

// 3. Room physics.
Outcome RoomPhysics() {
  Outcome o;
  constexpr int kFs = 16000;
  int inside = 0, total = 0;
  double worst_delay = 0.0;
  std::string worst;
  for (int r = 0; r < 3; ++r) {
    const room::Interval band = room::ReverbTime(r);
    for (int i = 0; i < 20; ++i) {
      const room::EnvironmentLabel label{i % 3, r, (i / 3) % 3};
      Rng rng(DeriveSeed(7, "room-physics|" + std::to_string(r) + "|" + std::to_string(i)));
      const auto rm = room::SampleEnvironment(label, std::nullopt, rng);
      const auto ir = room::SimulateRir(rm, rm.talker, rm.mic, room::Directivity::kOmnidirectional,
                                        {1, 0, 0}, kFs);
      double t60 = 0.0;
      try {
        t60 = room::MeasureT60(ir);
      } catch (const InsufficientDecayError&) {
        t60 = -1.0;
      }
      ++total;
      if (t60 >= band.lo * (1.0 - kT60Slack) && t60 <= band.hi * (1.0 + kT60Slack)) {
        ++inside;
      } else if (worst.empty()) {
        worst = fmt::format("{} T60 {:.3f} s outside [{:.3f}, {:.3f}]", label.ToString(), t60,
                            band.lo * (1.0 - kT60Slack), band.hi * (1.0 + kT60Slack));
      }

      // The direct path alone: the same geometry with fully absorbing walls.
      room::RoomInstance anechoic = rm;
      anechoic.absorption = 1.0;
      const auto direct = room::SimulateRir(anechoic, rm.talker, rm.mic,
                                            room::Directivity::kOmnidirectional, {1, 0, 0}, kFs);
      std::size_t peak = 0;
      for (std::size_t n = 1; n < direct.taps.size(); ++n) {
        if (std::abs(direct.taps[n]) > std::abs(direct.taps[peak])) peak = n;
      }
      const double expected = room::Distance(rm.talker, rm.mic) / room::kSpeedOfSound * kFs;
      worst_delay = std::max(worst_delay, std::abs(peak - expected));
      // The direct arrival is the reverberant response's first large peak.
      o.Check(std::abs(ir.taps[peak]) >= 0.5 * std::abs(direct.taps[peak]),
              "reverberant response lacks the direct path at the geometric delay");
    }
  }
  o.Check(inside == total, worst);
  o.Check(worst_delay <= kDelayTolSamples, fmt::format("direct-path delay off by {:.2f} samples", worst_delay));
  if (o.pass) {
    o.detail = fmt::format("{}/{} rooms within interval +-20%, max direct-path error {:.2f} samples",
                           inside, total, worst_delay);
  }
  return o;
}

// 4. Device classes.
Outcome DeviceClasses() {
  Outcome o;
  int ok[2] = {0, 0};
  const device::Quality classes[2] = {device::Quality::kHigh, device::Quality::kLow};
  for (int c = 0; c < 2; ++c) {
    for (int i = 0; i < 50; ++i) {
      Rng rng(DeriveSeed(11, std::string(device::ToString(classes[c])) + std::to_string(i)));
      // One draw, no retries: the synthesis ranges themselves must land in class.
      try {
        const auto d = device::SynthesizeDevice(classes[c], rng, {96000, 1});
        ok[c] += device::ClassifyDevice(device::MeasureDevice(d)) == classes[c];
      } catch (const SynthesisError&) {
      }
    }
  }
  o.Check(ok[0] >= kDeviceSuccess * 50, fmt::format("high class: {}/50", ok[0]));
  o.Check(ok[1] >= kDeviceSuccess * 50, fmt::format("low class: {}/50", ok[1]));

  Rng rng(5);
  Waveform w{std::vector<double>(4801), 48000};
  for (double& v : w.samples) v = rng.Uniform(-1.0, 1.0);
  const auto out = device::ApplyDevice(w, device::DeviceModel::Perfect(48000));
  o.Check(out.samples == w.samples && out.sample_rate == w.sample_rate,
          "perfect device is not the identity");
  const auto m = device::MeasureDevice(device::DeviceModel::Perfect(48000));
  o.Check(device::ClassifyDevice(m) == device::Quality::kPerfect, "perfect device misclassified");
  if (o.pass) {
    o.detail = fmt::format("single-draw success high {}/50, low {}/50; perfect device bit-exact",
                           ok[0], ok[1]);
  }
  return o;
}

// 5. Feature contracts.
Outcome FeatureContracts() {
  Outcome o;
  Rng rng(3);
  Waveform noise{std::vector<double>(16000), 16000};
  for (double& v : noise.samples) v = 0.1 * rng.Normal();
  const auto cq = features::Cqcc(noise);
  const auto lf = features::Lfcc(noise);
  o.Check(cq.dims == 90, "CQCC dims != 90");
  o.Check(lf.dims == 60, "LFCC dims != 60");

  for (int i = 0; i < 100; ++i) {
    const std::size_t n = 320 + rng.UniformIndex(47681);
    Waveform w{std::vector<double>(n, 0.0), 16000};
    for (std::size_t k = 0; k < n; k += 97) w.samples[k] = 0.01;
    const auto f = features::Lfcc(w);
    if (f.frames != oracle::LfccFrames(n)) {
      o.Check(false, fmt::format("LFCC frames {} for {} samples, expected {}", f.frames, n,
                                 oracle::LfccFrames(n)));
      break;
    }
  }

  double worst = 0.0;
  for (double g : {0.37, 2.9}) {
    Waveform scaled = noise;
    for (double& v : scaled.samples) v *= g;
    const auto cq2 = features::Cqcc(scaled);
    const auto lf2 = features::Lfcc(scaled);
    for (const auto& [a, b] : {std::pair{&cq, &cq2}, std::pair{&lf, &lf2}}) {
      for (std::size_t t = 0; t < a->frames; ++t) {
        for (std::size_t d = 1; d < a->dims; ++d) {
          worst = std::max(worst, std::abs(a->at(t, d) - b->at(t, d)));
        }
      }
    }
  }
  o.Check(worst <= kGainTol, fmt::format("gain changed non-DC coefficients by {:.2e}", worst));

  features::FeatureMatrix m(5, 7);
  for (double& v : m.values) v = rng.Normal();
  const auto d = features::AppendDeltas(m);
  o.Check(d.values == oracle::Deltas(m.values, 5, 7), "deltas differ from the direct formula");
  if (o.pass) {
    o.detail = fmt::format("dims 90/60, 100 LFCC lengths, gain error {:.1e}, deltas exact", worst);
  }
  return o;
}

features::FeatureMatrix MixtureData(Rng& rng, std::size_t n, std::size_t dims, int comps) {
  std::vector<std::vector<double>> centres(comps, std::vector<double>(dims));
  std::vector<double> scales(comps);
  for (int k = 0; k < comps; ++k) {
    for (double& c : centres[k]) c = rng.Uniform(-5.0, 5.0);
    scales[k] = rng.Uniform(0.3, 2.0);
  }
  features::FeatureMatrix x(n, dims);
  for (std::size_t t = 0; t < n; ++t) {
    const auto k = rng.UniformIndex(comps);
    for (std::size_t d = 0; d < dims; ++d) x.at(t, d) = centres[k][d] + scales[k] * rng.Normal();
  }
  return x;
}

// 6. EM behaviour.
Outcome EmBehaviour() {
  Outcome o;
  Rng rng(6);
  for (int set = 0; set < 50; ++set) {
    const std::size_t dims = 1 + rng.UniformIndex(6);
    const int comps = 1 + static_cast<int>(rng.UniformIndex(5));
    auto x = MixtureData(rng, 400 + rng.UniformIndex(800), dims, comps);
    gmm::TrainConfig cfg;
    cfg.components = 1 + static_cast<int>(rng.UniformIndex(8));
    cfg.em_iters = 20;
    cfg.seed = set;
    const auto r = gmm::TrainGmm(x, cfg);
    for (std::size_t i = 1; i < r.log_likelihood.size(); ++i) {
      const double drop = r.log_likelihood[i - 1] - r.log_likelihood[i];
      if (drop > kEmSlack * std::abs(r.log_likelihood[i - 1])) {
        o.Check(false, fmt::format("set {}: log-likelihood fell by {:.3e} at iteration {}", set, drop, i));
      }
    }
  }

  // K = 1 closed form.
  auto x = MixtureData(rng, 1000, 3, 2);
  gmm::TrainConfig one;
  one.components = 1;
  const auto m1 = gmm::TrainGmm(x, one).model;
  for (std::size_t d = 0; d < 3; ++d) {
    long double mean = 0, var = 0;
    for (std::size_t t = 0; t < x.frames; ++t) mean += x.at(t, d);
    mean /= x.frames;
    for (std::size_t t = 0; t < x.frames; ++t) var += (x.at(t, d) - mean) * (x.at(t, d) - mean);
    var /= x.frames;
    o.Check(std::abs(m1.means[d] - static_cast<double>(mean)) <= 1e-12 * (1 + std::abs(static_cast<double>(mean))),
            "K=1 mean differs from the sample mean");
    o.Check(std::abs(m1.variances[d] - static_cast<double>(var)) <= 1e-10 * static_cast<double>(var),
            "K=1 variance differs from the sample variance");
  }
  o.Check(m1.weights[0] == 1.0, "K=1 weight != 1");

  // Two separated clusters.
  features::FeatureMatrix two(10000, 1);
  for (std::size_t t = 0; t < two.frames; ++t) two.at(t, 0) = (t % 2 ? 10.0 : 0.0) + 0.5 * rng.Normal();
  // The split starts both halves at the pooled variance, where EM only
  // escapes the symmetric fixed point slowly; 100 iterations reach it.
  gmm::TrainConfig k2;
  k2.components = 2;
  k2.em_iters = 100;
  const auto m2 = gmm::TrainGmm(two, k2).model;
  const std::size_t lo = m2.means[0] < m2.means[1] ? 0 : 1;
  o.Check(std::abs(m2.means[lo]) <= kClusterMeanTol && std::abs(m2.means[1 - lo] - 10.0) <= kClusterMeanTol,
          fmt::format("cluster means {:.3f}, {:.3f}", m2.means[0], m2.means[1]));
  o.Check(std::abs(m2.weights[0] - 0.5) <= kClusterWeightTol, "cluster weights off 0.5");
  if (o.pass) {
    o.detail = fmt::format("50 datasets monotone, K=1 exact, clusters at {:.3f} / {:.3f}",
                           m2.means[lo], m2.means[1 - lo]);
  }
  return o;
}

// 7. Eq. 1 and UPGMA.
Outcome DistanceAndUpgma() {
  Outcome o;
  Rng rng(77);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    embed::EmbeddingSet e;
    e.dims = 4;
    std::map<std::string, std::vector<oracle::Vec>> byclass;
    for (int c = 0; c < 5; ++c) {
      const int n = 1 + static_cast<int>(rng.UniformIndex(6));
      for (int i = 0; i < n; ++i) {
        oracle::Vec v(4);
        for (double& x : v) x = rng.Normal();
        const std::string label = "C" + std::to_string(c);
        e.utt_ids.push_back(label + "_" + std::to_string(i));
        e.speaker_ids.push_back("spk");
        e.class_ids.push_back(label);
        e.values.insert(e.values.end(), v.begin(), v.end());
        byclass[label].push_back(v);
      }
    }
    const auto d = embed::AttackDistance(e);
    for (std::size_t i = 0; i < d.size(); ++i) {
      o.Check(d.at(i, i) == 0.0, "D(X, X) != 0");
      for (std::size_t j = 0; j < d.size(); ++j) {
        if (i == j) continue;
        worst = std::max(worst, std::abs(d.at(i, j) - oracle::AttackDistance(byclass[d.labels[i]],
                                                                              byclass[d.labels[j]])));
      }
    }
  }
  o.Check(worst <= kDistanceTol, fmt::format("attack distance differs by {:.2e}", worst));

  int matched = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 2 + static_cast<int>(rng.UniformIndex(9));
    embed::DistanceMatrix dm;
    std::vector<std::vector<double>> raw(m, std::vector<double>(m, 0.0));
    for (int i = 0; i < m; ++i) dm.labels.push_back(fmt::format("L{:02d}", i));
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        if (i != j) raw[i][j] = rng.Uniform(0.0, 2.0);
    for (const auto& row : raw) dm.values.insert(dm.values.end(), row.begin(), row.end());
    const auto tree = embed::Upgma(dm);
    const auto ref = oracle::NaiveUpgma(raw);
    std::vector<std::set<int>> members;
    for (int i = 0; i < m; ++i) members.push_back({i});
    bool same = tree.merges.size() == ref.size();
    for (std::size_t k = 0; same && k < ref.size(); ++k) {
      std::set<int> s = members[tree.merges[k].left];
      s.insert(members[tree.merges[k].right].begin(), members[tree.merges[k].right].end());
      members.push_back(s);
      same = s == ref[k].members && std::abs(tree.merges[k].height - ref[k].height) <= kHeightTol;
    }
    matched += same;
  }
  o.Check(matched == 100, fmt::format("UPGMA matched the naive oracle on {}/100 matrices", matched));
  if (o.pass) {
    o.detail = fmt::format("20 random 5-class sets within {:.1e}, UPGMA 100/100", worst);
  }
  return o;
}

// 8. Desk-scale trend.
struct TrendRun {
  std::map<std::string, double> eer;  // attack -> EER
};

TrendRun RunTrend(std::uint64_t seed, const fs::path& dir) {
  const auto speakers = replay::WriteSyntheticCorpus(dir / "corpus", 10, 4, 2.0, 16000, seed);
  const std::vector<room::EnvironmentLabel> envs = {room::EnvironmentLabel::Parse("aaa"),
                                                    room::EnvironmentLabel::Parse("ccc")};
  const std::vector<replay::AttackLabel> attacks = {replay::AttackLabel::Parse("AA"),
                                                    replay::AttackLabel::Parse("AC"),
                                                    replay::AttackLabel::Parse("CC")};
  const auto manifest = replay::GenerateProtocol(speakers, replay::Partition::kTrain, envs, attacks, seed);
  const auto report = replay::RunGrid(dir / "corpus", manifest, dir / "audio", seed);
  if (!report.ok()) throw Error("simulation failed: " + report.ToJson());

  // Speaker-disjoint halves.
  std::set<std::string> train_speakers;
  for (std::size_t i = 0; i < speakers.size() / 2; ++i) train_speakers.insert(speakers[i].speaker_id);
  std::vector<features::FeatureMatrix> bona_train, spoof_train;
  std::vector<std::pair<const replay::TrialRecord*, features::FeatureMatrix>> test;
  for (const auto& r : manifest.records) {
    const Waveform w = ReadWav(dir / "audio" / replay::OutputName(manifest.partition, r));
    auto f = features::Cqcc(w);
    if (train_speakers.count(r.speaker_id)) {
      (r.key == replay::Key::kBonafide ? bona_train : spoof_train).push_back(std::move(f));
    } else {
      test.emplace_back(&r, std::move(f));
    }
  }
  gmm::TrainConfig cfg;
  cfg.components = 32;
  cfg.seed = DeriveSeed(seed, "bona");
  const auto bona = gmm::TrainGmm(gmm::PoolFrames(bona_train), cfg).model;
  cfg.seed = DeriveSeed(seed, "spoof");
  const auto spoof = gmm::TrainGmm(gmm::PoolFrames(spoof_train), cfg).model;

  std::vector<double> bona_scores;
  std::map<std::string, std::vector<double>> spoof_scores;
  for (const auto& [r, f] : test) {
    const double s = gmm::ScoreLlr(f, bona, spoof);
    if (r->attack) spoof_scores[r->AttackString()].push_back(s);
    else bona_scores.push_back(s);
  }
  TrendRun run;
  for (const auto& [attack, scores] : spoof_scores) {
    run.eer[attack] = metrics::ComputeEer({bona_scores, scores}).eer;
  }
  fs::remove_all(dir);
  return run;
}

Outcome DeskScaleTrend() {
  Outcome o;
  std::string summary;
  int held = 0;
  for (std::uint64_t seed : {101, 202, 303}) {
    const auto run = RunTrend(seed, Scratch("trend_" + std::to_string(seed)));
    const double aa = run.eer.at("AA"), ac = run.eer.at("AC"), cc = run.eer.at("CC");
    const bool ok = ac < aa && cc < aa;
    held += ok;
    summary += fmt::format("{}seed {}: AA {:.3f} AC {:.3f} CC {:.3f}", summary.empty() ? "" : "; ",
                           seed, aa, ac, cc);
  }
  o.Check(held == 3, fmt::format("ordering held on {}/3 seeds ({})", held, summary));
  if (o.pass) o.detail = summary;
  return o;
}

// 9. Determinism of the full command-line pipeline.
std::map<std::string, std::string> Snapshot(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    files[fs::relative(e.path(), root).string()] = buf.str();
  }
  return files;
}

int PipelineOnce(const fs::path& dir) {
  const fs::path old = fs::current_path();
  fs::current_path(dir);
  const std::vector<std::vector<std::string>> steps = {
      {"--seed", "9", "--log-level", "warn", "make-corpus", "--out", "corpus", "--speakers", "4",
       "--utts", "2", "--seconds", "1.5"},
      {"--seed", "9", "--log-level", "warn", "make-protocol", "--num-speakers", "4",
       "--utts-per-speaker", "2", "--envs", "aaa,cbc", "--attacks", "AA,BB,CC", "--out", "protocol.txt"},
      {"--seed", "9", "--log-level", "warn", "simulate", "--protocol", "protocol.txt", "--corpus",
       "corpus", "--out", "audio"},
      {"--seed", "9", "--log-level", "warn", "extract-features", "--protocol", "protocol.txt",
       "--audio", "audio", "--out", "features"},
      {"--seed", "9", "--log-level", "warn", "train-cm", "--protocol", "protocol.txt", "--features",
       "features", "--out", "models", "--components", "4"},
      {"--seed", "9", "--log-level", "warn", "score-cm", "--protocol", "protocol.txt", "--partition",
       "train", "--features", "features", "--models", "models", "--out", "scores.txt"},
      {"--seed", "9", "--log-level", "warn", "evaluate", "--scores", "scores.txt", "--protocol",
       "protocol.txt", "--partition", "train", "--out", "report.json"},
  };
  int status = 0;
  for (const auto& args : steps) {
    status = cli::Run(args);
    if (status != 0) break;
  }
  fs::current_path(old);
  return status;
}

Outcome Determinism() {
  Outcome o;
  const fs::path a = Scratch("determinism_a");
  const fs::path b = Scratch("determinism_b");
  o.Check(PipelineOnce(a) == 0, "first pipeline run failed");
  o.Check(PipelineOnce(b) == 0, "second pipeline run failed");
  const auto sa = Snapshot(a), sb = Snapshot(b);
  std::size_t differing = 0;
  for (const auto& [name, bytes] : sa) {
    auto it = sb.find(name);
    differing += it == sb.end() || it->second != bytes;
  }
  o.Check(sa.size() == sb.size() && differing == 0,
          fmt::format("{} of {} artifacts differ", differing + (sa.size() != sb.size()), sa.size()));
  o.Check(sa.count("report.json") && sa.count("scores.txt") && sa.count("models/bonafide.gmm"),
          "pipeline artifacts missing");
  if (o.pass) o.detail = fmt::format("{} artifacts byte-identical across two runs", sa.size());
  fs::remove_all(a);
  fs::remove_all(b);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_level(spdlog::level::err);
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"protocol arithmetic", ProtocolArithmetic},
      {"metric oracles", MetricOracles},
      {"room physics", RoomPhysics},
      {"device classes", DeviceClasses},
      {"feature contracts", FeatureContracts},
      {"EM behaviour", EmBehaviour},
      {"attack distance and UPGMA", DistanceAndUpgma},
      {"desk-scale trend", DeskScaleTrend},
      {"determinism", Determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > kBudget[id]) {
      o.pass = false;
      o.detail += fmt::format(" (over the {:.0f} s budget)", kBudget[id]);
    }
    std::printf("[criterion %d] %s: %s - %s (%.1f s)\n", id, o.pass ? "PASS" : "FAIL",
                criteria[i].first, o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
