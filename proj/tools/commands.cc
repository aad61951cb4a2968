#include "commands.h"

#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <atomic>
#include <fstream>
#include <json.hpp>
#include <set>
#include <thread>

#include "json_config.h"
#include "spoofsim/device.h"
#include "spoofsim/embed.h"
#include "spoofsim/errors.h"
#include "spoofsim/features.h"
#include "spoofsim/gmm.h"
#include "spoofsim/json_io.h"
#include "spoofsim/metrics.h"
#include "spoofsim/replay.h"

#ifndef SPOOFSIM_VERSION
#define SPOOFSIM_VERSION "0.0.0"
#endif
#ifndef SPOOFSIM_DEFAULT_TDCF_CONFIG
#define SPOOFSIM_DEFAULT_TDCF_CONFIG "config/tdcf_asvspoof2019.json"
#endif

namespace spoofsim::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Common {
  std::uint64_t seed = 0;
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  bool deterministic = false;
  std::string log_level = "info";
};

std::uint64_t Fnv1a(std::string_view bytes, std::uint64_t h = 1469598103934665603ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string Hex(std::uint64_t v) { return fmt::format("{:016x}", v); }

// Option values of the invoked subcommand that can change its artifacts.
json EffectiveOptions(const CLI::App& sub) {
  static const std::set<std::string> kIgnored = {"jobs", "log-level", "config", "help"};
  json j = json::object();
  for (const CLI::Option* opt : sub.get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string name = opt->get_lnames().front();
    if (kIgnored.count(name)) continue;
    if (opt->count() > 0) {
      const auto& r = opt->results();
      if (opt->get_type_size() == 0) {
        j[name] = true;
      } else {
        j[name] = r.size() == 1 ? json(r.front()) : json(r);
      }
    } else if (!opt->get_default_str().empty()) {
      j[name] = opt->get_default_str();
    }
  }
  return j;
}

// Provenance record; contains nothing that differs between identical runs.
void WriteRunRecord(const fs::path& path, const CLI::App& sub, const Common& common) {
  json j;
  j["tool"] = "spoofsim";
  j["version"] = SPOOFSIM_VERSION;
  j["command"] = sub.get_name();
  j["seed"] = common.seed;
  j["deterministic"] = common.deterministic;
  j["options"] = EffectiveOptions(sub);
  j["config_hash"] = Hex(Fnv1a(j["options"].dump()));
  WriteTextFile(path, j.dump(2) + "\n");
}

fs::path RunRecordFor(const fs::path& output, bool is_dir) {
  return is_dir ? output / "run.json" : fs::path(output.string() + ".run.json");
}

void RequireDir(const fs::path& p, const char* what) {
  if (!fs::is_directory(p)) throw ArgumentError(std::string(what) + " directory not found: " + p.string());
}

void RequireFile(const fs::path& p, const char* what) {
  if (!fs::is_regular_file(p)) throw IoError(std::string(what) + " file not found: " + p.string());
}

void MakeDir(const fs::path& p) {
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw IoError("cannot create " + p.string() + ": " + ec.message());
}

std::vector<room::EnvironmentLabel> ParseEnvs(const std::string& text) {
  if (text == "all") return room::EnvironmentLabel::All();
  std::vector<room::EnvironmentLabel> out;
  std::stringstream ss(text);
  for (std::string tok; std::getline(ss, tok, ',');) out.push_back(room::EnvironmentLabel::Parse(tok));
  return out;
}

std::vector<replay::AttackLabel> ParseAttacks(const std::string& text) {
  if (text == "all") return replay::AttackLabel::All();
  if (text == "none") return {};
  std::vector<replay::AttackLabel> out;
  std::stringstream ss(text);
  for (std::string tok; std::getline(ss, tok, ',');) out.push_back(replay::AttackLabel::Parse(tok));
  return out;
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads; the first exception is
// rethrown after all workers finish.
template <typename Fn>
void ParallelFor(std::size_t n, int jobs, Fn fn) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex mu;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!error) error = std::current_exception();
      }
    }
  };
  const auto threads_wanted = std::min<std::size_t>(std::max(1, jobs), n);
  if (threads_wanted <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < threads_wanted; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  if (error) std::rethrow_exception(error);
}

// ---------------------------------------------------------------------------

struct CorpusArgs {
  std::string out;
  int speakers = 10;
  int utts = 4;
  double seconds = 2.0;
  int rate = replay::kOutputRate;
  std::string prefix = "SPK";
  std::string speaker_list;
};

int MakeCorpus(const CorpusArgs& a, const Common& c, const CLI::App& sub) {
  const auto list = replay::WriteSyntheticCorpus(a.out, a.speakers, a.utts, a.seconds, a.rate,
                                                 c.seed, a.prefix);
  if (!a.speaker_list.empty()) {
    std::string text;
    for (const auto& s : list) text += s.speaker_id + "\n";
    WriteTextFile(a.speaker_list, text);
  }
  WriteRunRecord(RunRecordFor(a.out, true), sub, c);
  spdlog::info("wrote {} utterances to {}", list.size() * a.utts, a.out);
  return kExitOk;
}

struct ProtocolArgs {
  std::string speakers_file;
  int num_speakers = 0;
  std::string prefix = "SPK";
  int utts = 10;
  std::string partition = "train";
  std::string envs = "all";
  std::string attacks = "all";
  std::string out;
};

int MakeProtocol(const ProtocolArgs& a, const Common& c, const CLI::App& sub) {
  std::vector<std::string> ids;
  if (!a.speakers_file.empty()) {
    RequireFile(a.speakers_file, "speaker list");
    std::stringstream ss(ReadTextFile(a.speakers_file));
    for (std::string id; ss >> id;) ids.push_back(id);
  } else {
    for (int s = 1; s <= a.num_speakers; ++s) ids.push_back(fmt::format("{}{:03d}", a.prefix, s));
  }
  if (ids.empty()) throw ArgumentError("no speakers: give --speakers-file or --num-speakers");
  const auto partition = replay::ParsePartition(a.partition);
  const auto envs = ParseEnvs(a.envs);
  const auto attacks = ParseAttacks(a.attacks);
  const auto manifest = replay::GenerateProtocol(replay::MakeSpeakerList(ids, a.utts), partition,
                                                 envs, attacks, c.seed);
  replay::WriteManifest(a.out, manifest);
  WriteRunRecord(RunRecordFor(a.out, false), sub, c);
  spdlog::info("{} records ({} environments, {} attacks)", manifest.records.size(), envs.size(),
               attacks.size());
  return kExitOk;
}

struct SimulateArgs {
  std::string protocol;
  std::string partition = "train";
  std::string corpus;
  std::string out;
  int work_rate = replay::kDefaultWorkRate;
  int device_pool = 8;
  std::string report;
};

int Simulate(const SimulateArgs& a, const Common& c, const CLI::App& sub) {
  RequireFile(a.protocol, "protocol");
  RequireDir(a.corpus, "corpus");
  const auto manifest = replay::ReadManifest(a.protocol, replay::ParsePartition(a.partition), c.seed);
  replay::GridOptions opt;
  opt.work_rate = a.work_rate;
  opt.jobs = c.jobs;
  opt.device_pool_size = a.device_pool;
  const auto report = replay::RunGrid(a.corpus, manifest, a.out, c.seed, opt);
  const fs::path report_path = a.report.empty() ? fs::path(a.out) / "run_report.json" : fs::path(a.report);
  MakeDir(fs::path(a.out));
  WriteTextFile(report_path, report.ToJson() + "\n");
  WriteRunRecord(RunRecordFor(a.out, true), sub, c);
  spdlog::info("{} of {} records written, {} condition cells", report.written, report.records,
               report.conditions.size());
  if (!report.ok()) {
    for (const auto& m : report.missing) spdlog::error("missing source: {}", m);
    for (const auto& f : report.failures) spdlog::error("failed: {}", f);
    return kExitDataFailure;
  }
  return kExitOk;
}

struct FeatureArgs {
  std::string protocol;
  std::string partition = "train";
  std::string audio;
  std::string out;
  std::string feature = "cqcc";
  bool csv = false;
};

fs::path FeaturePath(const fs::path& dir, const replay::TrialRecord& r) {
  return dir / (r.TrialId() + ".feat");
}

int ExtractFeatures(const FeatureArgs& a, const Common& c, const CLI::App& sub) {
  RequireFile(a.protocol, "protocol");
  RequireDir(a.audio, "audio");
  const auto partition = replay::ParsePartition(a.partition);
  const auto kind = features::ParseFeatureKind(a.feature);
  const auto manifest = replay::ReadManifest(a.protocol, partition, c.seed);
  std::vector<std::string> missing;
  for (const auto& r : manifest.records) {
    if (!fs::is_regular_file(fs::path(a.audio) / replay::OutputName(partition, r))) {
      missing.push_back(replay::OutputName(partition, r));
    }
  }
  if (!missing.empty()) {
    for (const auto& m : missing) spdlog::error("missing audio: {}", m);
    return kExitDataFailure;
  }
  MakeDir(a.out);
  ParallelFor(manifest.records.size(), c.jobs, [&](std::size_t i) {
    const auto& r = manifest.records[i];
    const Waveform w = ReadWav(fs::path(a.audio) / replay::OutputName(partition, r));
    const auto f = features::Extract(w, kind);
    features::WriteFeatures(FeaturePath(a.out, r), f);
    if (a.csv) features::WriteFeaturesCsv(fs::path(a.out) / (r.TrialId() + ".csv"), f);
  });
  WriteRunRecord(RunRecordFor(a.out, true), sub, c);
  spdlog::info("extracted {} {} feature files", manifest.records.size(), a.feature);
  return kExitOk;
}

struct TrainArgs {
  std::string protocol;
  std::string partition = "train";
  std::string features;
  std::string out;
  int components = 512;
  int em_iters = 20;
  double variance_floor = 1e-6;
};

int TrainCm(const TrainArgs& a, const Common& c, const CLI::App& sub) {
  RequireFile(a.protocol, "protocol");
  RequireDir(a.features, "features");
  if (a.components < 1 || a.em_iters < 1) throw ArgumentError("components and em-iters must be >= 1");
  const auto manifest = replay::ReadManifest(a.protocol, replay::ParsePartition(a.partition), c.seed);
  std::vector<features::FeatureMatrix> sets[2];
  for (const auto& r : manifest.records) {
    const fs::path p = FeaturePath(a.features, r);
    if (!fs::is_regular_file(p)) throw ValidationError("missing features for " + r.TrialId());
    sets[r.key == replay::Key::kBonafide ? 0 : 1].push_back(features::ReadFeatures(p));
  }
  if (sets[0].empty() || sets[1].empty()) {
    throw ValidationError("training protocol needs both bonafide and spoof records");
  }
  const features::FeatureMatrix pooled[2] = {gmm::PoolFrames(sets[0]), gmm::PoolFrames(sets[1])};
  for (int k = 0; k < 2; ++k) {
    if (pooled[k].frames < static_cast<std::size_t>(a.components)) {
      throw ArgumentError(fmt::format("{} frames for {} components ({} data)", pooled[k].frames,
                                      a.components, k == 0 ? "bonafide" : "spoof"));
    }
  }
  MakeDir(a.out);
  static constexpr const char* kNames[2] = {"bonafide", "spoof"};
  for (int k = 0; k < 2; ++k) {
    gmm::TrainConfig cfg;
    cfg.components = a.components;
    cfg.em_iters = a.em_iters;
    cfg.seed = DeriveSeed(c.seed, std::string("gmm|") + kNames[k]);
    cfg.variance_floor_factor = a.variance_floor;
    cfg.jobs = c.jobs;
    const auto result = gmm::TrainGmm(pooled[k], cfg);
    for (std::size_t i = 0; i < result.log_likelihood.size(); ++i) {
      spdlog::info("{} EM {:2d}: {:.6f}", kNames[k], i, result.log_likelihood[i]);
    }
    gmm::WriteGmm(fs::path(a.out) / (std::string(kNames[k]) + ".gmm"), result.model);
    const auto& v = pooled[k].values;
    std::vector<float> as_float(v.begin(), v.end());
    json meta = {{"components", a.components},
                 {"em_iters", a.em_iters},
                 {"seed", cfg.seed},
                 {"variance_floor_factor", a.variance_floor},
                 {"dims", pooled[k].dims},
                 {"frames", pooled[k].frames},
                 {"files", sets[k].size()},
                 {"data_hash", Hex(Fnv1a({reinterpret_cast<const char*>(as_float.data()),
                                          as_float.size() * sizeof(float)}))},
                 {"log_likelihood", result.log_likelihood}};
    WriteTextFile(fs::path(a.out) / (std::string(kNames[k]) + ".json"), meta.dump(2) + "\n");
  }
  WriteRunRecord(RunRecordFor(a.out, true), sub, c);
  return kExitOk;
}

struct ScoreArgs {
  std::string protocol;
  std::string partition = "eval";
  std::string features;
  std::string models;
  std::string out;
  bool llr_sum = false;
};

int ScoreCm(const ScoreArgs& a, const Common& c, const CLI::App& sub) {
  RequireFile(a.protocol, "protocol");
  RequireDir(a.features, "features");
  RequireDir(a.models, "model");
  const auto manifest = replay::ReadManifest(a.protocol, replay::ParsePartition(a.partition), c.seed);
  for (const auto& r : manifest.records) {
    if (!fs::is_regular_file(FeaturePath(a.features, r))) {
      throw ValidationError("missing features for " + r.TrialId());
    }
  }
  const auto bona = gmm::ReadGmm(fs::path(a.models) / "bonafide.gmm");
  const auto spoof = gmm::ReadGmm(fs::path(a.models) / "spoof.gmm");
  std::vector<metrics::ScoreEntry> scores(manifest.records.size());
  ParallelFor(manifest.records.size(), c.jobs, [&](std::size_t i) {
    const auto& r = manifest.records[i];
    const auto f = features::ReadFeatures(FeaturePath(a.features, r));
    scores[i] = {r.TrialId(), gmm::ScoreLlr(f, bona, spoof, a.llr_sum)};
  });
  metrics::WriteScores(a.out, scores);
  WriteRunRecord(RunRecordFor(a.out, false), sub, c);
  return kExitOk;
}

struct EvaluateArgs {
  std::string scores;
  std::string protocol;
  std::string partition = "eval";
  std::string asv;
  std::string tdcf_config = SPOOFSIM_DEFAULT_TDCF_CONFIG;
  std::string out;
  std::string det;
};

int EvaluateCmd(const EvaluateArgs& a, const Common& c, const CLI::App& sub) {
  RequireFile(a.scores, "score");
  RequireFile(a.protocol, "protocol");
  RequireFile(a.tdcf_config, "t-DCF config");
  if (!a.asv.empty()) RequireFile(a.asv, "ASV score");
  const auto params = metrics::TdcfParams::Load(a.tdcf_config);
  const auto keys = replay::ReadManifest(a.protocol, replay::ParsePartition(a.partition), c.seed);
  const auto scores = metrics::ReadScores(a.scores);
  std::optional<metrics::AsvScores> asv;
  if (!a.asv.empty()) asv = metrics::GroupAsv(metrics::ReadAsvScores(a.asv));
  const auto report = metrics::Evaluate(scores, keys, asv, params);
  WriteTextFile(a.out, report.ToJson() + "\n");
  const fs::path det = a.det.empty() ? fs::path(a.out).replace_extension(".det.csv") : fs::path(a.det);
  report.WriteDetCsv(det);
  WriteRunRecord(RunRecordFor(a.out, false), sub, c);
  if (report.pooled.eer) {
    spdlog::info("EER {:.4f}%  min-tDCF {:.4f}", 100.0 * report.pooled.eer->eer,
                 report.pooled.tdcf->min_tdcf);
  }
  return kExitOk;
}

struct EmbedArgs {
  std::string embeddings;
  std::string out;
};

int AnalyzeEmbeddings(const EmbedArgs& a, const Common& c, const CLI::App& sub) {
  RequireFile(a.embeddings, "embedding");
  const auto raw = embed::ReadEmbeddingsCsv(a.embeddings);
  const auto processed = embed::Process(raw);
  const auto dist = embed::AttackDistance(processed);
  const auto tree = embed::Upgma(dist);
  MakeDir(a.out);
  embed::WriteEmbeddingsCsv(fs::path(a.out) / "processed.csv", processed);
  embed::WriteDistanceCsv(fs::path(a.out) / "distance.csv", dist);
  WriteTextFile(fs::path(a.out) / "dendrogram.json", tree.ToJson() + "\n");
  WriteTextFile(fs::path(a.out) / "dendrogram.nwk", tree.ToNewick() + "\n");
  WriteRunRecord(RunRecordFor(a.out, true), sub, c);
  return kExitOk;
}

struct MeasureArgs {
  std::string device;
  std::string out;
};

int MeasureDeviceCmd(const MeasureArgs& a, const Common& c, const CLI::App& sub) {
  RequireFile(a.device, "device");
  const auto d = LoadDevice(a.device);
  const std::string text = MeasurementToJson(device::MeasureDevice(d)) + "\n";
  if (a.out.empty()) {
    fmt::print("{}", text);
  } else {
    WriteTextFile(a.out, text);
    WriteRunRecord(RunRecordFor(a.out, false), sub, c);
  }
  return kExitOk;
}

struct SynthArgs {
  std::string quality = "high";
  int rate = replay::kDefaultWorkRate;
  std::string out;
};

int SynthDevice(const SynthArgs& a, const Common& c, const CLI::App& sub) {
  const auto q = device::ParseQuality(a.quality);
  device::DeviceModel d;
  if (q == device::Quality::kPerfect) {
    d = device::DeviceModel::Perfect(a.rate);
  } else {
    Rng rng(c.seed);
    d = device::SynthesizeDevice(q, rng, {a.rate, 100});
  }
  SaveDevice(a.out, d);
  WriteRunRecord(RunRecordFor(a.out, false), sub, c);
  spdlog::info("{}: {}", d.name, MeasurementToJson(device::MeasureDevice(d)));
  return kExitOk;
}

}  // namespace

int Run(const std::vector<std::string>& args) {
  CLI::App app{"spoofsim: replay-attack simulation and countermeasure evaluation"};
  app.set_version_flag("--version", SPOOFSIM_VERSION);
  app.require_subcommand(1);
  app.fallthrough();
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON config with flat keys; command-line flags override it");

  Common common;
  app.add_option("--seed", common.seed, "Master seed")->capture_default_str();
  app.add_option("--jobs", common.jobs, "Worker threads")->capture_default_str();
  app.add_flag("--deterministic", common.deterministic, "Ordered reductions (always on for GMM)");
  app.add_option("--log-level", common.log_level, "trace|debug|info|warn|error|off")
      ->capture_default_str();

  CorpusArgs corpus;
  auto* s_corpus = app.add_subcommand("make-corpus", "Write synthetic speech-shaped utterances");
  s_corpus->add_option("--out", corpus.out, "Corpus directory")->required();
  s_corpus->add_option("--speakers", corpus.speakers, "Speaker count")->capture_default_str();
  s_corpus->add_option("--utts", corpus.utts, "Utterances per speaker")->capture_default_str();
  s_corpus->add_option("--seconds", corpus.seconds, "Utterance length")->capture_default_str();
  s_corpus->add_option("--rate", corpus.rate, "Sample rate")->capture_default_str();
  s_corpus->add_option("--prefix", corpus.prefix, "Speaker id prefix")->capture_default_str();
  s_corpus->add_option("--speaker-list", corpus.speaker_list, "Also write the speaker ids here");

  ProtocolArgs proto;
  auto* s_proto = app.add_subcommand("make-protocol", "Generate a trial manifest");
  s_proto->add_option("--speakers-file", proto.speakers_file, "Speaker ids, whitespace separated");
  s_proto->add_option("--num-speakers", proto.num_speakers, "Generate <prefix>001.. ids")
      ->capture_default_str();
  s_proto->add_option("--prefix", proto.prefix, "Speaker id prefix")->capture_default_str();
  s_proto->add_option("--utts-per-speaker", proto.utts, "Utterances per speaker")->capture_default_str();
  s_proto->add_option("--partition", proto.partition, "train|dev|eval")->capture_default_str();
  s_proto->add_option("--envs", proto.envs, "all or comma list such as aaa,ccc")->capture_default_str();
  s_proto->add_option("--attacks", proto.attacks, "all, none or comma list such as AA,CC")
      ->capture_default_str();
  s_proto->add_option("--out", proto.out, "Manifest file")->required();

  SimulateArgs sim;
  auto* s_sim = app.add_subcommand("simulate", "Simulate bona fide and replayed trials");
  s_sim->add_option("--protocol", sim.protocol, "Manifest file")->required();
  s_sim->add_option("--partition", sim.partition, "train|dev|eval")->capture_default_str();
  s_sim->add_option("--corpus", sim.corpus, "Source WAV directory")->required();
  s_sim->add_option("--out", sim.out, "Output directory")->required();
  s_sim->add_option("--work-rate", sim.work_rate, "Simulation sample rate")->capture_default_str();
  s_sim->add_option("--device-pool", sim.device_pool, "Devices per quality class")
      ->capture_default_str();
  s_sim->add_option("--report", sim.report, "Run report path (default <out>/run_report.json)");

  FeatureArgs feat;
  auto* s_feat = app.add_subcommand("extract-features", "Compute CQCC or LFCC features");
  s_feat->add_option("--protocol", feat.protocol, "Manifest file")->required();
  s_feat->add_option("--partition", feat.partition, "train|dev|eval")->capture_default_str();
  s_feat->add_option("--audio", feat.audio, "Simulated WAV directory")->required();
  s_feat->add_option("--out", feat.out, "Feature directory")->required();
  s_feat->add_option("--feature", feat.feature, "cqcc|lfcc")->capture_default_str();
  s_feat->add_flag("--csv", feat.csv, "Also write CSV copies");

  TrainArgs train;
  auto* s_train = app.add_subcommand("train-cm", "Train bona fide and spoof GMMs");
  s_train->add_option("--protocol", train.protocol, "Manifest file")->required();
  s_train->add_option("--partition", train.partition, "train|dev|eval")->capture_default_str();
  s_train->add_option("--features", train.features, "Feature directory")->required();
  s_train->add_option("--out", train.out, "Model directory")->required();
  s_train->add_option("--components", train.components, "Mixture components")->capture_default_str();
  s_train->add_option("--em-iters", train.em_iters, "EM iterations")->capture_default_str();
  s_train->add_option("--variance-floor", train.variance_floor, "Floor / global variance")
      ->capture_default_str();

  ScoreArgs score;
  auto* s_score = app.add_subcommand("score-cm", "Score trials with the GMM pair");
  s_score->add_option("--protocol", score.protocol, "Manifest file")->required();
  s_score->add_option("--partition", score.partition, "train|dev|eval")->capture_default_str();
  s_score->add_option("--features", score.features, "Feature directory")->required();
  s_score->add_option("--models", score.models, "Model directory")->required();
  s_score->add_option("--out", score.out, "Score file")->required();
  s_score->add_flag("--llr-sum", score.llr_sum, "Sum frame LLRs instead of averaging");

  EvaluateArgs eval;
  auto* s_eval = app.add_subcommand("evaluate", "EER, min t-DCF and DET points");
  s_eval->add_option("--scores", eval.scores, "CM score file")->required();
  s_eval->add_option("--protocol", eval.protocol, "Manifest with the keys")->required();
  s_eval->add_option("--partition", eval.partition, "train|dev|eval")->capture_default_str();
  s_eval->add_option("--asv", eval.asv, "ASV score file (ideal ASV when omitted)");
  s_eval->add_option("--tdcf-config", eval.tdcf_config, "t-DCF constants")->capture_default_str();
  s_eval->add_option("--out", eval.out, "Report JSON")->required();
  s_eval->add_option("--det", eval.det, "DET CSV (default <out>.det.csv)");

  EmbedArgs emb;
  auto* s_emb = app.add_subcommand("analyze-embeddings", "Attack distances and UPGMA tree");
  s_emb->add_option("--embeddings", emb.embeddings, "CSV utt_id,speaker_id,class_id,v0,...")
      ->required();
  s_emb->add_option("--out", emb.out, "Output directory")->required();

  MeasureArgs meas;
  auto* s_meas = app.add_subcommand("measure-device", "Measure OB, minF and LNLR of a device");
  s_meas->add_option("--device", meas.device, "Device JSON")->required();
  s_meas->add_option("--out", meas.out, "Measurement JSON (stdout when omitted)");

  SynthArgs synth;
  auto* s_synth = app.add_subcommand("synth-device", "Draw a device of a quality class");
  s_synth->add_option("--quality", synth.quality, "perfect|high|low")->capture_default_str();
  s_synth->add_option("--rate", synth.rate, "Sample rate")->capture_default_str();
  s_synth->add_option("--out", synth.out, "Device JSON")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  const auto level = spdlog::level::from_str(common.log_level);
  spdlog::set_level(level);

  const CLI::App* sub = app.get_subcommands().front();
  try {
    const std::string name = sub->get_name();
    if (name == "make-corpus") return MakeCorpus(corpus, common, *sub);
    if (name == "make-protocol") return MakeProtocol(proto, common, *sub);
    if (name == "simulate") return Simulate(sim, common, *sub);
    if (name == "extract-features") return ExtractFeatures(feat, common, *sub);
    if (name == "train-cm") return TrainCm(train, common, *sub);
    if (name == "score-cm") return ScoreCm(score, common, *sub);
    if (name == "evaluate") return EvaluateCmd(eval, common, *sub);
    if (name == "analyze-embeddings") return AnalyzeEmbeddings(emb, common, *sub);
    if (name == "measure-device") return MeasureDeviceCmd(meas, common, *sub);
    if (name == "synth-device") return SynthDevice(synth, common, *sub);
  } catch (const ArgumentError& e) {
    spdlog::error("{}", e.what());
    return kExitUsage;
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return kExitDataFailure;
  }
  return kExitUsage;
}

}  // namespace spoofsim::cli
