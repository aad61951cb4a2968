#ifndef SPOOFSIM_METRICS_H_
#define SPOOFSIM_METRICS_H_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spoofsim/replay.h"

namespace spoofsim::metrics {

// Positives are bona fide (or target) scores, negatives spoof (or non-target).
// A score s is accepted at threshold t when s >= t.
struct ScoreSet {
  std::vector<double> positives;
  std::vector<double> negatives;
};

struct EerResult {
  double eer = 0.0;
  double threshold = 0.0;
};

// Miss and false-alarm rates at every distinct score, plus +inf; EER where the
// two step functions cross, interpolated linearly between adjacent thresholds.
EerResult ComputeEer(const ScoreSet& s);
// EER of the ROC convex hull.
EerResult ComputeEerRocch(const ScoreSet& s);

struct DetPoint {
  double p_miss = 0.0;
  double p_fa = 0.0;
  double threshold = 0.0;
};

// One point per distinct threshold, ascending, from (0, 1) to (1, 0) at +inf.
std::vector<DetPoint> DetPoints(const ScoreSet& s);

struct AsvScores {
  std::vector<double> targets;
  std::vector<double> nontargets;
  std::vector<double> spoofs;
};

struct AsvOperatingPoint {
  double p_miss = 0.0;
  double p_fa = 0.0;
  double p_miss_spoof = 0.0;
  double threshold = 0.0;
};

// Rates at the given threshold, by default the target/non-target EER
// threshold.
AsvOperatingPoint AsvRates(const AsvScores& asv, std::optional<double> threshold = std::nullopt);

struct TdcfParams {
  double cost_miss_asv = 0.0;
  double cost_fa_asv = 0.0;
  double cost_miss_cm = 0.0;
  double cost_fa_cm = 0.0;
  double prior_target = 0.0;
  double prior_nontarget = 0.0;
  double prior_spoof = 0.0;

  // Costs non-negative and not all zero, priors in [0, 1] summing to 1.
  void Validate() const;
  static TdcfParams FromJson(const std::string& text);
  static TdcfParams Load(const std::filesystem::path& path);
  std::string ToJson() const;
};

struct TdcfResult {
  double min_tdcf = 0.0;  // normalized
  double threshold = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
};

// C1 = pi_tar (Cmiss_cm - Cmiss_asv Pmiss_asv) - pi_non Cfa_asv Pfa_asv,
// C2 = Cfa_cm pi_spoof (1 - Pmiss_spoof_asv),
// t-DCF(t) = C1 Pmiss_cm(t) + C2 Pfa_cm(t), minimized over the thresholds of
// ComputeEer and divided by min(C1, C2). Throws DegenerateCostError when C1 or
// C2 is not positive.
TdcfResult MinTdcf(const ScoreSet& cm, const AsvOperatingPoint& asv, const TdcfParams& params);

struct ScoreEntry {
  std::string id;
  double score = 0.0;
};

// "ID SCORE" lines; scores written with 6 decimals.
std::vector<ScoreEntry> ReadScores(const std::filesystem::path& path);
void WriteScores(const std::filesystem::path& path, const std::vector<ScoreEntry>& scores);

enum class TrialType { kTarget, kNontarget, kSpoof };

struct AsvEntry {
  std::string id;
  double score = 0.0;
  TrialType type = TrialType::kTarget;
};

// "ID SCORE TRIAL_TYPE" lines, TRIAL_TYPE in {target, nontarget, spoof}.
std::vector<AsvEntry> ReadAsvScores(const std::filesystem::path& path);
AsvScores GroupAsv(const std::vector<AsvEntry>& entries);

struct ConditionResult {
  std::size_t bonafide = 0;
  std::size_t spoof = 0;
  std::optional<EerResult> eer;
  std::optional<TdcfResult> tdcf;
};

struct EvaluationReport {
  ConditionResult pooled;
  // Bona fide of the environment against spoofs of one (env, attack) cell.
  std::map<std::string, ConditionResult> per_condition;
  std::map<std::string, ConditionResult> per_attack;
  std::map<std::string, ConditionResult> per_environment;
  AsvOperatingPoint asv;
  bool asv_ideal = false;
  std::vector<DetPoint> det;

  std::string ToJson() const;
  void WriteDetCsv(const std::filesystem::path& path) const;
};

// Scores are keyed by TrialRecord::TrialId(). Without ASV scores the ASV
// system is taken as ideal (all rates zero). Throws ValidationError listing
// score ids absent from the keys.
EvaluationReport Evaluate(const std::vector<ScoreEntry>& cm, const replay::TrialManifest& keys,
                          const std::optional<AsvScores>& asv, const TdcfParams& params);

}  // namespace spoofsim::metrics

#endif  // SPOOFSIM_METRICS_H_
