#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

#include "spoofsim/errors.h"
#include "spoofsim/metrics.h"

namespace spoofsim::metrics {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void CheckScores(const std::vector<double>& v, const char* what) {
  if (v.empty()) throw ArgumentError(std::string("no ") + what + " scores");
  for (double s : v) {
    if (!std::isfinite(s)) throw ArgumentError(std::string("non-finite ") + what + " score");
  }
}

// Miss / false-alarm rates at every distinct score and at +inf.
struct Sweep {
  std::vector<double> thresholds;
  std::vector<double> p_miss;
  std::vector<double> p_fa;
};

Sweep RateSweep(const ScoreSet& s) {
  CheckScores(s.positives, "positive");
  CheckScores(s.negatives, "negative");
  std::vector<double> pos = s.positives, neg = s.negatives;
  std::sort(pos.begin(), pos.end());
  std::sort(neg.begin(), neg.end());
  Sweep sw;
  std::merge(pos.begin(), pos.end(), neg.begin(), neg.end(), std::back_inserter(sw.thresholds));
  sw.thresholds.erase(std::unique(sw.thresholds.begin(), sw.thresholds.end()),
                      sw.thresholds.end());
  sw.thresholds.push_back(kInf);
  const double np = pos.size(), nn = neg.size();
  for (double t : sw.thresholds) {
    const auto miss = std::lower_bound(pos.begin(), pos.end(), t) - pos.begin();
    const auto rejected = std::lower_bound(neg.begin(), neg.end(), t) - neg.begin();
    sw.p_miss.push_back(miss / np);
    sw.p_fa.push_back((nn - rejected) / nn);
  }
  return sw;
}

nlohmann::json Number(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
}

nlohmann::json ToJson(const ConditionResult& c) {
  nlohmann::json j = {{"bonafide", c.bonafide}, {"spoof", c.spoof}};
  j["eer"] = c.eer ? Number(c.eer->eer) : nlohmann::json(nullptr);
  j["eer_threshold"] = c.eer ? Number(c.eer->threshold) : nlohmann::json(nullptr);
  j["min_tdcf"] = c.tdcf ? Number(c.tdcf->min_tdcf) : nlohmann::json(nullptr);
  j["tdcf_threshold"] = c.tdcf ? Number(c.tdcf->threshold) : nlohmann::json(nullptr);
  return j;
}

}  // namespace

EerResult ComputeEer(const ScoreSet& s) {
  const Sweep sw = RateSweep(s);
  for (std::size_t i = 0; i < sw.thresholds.size(); ++i) {
    const double d = sw.p_miss[i] - sw.p_fa[i];
    if (d < 0.0) continue;
    if (i == 0 || d == 0.0) return {sw.p_miss[i], sw.thresholds[i]};
    const double d_prev = sw.p_miss[i - 1] - sw.p_fa[i - 1];
    const double a = d_prev / (d_prev - d);
    const double eer = sw.p_miss[i - 1] + a * (sw.p_miss[i] - sw.p_miss[i - 1]);
    const double t0 = sw.thresholds[i - 1], t1 = sw.thresholds[i];
    return {eer, std::isfinite(t1) ? t0 + a * (t1 - t0) : t0};
  }
  // Unreachable: at +inf the miss rate is 1 and the false-alarm rate 0.
  return {sw.p_miss.back(), sw.thresholds.back()};
}

EerResult ComputeEerRocch(const ScoreSet& s) {
  const Sweep sw = RateSweep(s);
  // Points ordered by increasing false-alarm rate (decreasing threshold).
  struct P {
    double fa, miss, t;
  };
  std::vector<P> pts;
  for (std::size_t i = sw.thresholds.size(); i-- > 0;) {
    pts.push_back({sw.p_fa[i], sw.p_miss[i], sw.thresholds[i]});
  }
  // Lower convex hull in the (fa, miss) plane.
  std::vector<P> hull;
  for (const P& p : pts) {
    while (hull.size() >= 2) {
      const P& a = hull[hull.size() - 2];
      const P& b = hull.back();
      const double cross = (b.fa - a.fa) * (p.miss - a.miss) - (b.miss - a.miss) * (p.fa - a.fa);
      if (cross > 0.0) break;
      hull.pop_back();
    }
    hull.push_back(p);
  }
  for (std::size_t i = 1; i < hull.size(); ++i) {
    const P& a = hull[i - 1];
    const P& b = hull[i];
    const double da = a.miss - a.fa, db = b.miss - b.fa;
    if (da >= 0.0 && db <= 0.0) {
      if (da == db) return {a.miss, a.t};
      const double k = da / (da - db);
      const double eer = a.miss + k * (b.miss - a.miss);
      return {eer, k < 0.5 ? a.t : b.t};
    }
  }
  return {hull.front().miss, hull.front().t};
}

std::vector<DetPoint> DetPoints(const ScoreSet& s) {
  const Sweep sw = RateSweep(s);
  std::vector<DetPoint> out;
  for (std::size_t i = 0; i < sw.thresholds.size(); ++i) {
    out.push_back({sw.p_miss[i], sw.p_fa[i], sw.thresholds[i]});
  }
  return out;
}

AsvOperatingPoint AsvRates(const AsvScores& asv, std::optional<double> threshold) {
  CheckScores(asv.targets, "target");
  CheckScores(asv.nontargets, "non-target");
  CheckScores(asv.spoofs, "spoof");
  const double t = threshold ? *threshold : ComputeEer({asv.targets, asv.nontargets}).threshold;
  auto below = [t](const std::vector<double>& v) {
    return static_cast<double>(std::count_if(v.begin(), v.end(), [t](double s) { return s < t; })) /
           v.size();
  };
  return {below(asv.targets), 1.0 - below(asv.nontargets), below(asv.spoofs), t};
}

TdcfResult MinTdcf(const ScoreSet& cm, const AsvOperatingPoint& asv, const TdcfParams& p) {
  p.Validate();
  for (double r : {asv.p_miss, asv.p_fa, asv.p_miss_spoof}) {
    if (!(r >= 0.0 && r <= 1.0)) throw ArgumentError("ASV rate outside [0, 1]");
  }
  TdcfResult r;
  r.c1 = p.prior_target * (p.cost_miss_cm - p.cost_miss_asv * asv.p_miss) -
         p.prior_nontarget * p.cost_fa_asv * asv.p_fa;
  r.c2 = p.cost_fa_cm * p.prior_spoof * (1.0 - asv.p_miss_spoof);
  if (!(r.c1 > 0.0)) {
    throw DegenerateCostError(fmt::format(
        "t-DCF constant C1 = {} is not positive (check cost_miss_cm, cost_miss_asv, "
        "cost_fa_asv and the ASV error rates)",
        r.c1));
  }
  if (!(r.c2 > 0.0)) {
    throw DegenerateCostError(fmt::format(
        "t-DCF constant C2 = {} is not positive (check cost_fa_cm, prior_spoof and the ASV "
        "spoof miss rate)",
        r.c2));
  }
  const Sweep sw = RateSweep(cm);
  const double norm = std::min(r.c1, r.c2);
  r.min_tdcf = kInf;
  for (std::size_t i = 0; i < sw.thresholds.size(); ++i) {
    const double v = (r.c1 * sw.p_miss[i] + r.c2 * sw.p_fa[i]) / norm;
    if (v < r.min_tdcf) {
      r.min_tdcf = v;
      r.threshold = sw.thresholds[i];
    }
  }
  return r;
}

EvaluationReport Evaluate(const std::vector<ScoreEntry>& cm, const replay::TrialManifest& keys,
                          const std::optional<AsvScores>& asv, const TdcfParams& params) {
  std::map<std::string, const replay::TrialRecord*> by_id;
  for (const auto& r : keys.records) by_id.emplace(r.TrialId(), &r);
  std::vector<std::string> unknown;
  std::set<std::string> seen;
  for (const auto& e : cm) {
    if (!by_id.count(e.id)) unknown.push_back(e.id);
    if (!seen.insert(e.id).second) throw ValidationError("duplicate score id " + e.id);
  }
  if (!unknown.empty()) {
    std::string msg = "scores without keys:";
    for (const auto& id : unknown) msg += " " + id;
    throw ValidationError(msg);
  }

  EvaluationReport report;
  if (asv) {
    report.asv = AsvRates(*asv);
  } else {
    report.asv_ideal = true;
  }

  // Bona fide scores per environment, spoof scores per cell.
  ScoreSet pooled;
  std::map<std::string, std::vector<double>> bona_env, spoof_cell, spoof_attack, spoof_env;
  std::vector<double> spoof_all;
  for (const auto& e : cm) {
    const auto& r = *by_id.at(e.id);
    const std::string env = r.EnvString();
    if (r.key == replay::Key::kBonafide) {
      pooled.positives.push_back(e.score);
      bona_env[env].push_back(e.score);
    } else {
      pooled.negatives.push_back(e.score);
      spoof_cell[env + "_" + r.AttackString()].push_back(e.score);
      spoof_attack[r.AttackString()].push_back(e.score);
      spoof_env[env].push_back(e.score);
    }
  }

  auto evaluate = [&](const std::vector<double>& pos, const std::vector<double>& neg) {
    ConditionResult c;
    c.bonafide = pos.size();
    c.spoof = neg.size();
    if (!pos.empty() && !neg.empty()) {
      c.eer = ComputeEer({pos, neg});
      c.tdcf = MinTdcf({pos, neg}, report.asv, params);
    }
    return c;
  };

  report.pooled = evaluate(pooled.positives, pooled.negatives);
  if (!pooled.positives.empty() && !pooled.negatives.empty()) report.det = DetPoints(pooled);
  for (const auto& [cell, neg] : spoof_cell) {
    const std::string env = cell.substr(0, cell.rfind('_'));
    report.per_condition[cell] = evaluate(bona_env[env], neg);
  }
  for (const auto& [attack, neg] : spoof_attack) {
    report.per_attack[attack] = evaluate(pooled.positives, neg);
  }
  for (const auto& [env, pos] : bona_env) {
    report.per_environment[env] = evaluate(pos, spoof_env[env]);
  }
  return report;
}

std::string EvaluationReport::ToJson() const {
  nlohmann::json j = metrics::ToJson(pooled);
  j["asv"] = {{"ideal", asv_ideal},
              {"p_miss", asv.p_miss},
              {"p_fa", asv.p_fa},
              {"p_miss_spoof", asv.p_miss_spoof},
              {"threshold", Number(asv.threshold)}};
  for (const auto& [name, group] :
       {std::pair{"per_condition", &per_condition}, std::pair{"per_attack", &per_attack},
        std::pair{"per_environment", &per_environment}}) {
    nlohmann::json g = nlohmann::json::object();
    for (const auto& [k, v] : *group) g[k] = metrics::ToJson(v);
    j[name] = g;
  }
  return j.dump(2);
}

void EvaluationReport::WriteDetCsv(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "threshold,p_miss,p_fa\n";
  for (const auto& p : det) {
    out << (std::isfinite(p.threshold) ? fmt::format("{:.9g}", p.threshold) : "inf") << ','
        << fmt::format("{:.9g},{:.9g}", p.p_miss, p.p_fa) << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace spoofsim::metrics
