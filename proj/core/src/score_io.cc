#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "spoofsim/errors.h"
#include "spoofsim/metrics.h"

namespace spoofsim::metrics {
namespace {

double ParseScore(const std::string& text, const std::filesystem::path& path, int line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || !std::isfinite(v)) {
    throw FormatError(fmt::format("{}:{}: bad score '{}'", path.string(), line, text));
  }
  return v;
}

}  // namespace

std::vector<ScoreEntry> ReadScores(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<ScoreEntry> out;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    std::istringstream f(line);
    std::string id, score, extra;
    if (!(f >> id)) continue;
    if (!(f >> score) || (f >> extra)) {
      throw FormatError(fmt::format("{}:{}: expected ID SCORE", path.string(), n));
    }
    out.push_back({id, ParseScore(score, path, n)});
  }
  return out;
}

void WriteScores(const std::filesystem::path& path, const std::vector<ScoreEntry>& scores) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& s : scores) out << fmt::format("{} {:.6f}\n", s.id, s.score);
  if (!out) throw IoError("write failed for " + path.string());
}

std::vector<AsvEntry> ReadAsvScores(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<AsvEntry> out;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    std::istringstream f(line);
    std::string id, score, type, extra;
    if (!(f >> id)) continue;
    if (!(f >> score >> type) || (f >> extra)) {
      throw FormatError(fmt::format("{}:{}: expected ID SCORE TRIAL_TYPE", path.string(), n));
    }
    AsvEntry e{id, ParseScore(score, path, n), TrialType::kTarget};
    if (type == "target") e.type = TrialType::kTarget;
    else if (type == "nontarget") e.type = TrialType::kNontarget;
    else if (type == "spoof") e.type = TrialType::kSpoof;
    else throw FormatError(fmt::format("{}:{}: unknown trial type '{}'", path.string(), n, type));
    out.push_back(std::move(e));
  }
  return out;
}

AsvScores GroupAsv(const std::vector<AsvEntry>& entries) {
  AsvScores s;
  for (const auto& e : entries) {
    switch (e.type) {
      case TrialType::kTarget:
        s.targets.push_back(e.score);
        break;
      case TrialType::kNontarget:
        s.nontargets.push_back(e.score);
        break;
      case TrialType::kSpoof:
        s.spoofs.push_back(e.score);
        break;
    }
  }
  return s;
}

}  // namespace spoofsim::metrics
