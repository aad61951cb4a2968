#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "spoofsim/errors.h"
#include "spoofsim/replay.h"

namespace spoofsim::replay {

std::string AttackLabel::ToString() const {
  return {static_cast<char>('A' + distance), static_cast<char>('A' + quality)};
}

AttackLabel AttackLabel::Parse(std::string_view text) {
  if (text.size() != 2 || text[0] < 'A' || text[0] > 'C' || text[1] < 'A' ||
      text[1] > 'C') {
    throw ArgumentError("invalid attack label '" + std::string(text) + "'");
  }
  return {text[0] - 'A', text[1] - 'A'};
}

std::vector<AttackLabel> AttackLabel::All() {
  std::vector<AttackLabel> all;
  for (int da = 0; da < 3; ++da)
    for (int q = 0; q < 3; ++q) all.push_back({da, q});
  return all;
}

device::Quality AttackLabel::DeviceQuality() const {
  static constexpr device::Quality kByLetter[] = {
      device::Quality::kPerfect, device::Quality::kHigh, device::Quality::kLow};
  return kByLetter[quality];
}

std::string_view ToString(Key k) { return k == Key::kBonafide ? "bonafide" : "spoof"; }

Key ParseKey(std::string_view text) {
  if (text == "bonafide") return Key::kBonafide;
  if (text == "spoof") return Key::kSpoof;
  throw ArgumentError("invalid key '" + std::string(text) + "'");
}

std::string_view ToString(Partition p) {
  switch (p) {
    case Partition::kTrain:
      return "train";
    case Partition::kDev:
      return "dev";
    case Partition::kEval:
      return "eval";
  }
  return "train";
}

Partition ParsePartition(std::string_view text) {
  if (text == "train") return Partition::kTrain;
  if (text == "dev") return Partition::kDev;
  if (text == "eval") return Partition::kEval;
  throw ArgumentError("invalid partition '" + std::string(text) + "'");
}

std::string TrialRecord::EnvString() const { return env ? env->ToString() : "-"; }

std::string TrialRecord::AttackString() const {
  return attack ? attack->ToString() : "-";
}

std::string TrialRecord::TrialId() const {
  return utt_id + "_" + EnvString() + "_" + AttackString();
}

std::uint64_t RecordSeed(std::uint64_t master_seed, std::string_view utt_id,
                         std::string_view env, std::string_view attack) {
  std::string tag = "record|";
  tag.append(utt_id).append("|").append(env).append("|").append(attack);
  return DeriveSeed(master_seed, tag);
}

std::vector<SpeakerUtterances> MakeSpeakerList(const std::vector<std::string>& speaker_ids,
                                               int utts_per_speaker) {
  if (utts_per_speaker <= 0) throw ArgumentError("utterances per speaker must be positive");
  std::vector<SpeakerUtterances> out;
  for (const auto& spk : speaker_ids) {
    SpeakerUtterances s{spk, {}};
    for (int u = 1; u <= utts_per_speaker; ++u) {
      char buf[16];
      std::snprintf(buf, sizeof(buf), "_%04d", u);
      s.utt_ids.push_back(spk + buf);
    }
    out.push_back(std::move(s));
  }
  return out;
}

TrialManifest GenerateProtocol(const std::vector<SpeakerUtterances>& speakers,
                               Partition partition,
                               const std::vector<room::EnvironmentLabel>& envs,
                               const std::vector<AttackLabel>& attacks,
                               std::uint64_t master_seed) {
  if (speakers.empty()) throw ArgumentError("protocol needs at least one speaker");
  if (envs.empty()) throw ArgumentError("protocol needs at least one environment");
  std::set<std::string> speaker_ids, utt_ids;
  std::vector<std::string> duplicates;
  for (const auto& s : speakers) {
    if (!speaker_ids.insert(s.speaker_id).second) duplicates.push_back(s.speaker_id);
    if (s.utt_ids.empty()) {
      throw ArgumentError("speaker " + s.speaker_id + " has no utterances");
    }
    for (const auto& u : s.utt_ids) {
      if (!utt_ids.insert(u).second) duplicates.push_back(u);
    }
  }
  if (!duplicates.empty()) {
    std::string msg = "duplicate ids:";
    for (const auto& d : duplicates) msg += " " + d;
    throw ValidationError(msg);
  }

  TrialManifest m;
  m.partition = partition;
  m.records.reserve(envs.size() * utt_ids.size() * (attacks.size() + 1));
  for (const auto& env : envs) {
    const std::string env_text = env.ToString();
    for (const auto& s : speakers) {
      for (const auto& u : s.utt_ids) {
        TrialRecord bona{s.speaker_id, u, env, std::nullopt, Key::kBonafide,
                         RecordSeed(master_seed, u, env_text, "-")};
        m.records.push_back(std::move(bona));
        for (const auto& a : attacks) {
          const std::string attack_text = a.ToString();
          m.records.push_back({s.speaker_id, u, env, a, Key::kSpoof,
                               RecordSeed(master_seed, u, env_text, attack_text)});
        }
      }
    }
  }
  return m;
}

std::string FormatManifest(const TrialManifest& m) {
  std::string out;
  for (const auto& r : m.records) {
    out += r.speaker_id + " " + r.utt_id + " " + r.EnvString() + " " + r.AttackString() +
           " " + std::string(ToString(r.key)) + "\n";
  }
  return out;
}

TrialManifest ParseManifest(std::string_view text, Partition partition,
                            std::uint64_t master_seed) {
  TrialManifest m;
  m.partition = partition;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  std::set<std::string> trial_ids;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string spk, utt, env, attack, key, extra;
    if (!(fields >> spk)) continue;  // blank line
    if (!(fields >> utt >> env >> attack >> key) || (fields >> extra)) {
      throw FormatError("manifest line " + std::to_string(line_no) +
                        ": expected SPEAKER_ID UTT_ID ENV ATTACK KEY");
    }
    TrialRecord r;
    r.speaker_id = spk;
    r.utt_id = utt;
    try {
      if (env != "-") r.env = room::EnvironmentLabel::Parse(env);
      if (attack != "-") r.attack = AttackLabel::Parse(attack);
      r.key = ParseKey(key);
    } catch (const ArgumentError& e) {
      throw FormatError("manifest line " + std::to_string(line_no) + ": " + e.what());
    }
    if ((r.key == Key::kSpoof) != r.attack.has_value()) {
      throw ValidationError("manifest line " + std::to_string(line_no) +
                            ": key must be spoof exactly when an attack is given");
    }
    r.seed = RecordSeed(master_seed, utt, env, attack);
    if (!trial_ids.insert(r.TrialId()).second) {
      throw ValidationError("manifest line " + std::to_string(line_no) +
                            ": duplicate trial " + r.TrialId());
    }
    m.records.push_back(std::move(r));
  }
  return m;
}

void WriteManifest(const std::filesystem::path& path, const TrialManifest& m) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << FormatManifest(m);
  if (!out) throw IoError("write failed for " + path.string());
}

TrialManifest ReadManifest(const std::filesystem::path& path, Partition partition,
                           std::uint64_t master_seed) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseManifest(buf.str(), partition, master_seed);
}

}  // namespace spoofsim::replay
