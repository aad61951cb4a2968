#ifndef SPOOFSIM_REPLAY_H_
#define SPOOFSIM_REPLAY_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spoofsim/device.h"
#include "spoofsim/room.h"
#include "spoofsim/signal.h"

namespace spoofsim::replay {

inline constexpr int kDefaultWorkRate = 96000;
inline constexpr int kOutputRate = 16000;

// Replay configuration: attacker-to-talker distance zone and device quality,
// each A/B/C.
struct AttackLabel {
  room::Category distance = 0;
  room::Category quality = 0;

  std::string ToString() const;
  static AttackLabel Parse(std::string_view text);
  // AA, AB, AC, BA, ..., CC.
  static std::vector<AttackLabel> All();
  device::Quality DeviceQuality() const;

  auto operator<=>(const AttackLabel&) const = default;
};

enum class Key { kBonafide, kSpoof };
enum class Partition { kTrain, kDev, kEval };

std::string_view ToString(Key k);
Key ParseKey(std::string_view text);
std::string_view ToString(Partition p);
Partition ParsePartition(std::string_view text);

struct TrialRecord {
  std::string speaker_id;
  std::string utt_id;
  std::optional<room::EnvironmentLabel> env;
  std::optional<AttackLabel> attack;
  Key key = Key::kBonafide;
  std::uint64_t seed = 0;

  // "<utt>_<env>_<attack>" with "-" for absent fields; the id used by score
  // files.
  std::string TrialId() const;
  std::string EnvString() const;
  std::string AttackString() const;
};

// Seed of a record: a function of the master seed, utterance, environment and
// attack only.
std::uint64_t RecordSeed(std::uint64_t master_seed, std::string_view utt_id,
                         std::string_view env, std::string_view attack);

struct TrialManifest {
  Partition partition = Partition::kTrain;
  std::vector<TrialRecord> records;
};

struct SpeakerUtterances {
  std::string speaker_id;
  std::vector<std::string> utt_ids;
};

// Speaker list with utts_per_speaker generated ids "<speaker>_<nnnn>".
std::vector<SpeakerUtterances> MakeSpeakerList(const std::vector<std::string>& speaker_ids,
                                               int utts_per_speaker);

// Per environment: one bona fide record per utterance and one spoof record
// per (utterance, attack), ordered by (env, speaker, utt, attack) with the
// bona fide record first. Throws ValidationError on duplicate ids.
TrialManifest GenerateProtocol(const std::vector<SpeakerUtterances>& speakers,
                               Partition partition,
                               const std::vector<room::EnvironmentLabel>& envs,
                               const std::vector<AttackLabel>& attacks,
                               std::uint64_t master_seed);

// Text form: one "SPEAKER_ID UTT_ID ENV ATTACK KEY" line per record.
std::string FormatManifest(const TrialManifest& m);
TrialManifest ParseManifest(std::string_view text, Partition partition,
                            std::uint64_t master_seed);
void WriteManifest(const std::filesystem::path& path, const TrialManifest& m);
TrialManifest ReadManifest(const std::filesystem::path& path, Partition partition,
                           std::uint64_t master_seed);

// Talker -> microphone through a cardioid pointed at the talker, resampled
// to 16 kHz. Peak-normalized to -1 dBFS only if it would clip. The room
// response used is stored in `rir` when given.
Waveform SimulateBonafide(const Waveform& w, const room::RoomInstance& room,
                          int work_rate, ImpulseResponse* rir = nullptr);

// Talker -> attacker (omni) -> recording gain restoring the source peak ->
// loudspeaker -> replay position -> microphone (cardioid), resampled to
// 16 kHz. Throws ArgumentError when the device class does not match the attack
// or the room has no attacker.
Waveform SimulateReplay(const Waveform& w, const room::RoomInstance& room,
                        const AttackLabel& attack, const device::DeviceModel& device,
                        int work_rate);

// Draws the room shared by all records of one (utterance, environment) pair.
// The geometry admits an attacker in every zone listed in `zones`.
room::RoomInstance SampleRecordRoom(const room::EnvironmentLabel& env,
                                    const std::vector<room::Category>& zones,
                                    std::uint64_t seed);

struct GridOptions {
  int work_rate = kDefaultWorkRate;
  int jobs = 1;
  // Devices per quality class; each spoof record draws one by seed.
  int device_pool_size = 8;
};

struct ConditionStats {
  std::size_t count = 0;
};

struct EnvironmentStats {
  std::size_t rooms = 0;
  double target_t60_sum = 0.0;
  double measured_t60_sum = 0.0;
  std::size_t measured = 0;
};

struct DeviceSummary {
  std::string name;
  device::Quality quality = device::Quality::kPerfect;
  device::DeviceMeasurement measurement;
};

struct RunReport {
  std::string partition;
  std::size_t records = 0;
  std::size_t written = 0;
  std::vector<std::string> missing;   // utterance ids without a source file
  std::vector<std::string> failures;  // "<trial id>: <reason>"
  // Spoof cells keyed "<env>_<attack>".
  std::map<std::string, ConditionStats> conditions;
  std::map<std::string, std::size_t> bonafide_per_environment;
  std::map<std::string, EnvironmentStats> environments;
  std::vector<DeviceSummary> devices;

  bool ok() const { return missing.empty() && failures.empty(); }
  std::string ToJson() const;
};

// Output file name "<partition>_<utt>_<env>_<attack>.wav".
std::string OutputName(Partition partition, const TrialRecord& r);

// Resolves "<corpus>/<utt>.wav" or "<corpus>/<speaker>/<utt>.wav".
std::optional<std::filesystem::path> ResolveSource(const std::filesystem::path& corpus,
                                                   const TrialRecord& r);

// Simulates every record into out_dir. Pure function of (corpus, manifest,
// master seed, options.work_rate, options.device_pool_size).
RunReport RunGrid(const std::filesystem::path& corpus_dir, const TrialManifest& manifest,
                  const std::filesystem::path& out_dir, std::uint64_t master_seed,
                  const GridOptions& options = {});

// Speech-shaped synthetic utterances: glottal pulse trains through formant
// resonators, interleaved with fricative noise and pauses. Speaker identity
// sets the pitch range and vocal tract scale.
struct SyntheticVoice {
  double f0_hz = 120.0;
  double formant_scale = 1.0;
  double breathiness = 0.05;
};

SyntheticVoice DrawVoice(Rng& rng);
Waveform SynthesizeUtterance(const SyntheticVoice& voice, double seconds, int sample_rate,
                             Rng& rng);

// Writes speakers x utts synthetic WAVs "<corpus>/<utt>.wav" and returns the
// speaker list.
std::vector<SpeakerUtterances> WriteSyntheticCorpus(const std::filesystem::path& corpus_dir,
                                                    int speakers, int utts_per_speaker,
                                                    double seconds, int sample_rate,
                                                    std::uint64_t seed,
                                                    const std::string& speaker_prefix = "SPK");

}  // namespace spoofsim::replay

#endif  // SPOOFSIM_REPLAY_H_
