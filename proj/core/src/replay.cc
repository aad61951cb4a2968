#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>

#include "spoofsim/errors.h"
#include "spoofsim/replay.h"

namespace spoofsim::replay {
namespace {

constexpr double kNormalizedPeak = 0.8912509381337456;  // -1 dBFS

double Peak(const std::vector<double>& x) {
  double peak = 0.0;
  for (double v : x) peak = std::max(peak, std::abs(v));
  return peak;
}

Waveform AtRate(const Waveform& w, int rate) {
  return w.sample_rate == rate ? w : Resample(w, rate);
}

Waveform FinishOutput(Waveform w) {
  Waveform out = AtRate(w, kOutputRate);
  const double peak = Peak(out.samples);
  if (peak > 1.0) {
    const double g = kNormalizedPeak / peak;
    for (double& v : out.samples) v *= g;
  }
  return out;
}

void CheckWorkRate(int work_rate) {
  if (work_rate < kOutputRate) {
    throw ArgumentError("work rate " + std::to_string(work_rate) + " below 16000 Hz");
  }
}

}  // namespace

Waveform SimulateBonafide(const Waveform& w, const room::RoomInstance& room,
                          int work_rate, ImpulseResponse* rir) {
  CheckWorkRate(work_rate);
  w.Validate();
  const Waveform x = AtRate(w, work_rate);
  auto h = room::SimulateRir(room, room.talker, room.mic, room::Directivity::kCardioid,
                             room.talker - room.mic, work_rate);
  Waveform out = FinishOutput(Convolve(x, h));
  if (rir) *rir = std::move(h);
  return out;
}

Waveform SimulateReplay(const Waveform& w, const room::RoomInstance& room,
                        const AttackLabel& attack, const device::DeviceModel& device,
                        int work_rate) {
  CheckWorkRate(work_rate);
  w.Validate();
  if (!room.attacker) throw ArgumentError("room has no attacker position");
  const device::Quality expected = attack.DeviceQuality();
  if (expected == device::Quality::kPerfect ? !device.IsPerfect()
                                            : device.IsPerfect()) {
    throw ArgumentError("device " + device.name + " does not match attack " +
                        attack.ToString());
  }
  if (device.sample_rate != work_rate) {
    throw ArgumentError("device rate " + std::to_string(device.sample_rate) +
                        " differs from work rate " + std::to_string(work_rate));
  }
  const double talker_distance = room::Distance(*room.attacker, room.talker);
  if (!room::AttackerDistance(attack.distance).Contains(talker_distance)) {
    spdlog::warn("attacker at {:.3f} m lies outside zone {}", talker_distance,
                 static_cast<char>('A' + attack.distance));
  }

  const Waveform x = AtRate(w, work_rate);
  const auto capture =
      room::SimulateRir(room, room.talker, *room.attacker, room::Directivity::kOmnidirectional,
                        {1.0, 0.0, 0.0}, work_rate);
  Waveform recorded = Convolve(x, capture);
  // The attacker's recorder sets its gain so the capture peaks where the
  // source did.
  const double source_peak = Peak(x.samples);
  const double recorded_peak = Peak(recorded.samples);
  if (recorded_peak > 0.0) {
    const double g = source_peak / recorded_peak;
    for (double& v : recorded.samples) v *= g;
  }
  const Waveform played = device::ApplyDevice(recorded, device);
  const auto presentation =
      room::SimulateRir(room, room.ReplaySource(), room.mic, room::Directivity::kCardioid,
                        room.talker - room.mic, work_rate);
  return FinishOutput(Convolve(played, presentation));
}

room::RoomInstance SampleRecordRoom(const room::EnvironmentLabel& env,
                                    const std::vector<room::Category>& zones,
                                    std::uint64_t seed) {
  Rng rng(seed);
  for (int attempt = 0; attempt < room::kMaxRoomRetries; ++attempt) {
    room::RoomInstance r = room::SampleEnvironment(env, std::nullopt, rng);
    bool feasible = true;
    for (room::Category da : zones) {
      room::RoomInstance probe = r;
      try {
        room::PlaceAttacker(probe, da, rng);
      } catch (const InfeasibleError&) {
        feasible = false;
        break;
      }
    }
    if (feasible) return r;
  }
  throw InfeasibleError("no room for environment " + env.ToString() +
                        " admits every attacker zone");
}

}  // namespace spoofsim::replay
