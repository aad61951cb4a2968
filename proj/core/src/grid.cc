#include <spdlog/spdlog.h>

#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include <json.hpp>

#include "spoofsim/errors.h"
#include "spoofsim/replay.h"

namespace spoofsim::replay {
namespace {

using nlohmann::json;

json Number(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
}

// Records sharing one room: same utterance, same environment.
struct Group {
  std::vector<std::size_t> records;
};

struct GroupResult {
  std::size_t written = 0;
  bool missing = false;
  std::vector<std::string> failures;
  std::vector<std::string> spoof_cells;
  std::size_t bonafide = 0;
  bool has_room = false;
  double target_t60 = 0.0;
  std::optional<double> measured_t60;
};

class DevicePools {
 public:
  DevicePools(std::uint64_t master_seed, int work_rate, int pool_size)
      : master_seed_(master_seed), work_rate_(work_rate), pool_size_(pool_size) {
    if (pool_size < 1) throw ArgumentError("device pool size must be positive");
  }

  // Builds the pools for the quality classes present, in class order.
  void Prepare(const std::set<device::Quality>& classes) {
    for (device::Quality q : classes) {
      auto& pool = pools_[q];
      if (!pool.empty()) continue;
      if (q == device::Quality::kPerfect) {
        pool.push_back(device::DeviceModel::Perfect(work_rate_));
        continue;
      }
      for (int i = 0; i < pool_size_; ++i) {
        Rng rng(DeriveSeed(master_seed_, "device|" + std::string(device::ToString(q)) + "|" +
                                             std::to_string(i)));
        pool.push_back(device::SynthesizeDevice(q, rng, {work_rate_, 100}));
      }
    }
  }

  const device::DeviceModel& Pick(device::Quality q, std::uint64_t record_seed) const {
    const auto& pool = pools_.at(q);
    return pool[DeriveSeed(record_seed, "device") % pool.size()];
  }

  std::vector<DeviceSummary> Summaries() const {
    std::vector<DeviceSummary> out;
    for (const auto& [q, pool] : pools_) {
      for (const auto& d : pool) out.push_back({d.name, q, device::MeasureDevice(d)});
    }
    return out;
  }

 private:
  std::uint64_t master_seed_;
  int work_rate_;
  int pool_size_;
  std::map<device::Quality, std::vector<device::DeviceModel>> pools_;
};

GroupResult RunGroup(const std::filesystem::path& corpus_dir, const TrialManifest& manifest,
                     const Group& group, const std::filesystem::path& out_dir,
                     std::uint64_t master_seed, const GridOptions& options,
                     const DevicePools& devices) {
  GroupResult result;
  const TrialRecord& first = manifest.records[group.records.front()];
  const auto source = ResolveSource(corpus_dir, first);
  if (!source) {
    result.missing = true;
    return result;
  }
  auto fail = [&](const TrialRecord& r, const std::string& why) {
    result.failures.push_back(r.TrialId() + ": " + why);
  };

  Waveform speech;
  try {
    speech = ReadWav(*source);
    speech = Resample(speech, options.work_rate);
  } catch (const Error& e) {
    for (std::size_t i : group.records) fail(manifest.records[i], e.what());
    return result;
  }

  auto write = [&](const TrialRecord& r, const Waveform& w) {
    WriteWav(out_dir / OutputName(manifest.partition, r), w);
    ++result.written;
  };

  if (!first.env) {
    // No environment: the source passes through unchanged at 16 kHz.
    for (std::size_t i : group.records) {
      const TrialRecord& r = manifest.records[i];
      if (r.attack) {
        fail(r, "replay needs an environment");
        continue;
      }
      try {
        write(r, Resample(speech, kOutputRate));
      } catch (const Error& e) {
        fail(r, e.what());
      }
    }
    return result;
  }

  std::vector<room::Category> zones;
  for (std::size_t i : group.records) {
    const auto& a = manifest.records[i].attack;
    if (a && std::find(zones.begin(), zones.end(), a->distance) == zones.end()) {
      zones.push_back(a->distance);
    }
  }
  std::sort(zones.begin(), zones.end());

  const std::string env_text = first.env->ToString();
  room::RoomInstance room;
  try {
    // Prefer a room that hosts every zone so that the geometry does not depend
    // on which attacks the manifest lists.
    const std::uint64_t room_seed = DeriveSeed(master_seed, "room|" + first.utt_id + "|" + env_text);
    try {
      room = SampleRecordRoom(*first.env, {0, 1, 2}, room_seed);
    } catch (const InfeasibleError&) {
      room = SampleRecordRoom(*first.env, zones, room_seed);
    }
  } catch (const Error& e) {
    for (std::size_t i : group.records) fail(manifest.records[i], e.what());
    return result;
  }
  result.has_room = true;
  result.target_t60 = room.t60_target;

  for (std::size_t i : group.records) {
    const TrialRecord& r = manifest.records[i];
    try {
      if (!r.attack) {
        ImpulseResponse rir;
        write(r, SimulateBonafide(speech, room, options.work_rate, &rir));
        ++result.bonafide;
        try {
          result.measured_t60 = room::MeasureT60(rir);
        } catch (const InsufficientDecayError&) {
        }
        continue;
      }
      room::RoomInstance attacked = room;
      Rng rng(r.seed);
      room::PlaceAttacker(attacked, r.attack->distance, rng);
      const auto& device = devices.Pick(r.attack->DeviceQuality(), r.seed);
      write(r, SimulateReplay(speech, attacked, *r.attack, device, options.work_rate));
      result.spoof_cells.push_back(env_text + "_" + r.attack->ToString());
    } catch (const Error& e) {
      fail(r, e.what());
    }
  }
  return result;
}

}  // namespace

std::string OutputName(Partition partition, const TrialRecord& r) {
  return std::string(ToString(partition)) + "_" + r.TrialId() + ".wav";
}

std::optional<std::filesystem::path> ResolveSource(const std::filesystem::path& corpus,
                                                   const TrialRecord& r) {
  for (auto candidate : {corpus / (r.utt_id + ".wav"), corpus / r.speaker_id / (r.utt_id + ".wav")}) {
    if (std::filesystem::is_regular_file(candidate)) return candidate;
  }
  return std::nullopt;
}

std::string RunReport::ToJson() const {
  json j;
  j["partition"] = partition;
  j["records"] = records;
  j["written"] = written;
  j["missing"] = missing;
  j["failures"] = failures;
  json cond = json::object();
  for (const auto& [k, v] : conditions) cond[k] = {{"count", v.count}};
  j["conditions"] = cond;
  j["condition_cells"] = conditions.size();
  j["bonafide_per_environment"] = bonafide_per_environment;
  json envs = json::object();
  for (const auto& [k, v] : environments) {
    json e = {{"rooms", v.rooms}, {"measured", v.measured}};
    e["mean_target_t60"] = v.rooms ? json(v.target_t60_sum / v.rooms) : json(nullptr);
    e["mean_measured_t60"] =
        v.measured ? json(v.measured_t60_sum / v.measured) : json(nullptr);
    envs[k] = e;
  }
  j["environments"] = envs;
  json devs = json::array();
  for (const auto& d : devices) {
    devs.push_back({{"name", d.name},
                    {"quality", device::ToString(d.quality)},
                    {"ob_hz", Number(d.measurement.ob_hz)},
                    {"minf_hz", Number(d.measurement.minf_hz)},
                    {"lnlr_db", Number(d.measurement.lnlr_db)}});
  }
  j["devices"] = devs;
  j["ok"] = ok();
  return j.dump(2);
}

RunReport RunGrid(const std::filesystem::path& corpus_dir, const TrialManifest& manifest,
                  const std::filesystem::path& out_dir, std::uint64_t master_seed,
                  const GridOptions& options) {
  RunReport report;
  report.partition = std::string(ToString(manifest.partition));
  report.records = manifest.records.size();
  if (manifest.records.empty()) return report;
  if (options.work_rate < kOutputRate) throw ArgumentError("work rate below 16000 Hz");

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

  // Groups in order of first appearance.
  std::vector<Group> groups;
  std::map<std::pair<std::string, std::string>, std::size_t> index;
  std::set<device::Quality> classes;
  for (std::size_t i = 0; i < manifest.records.size(); ++i) {
    const auto& r = manifest.records[i];
    auto [it, inserted] = index.try_emplace({r.utt_id, r.EnvString()}, groups.size());
    if (inserted) groups.emplace_back();
    groups[it->second].records.push_back(i);
    if (r.attack) classes.insert(r.attack->DeviceQuality());
  }

  DevicePools devices(master_seed, options.work_rate, options.device_pool_size);
  devices.Prepare(classes);

  std::vector<GroupResult> results(groups.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t g; (g = next.fetch_add(1)) < groups.size();) {
      results[g] = RunGroup(corpus_dir, manifest, groups[g], out_dir, master_seed, options,
                            devices);
    }
  };
  const int jobs = std::max(1, std::min<int>(options.jobs, static_cast<int>(groups.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (int t = 0; t < jobs; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }

  std::set<std::string> missing;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const GroupResult& res = results[g];
    const TrialRecord& first = manifest.records[groups[g].records.front()];
    if (res.missing) missing.insert(first.utt_id);
    report.written += res.written;
    report.failures.insert(report.failures.end(), res.failures.begin(), res.failures.end());
    for (const auto& cell : res.spoof_cells) ++report.conditions[cell].count;
    if (res.bonafide) report.bonafide_per_environment[first.EnvString()] += res.bonafide;
    if (res.has_room) {
      auto& env = report.environments[first.EnvString()];
      ++env.rooms;
      env.target_t60_sum += res.target_t60;
      if (res.measured_t60) {
        ++env.measured;
        env.measured_t60_sum += *res.measured_t60;
      }
    }
  }
  report.missing.assign(missing.begin(), missing.end());
  for (const auto& utt : report.missing) spdlog::error("missing source for {}", utt);
  report.devices = devices.Summaries();
  return report;
}

}  // namespace spoofsim::replay
