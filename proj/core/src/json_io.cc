#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "spoofsim/errors.h"
#include "spoofsim/json_io.h"

namespace spoofsim {
namespace {

using nlohmann::json;

json Number(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
}

json Parse(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string(what) + ": " + e.what());
  }
}

std::vector<double> Taps(const json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw FormatError(std::string(what) + ": taps must be a nonempty array");
  std::vector<double> taps;
  for (const auto& v : j) {
    if (!v.is_number()) throw FormatError(std::string(what) + ": non-numeric tap");
    taps.push_back(v.get<double>());
  }
  return taps;
}

int Rate(const json& j, const char* what) {
  if (!j.contains("sample_rate") || !j["sample_rate"].is_number_integer()) {
    throw FormatError(std::string(what) + ": missing integer sample_rate");
  }
  return j["sample_rate"].get<int>();
}

}  // namespace

std::string DeviceToJson(const device::DeviceModel& d) {
  json j;
  j["name"] = d.name;
  j["sample_rate"] = d.sample_rate;
  j["branches"] = json::array();
  for (const auto& b : d.branches) j["branches"].push_back(b.taps);
  return j.dump();
}

device::DeviceModel DeviceFromJson(const std::string& text) {
  const json j = Parse(text, "device");
  device::DeviceModel d;
  d.name = j.value("name", "");
  d.sample_rate = Rate(j, "device");
  if (!j.contains("branches") || !j["branches"].is_array() ||
      j["branches"].size() != device::kBranches) {
    throw FormatError("device: expected 5 branches");
  }
  for (int n = 0; n < device::kBranches; ++n) {
    d.branches[n] = {Taps(j["branches"][n], "device"), d.sample_rate};
  }
  try {
    d.Validate();
  } catch (const ArgumentError& e) {
    throw ValidationError(std::string("device: ") + e.what());
  }
  return d;
}

void SaveDevice(const std::filesystem::path& path, const device::DeviceModel& d) {
  WriteTextFile(path, DeviceToJson(d));
}

device::DeviceModel LoadDevice(const std::filesystem::path& path) {
  return DeviceFromJson(ReadTextFile(path));
}

std::string MeasurementToJson(const device::DeviceMeasurement& m) {
  json j;
  j["ob_hz"] = Number(m.ob_hz);
  j["minf_hz"] = Number(m.minf_hz);
  j["lnlr_db"] = Number(m.lnlr_db);
  j["class"] = device::ToString(device::ClassifyDevice(m));
  return j.dump(2);
}

std::string ImpulseResponseToJson(const ImpulseResponse& ir) {
  json j;
  j["sample_rate"] = ir.sample_rate;
  j["taps"] = ir.taps;
  return j.dump();
}

ImpulseResponse ImpulseResponseFromJson(const std::string& text) {
  const json j = Parse(text, "impulse response");
  if (!j.contains("taps")) throw FormatError("impulse response: missing taps");
  ImpulseResponse ir{Taps(j["taps"], "impulse response"), Rate(j, "impulse response")};
  ir.Validate();
  return ir;
}

std::string ReadTextFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void WriteTextFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace spoofsim
