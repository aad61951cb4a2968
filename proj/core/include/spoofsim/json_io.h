#ifndef SPOOFSIM_JSON_IO_H_
#define SPOOFSIM_JSON_IO_H_

#include <filesystem>
#include <string>

#include "spoofsim/device.h"
#include "spoofsim/signal.h"

namespace spoofsim {

// Infinite values are written as the strings "inf" / "-inf".

// {"name", "sample_rate", "branches": [[...], ... x5]}
std::string DeviceToJson(const device::DeviceModel& d);
device::DeviceModel DeviceFromJson(const std::string& text);
void SaveDevice(const std::filesystem::path& path, const device::DeviceModel& d);
device::DeviceModel LoadDevice(const std::filesystem::path& path);

// {"ob_hz", "minf_hz", "lnlr_db", "class"}
std::string MeasurementToJson(const device::DeviceMeasurement& m);

// {"sample_rate", "taps": [...]}
std::string ImpulseResponseToJson(const ImpulseResponse& ir);
ImpulseResponse ImpulseResponseFromJson(const std::string& text);

std::string ReadTextFile(const std::filesystem::path& path);
void WriteTextFile(const std::filesystem::path& path, const std::string& text);

}  // namespace spoofsim

#endif  // SPOOFSIM_JSON_IO_H_
