#ifndef SPOOFSIM_DEVICE_H_
#define SPOOFSIM_DEVICE_H_

#include <array>
#include <limits>
#include <string>
#include <string_view>

#include "spoofsim/rng.h"
#include "spoofsim/signal.h"

namespace spoofsim::device {

// Hammerstein orders 1..5: branch 0 is linear, branches 1..4 act on x^2..x^5.
inline constexpr int kBranches = 5;
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Quality { kPerfect, kHigh, kLow, kIndeterminate };

std::string_view ToString(Quality q);
// Accepts perfect/high/low and the attack letters A/B/C.
Quality ParseQuality(std::string_view text);

// Class bounds on occupied bandwidth, its lower edge and the
// linear-to-nonlinear power ratio. All bounds are exclusive.
struct QualityClass {
  Quality label = Quality::kPerfect;
  double ob_bound_hz = kInfinity;
  double minf_bound_hz = 0.0;
  double lnlr_bound_db = kInfinity;
};

QualityClass ClassBounds(Quality q);

struct DeviceModel {
  std::string name;
  int sample_rate = 0;
  std::array<ImpulseResponse, kBranches> branches;

  // H1 = unit delta, H2..H5 = 0.
  static DeviceModel Perfect(int sample_rate);
  bool IsPerfect() const;
  // Five nonempty finite branches at the model's rate.
  void Validate() const;
};

struct DeviceMeasurement {
  double ob_hz = 0.0;
  double minf_hz = 0.0;
  double lnlr_db = 0.0;  // +inf for linear devices
};

struct OccupiedBand {
  double ob_hz = 0.0;
  double minf_hz = 0.0;
  double maxf_hz = 0.0;
};

// y = sum_n x^n * H_n, trimmed to the full convolution length of the longest
// branch. The perfect device returns its input unchanged.
Waveform ApplyDevice(const Waveform& w, const DeviceModel& d);

// Frequencies where the cumulative power of |H1|^2 crosses 0.5% and 99.5%,
// on a grid of at least 8192 points. Throws ArgumentError for zero energy.
OccupiedBand MeasureOccupiedBand(const ImpulseResponse& h1);

// Probe length of the logarithmic sweep used by MeasureLnlr.
inline constexpr double kProbeSeconds = 0.5;

// Drives the device with a full-scale logarithmic sweep over the occupied band
// of H1 and compares output power of the linear branch with the power of the
// summed nonlinear branches, both restricted to that band.
double MeasureLnlr(const DeviceModel& d);

// (inf, 0, inf) for the perfect device, measured values otherwise.
DeviceMeasurement MeasureDevice(const DeviceModel& d);

Quality ClassifyDevice(const DeviceMeasurement& m);

struct SynthesisOptions {
  int sample_rate = 96000;
  int max_attempts = 100;
};

// Draws a device whose measurement classifies back into `q`. Throws
// SynthesisError after max_attempts draws and ArgumentError when the sample
// rate cannot host the class bandwidth.
DeviceModel SynthesizeDevice(Quality q, Rng& rng, const SynthesisOptions& options = {});

}  // namespace spoofsim::device

#endif  // SPOOFSIM_DEVICE_H_
