#include "spoofsim/device.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include <spdlog/spdlog.h>

#include "filter_design.h"
#include "spoofsim/errors.h"
#include "spoofsim/fft.h"

namespace spoofsim::device {
namespace {

constexpr int kMinSpectrumPoints = 8192;
constexpr double kNonlinearTapsAt16k = 128.0;
constexpr double kFadeSeconds = 0.01;

// Realistic parameter ranges per class, inside the class bounds.
struct ClassRanges {
  double minf_lo, minf_hi;
  double band_lo, band_hi;
  double lnlr_lo, lnlr_hi;
};

ClassRanges RangesFor(Quality q) {
  switch (q) {
    case Quality::kHigh:
      return {150.0, 500.0, 10500.0, 17000.0, 100.0, 145.0};
    case Quality::kLow:
      return {600.0, 1500.0, 7500.0, 10000.0, 30.0, 100.0};
    default:
      throw ArgumentError("no synthesis ranges for class " + std::string(ToString(q)));
  }
}

// Full-scale exponential sweep from f1 to f2 with short raised-cosine fades.
std::vector<double> LogSweep(double f1, double f2, int fs) {
  const auto n = static_cast<std::size_t>(kProbeSeconds * fs);
  const double duration = kProbeSeconds;
  const double k = std::log(f2 / f1);
  std::vector<double> x(n);
  const auto fade = static_cast<std::size_t>(kFadeSeconds * fs);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / fs;
    double v = std::sin(2.0 * std::numbers::pi * f1 * duration / k *
                        (std::exp(t * k / duration) - 1.0));
    const std::size_t edge = std::min(i, n - 1 - i);
    if (edge < fade) {
      v *= 0.5 * (1.0 - std::cos(std::numbers::pi * static_cast<double>(edge) / fade));
    }
    x[i] = v;
  }
  return x;
}

double BandPower(std::span<const double> y, double f_lo, double f_hi, int fs) {
  const std::size_t n = fft::NextFastSize(y.size());
  const auto spec = fft::Forward(y, n);
  double p = 0.0;
  for (std::size_t k = 0; k < spec.size(); ++k) {
    const double f = static_cast<double>(k) * fs / static_cast<double>(n);
    if (f >= f_lo && f <= f_hi) p += std::norm(spec[k]);
  }
  return p;
}

std::vector<double> Power(std::span<const double> x, int order) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::pow(x[i], order);
  return out;
}

std::vector<double> NonlinearOutput(std::span<const double> x, const DeviceModel& d) {
  std::vector<double> y;
  for (int b = 1; b < kBranches; ++b) {
    const auto& h = d.branches[static_cast<std::size_t>(b)];
    if (h.IsZero()) continue;
    const auto part = ConvolveFft(Power(x, b + 1), h.taps);
    if (y.size() < part.size()) y.resize(part.size(), 0.0);
    for (std::size_t i = 0; i < part.size(); ++i) y[i] += part[i];
  }
  return y;
}

ImpulseResponse DesignLinearBranch(double f_lo, double f_hi, int fs) {
  const double transition = std::max(50.0, 0.3 * f_lo);
  const int length = internal::KaiserLength(80.0, transition, fs);
  const auto window = internal::KaiserWindow(length, internal::KaiserBeta(80.0));
  return {internal::WindowedSincBandpass(f_lo, f_hi, fs, window), fs};
}

// Decaying noise shaped by a random low-pass, normalized to unit energy.
ImpulseResponse DesignNonlinearBranch(Rng& rng, int fs) {
  const int taps = static_cast<int>(std::lround(kNonlinearTapsAt16k * fs / 16000.0));
  const double cutoff = rng.Uniform(1500.0, 5000.0);
  const int lp_len = std::min(taps | 1, internal::KaiserLength(60.0, 1000.0, fs));
  const auto lp = internal::WindowedSincBandpass(
      0.0, cutoff, fs, internal::KaiserWindow(lp_len, internal::KaiserBeta(60.0)));
  std::vector<double> noise(static_cast<std::size_t>(taps));
  const double tau = 0.25 * taps;
  for (int i = 0; i < taps; ++i) {
    noise[static_cast<std::size_t>(i)] = rng.Normal() * std::exp(-i / tau);
  }
  auto shaped = ConvolveFft(noise, lp);
  shaped.resize(static_cast<std::size_t>(taps));
  double energy = 0.0;
  for (double v : shaped) energy += v * v;
  const double scale = energy > 0.0 ? 1.0 / std::sqrt(energy) : 0.0;
  for (double& v : shaped) v *= scale;
  return {std::move(shaped), fs};
}

}  // namespace

std::string_view ToString(Quality q) {
  switch (q) {
    case Quality::kPerfect:
      return "perfect";
    case Quality::kHigh:
      return "high";
    case Quality::kLow:
      return "low";
    case Quality::kIndeterminate:
      return "indeterminate";
  }
  return "indeterminate";
}

Quality ParseQuality(std::string_view text) {
  if (text == "perfect" || text == "A") return Quality::kPerfect;
  if (text == "high" || text == "B") return Quality::kHigh;
  if (text == "low" || text == "C") return Quality::kLow;
  if (text == "indeterminate") return Quality::kIndeterminate;
  throw ArgumentError("unknown device quality '" + std::string(text) + "'");
}

QualityClass ClassBounds(Quality q) {
  switch (q) {
    case Quality::kPerfect:
      return {Quality::kPerfect, kInfinity, 0.0, kInfinity};
    case Quality::kHigh:
      return {Quality::kHigh, 10000.0, 600.0, 100.0};
    case Quality::kLow:
      return {Quality::kLow, 10000.0, 600.0, 100.0};
    case Quality::kIndeterminate:
      break;
  }
  throw ArgumentError("indeterminate is not a device class");
}

DeviceModel DeviceModel::Perfect(int sample_rate) {
  DeviceModel d;
  d.name = "perfect";
  d.sample_rate = sample_rate;
  d.branches[0] = ImpulseResponse::Delta(sample_rate);
  for (int b = 1; b < kBranches; ++b) {
    d.branches[static_cast<std::size_t>(b)] = ImpulseResponse::Zero(sample_rate);
  }
  return d;
}

bool DeviceModel::IsPerfect() const {
  const auto& h1 = branches[0].taps;
  if (h1.size() != 1 || h1[0] != 1.0) return false;
  return std::all_of(branches.begin() + 1, branches.end(),
                     [](const ImpulseResponse& h) { return h.IsZero(); });
}

void DeviceModel::Validate() const {
  if (sample_rate <= 0) throw ArgumentError("device sample rate must be positive");
  for (const auto& h : branches) {
    h.Validate();
    if (h.sample_rate != sample_rate) {
      throw ArgumentError("device branch rates differ from the model rate");
    }
  }
  if (branches[0].IsZero()) throw ArgumentError("device linear branch is zero");
}

Waveform ApplyDevice(const Waveform& w, const DeviceModel& d) {
  if (w.sample_rate != d.sample_rate) {
    throw ArgumentError("apply_device: waveform rate " + std::to_string(w.sample_rate) +
                        " differs from device rate " + std::to_string(d.sample_rate));
  }
  if (d.IsPerfect()) return w;
  if (w.samples.empty()) return {{}, w.sample_rate};
  std::size_t longest = 0;
  for (const auto& h : d.branches) longest = std::max(longest, h.taps.size());
  Waveform y{std::vector<double>(w.samples.size() + longest - 1, 0.0), w.sample_rate};
  const auto linear = ConvolveFft(w.samples, d.branches[0].taps);
  std::copy(linear.begin(), linear.end(), y.samples.begin());
  const auto nonlinear = NonlinearOutput(w.samples, d);
  for (std::size_t i = 0; i < nonlinear.size(); ++i) y.samples[i] += nonlinear[i];
  return y;
}

OccupiedBand MeasureOccupiedBand(const ImpulseResponse& h1) {
  h1.Validate();
  if (h1.Energy() <= 0.0) throw ArgumentError("occupied band of a zero response");
  std::size_t n = kMinSpectrumPoints;
  while (n < h1.taps.size()) n *= 2;
  const auto spec = fft::Forward(h1.taps, n);
  const double df = static_cast<double>(h1.sample_rate) / static_cast<double>(n);
  // Trapezoidal cumulative integral of the one-sided power spectrum.
  std::vector<double> cum(spec.size(), 0.0);
  for (std::size_t k = 1; k < spec.size(); ++k) {
    cum[k] = cum[k - 1] + 0.5 * (std::norm(spec[k - 1]) + std::norm(spec[k])) * df;
  }
  const double total = cum.back();
  auto crossing = [&](double fraction) {
    const double level = fraction * total;
    const auto it = std::lower_bound(cum.begin(), cum.end(), level);
    const auto k = static_cast<std::size_t>(it - cum.begin());
    if (k == 0) return 0.0;
    const double span = cum[k] - cum[k - 1];
    const double t = span > 0.0 ? (level - cum[k - 1]) / span : 0.0;
    return (static_cast<double>(k - 1) + t) * df;
  };
  OccupiedBand band;
  band.minf_hz = crossing(0.005);
  band.maxf_hz = crossing(0.995);
  band.ob_hz = band.maxf_hz - band.minf_hz;
  return band;
}

double MeasureLnlr(const DeviceModel& d) {
  d.Validate();
  const bool linear = std::all_of(d.branches.begin() + 1, d.branches.end(),
                                  [](const ImpulseResponse& h) { return h.IsZero(); });
  if (linear) return kInfinity;
  const OccupiedBand band = MeasureOccupiedBand(d.branches[0]);
  const double f_lo = std::max(band.minf_hz, 1.0);
  const double f_hi = std::max(band.maxf_hz, f_lo * 1.01);
  const auto probe = LogSweep(f_lo, f_hi, d.sample_rate);
  const double p_linear =
      BandPower(ConvolveFft(probe, d.branches[0].taps), band.minf_hz, band.maxf_hz,
                d.sample_rate);
  const double p_nonlinear =
      BandPower(NonlinearOutput(probe, d), band.minf_hz, band.maxf_hz, d.sample_rate);
  if (p_nonlinear <= 0.0) return kInfinity;
  return 10.0 * std::log10(p_linear / p_nonlinear);
}

DeviceMeasurement MeasureDevice(const DeviceModel& d) {
  d.Validate();
  if (d.IsPerfect()) return {kInfinity, 0.0, kInfinity};
  const OccupiedBand band = MeasureOccupiedBand(d.branches[0]);
  return {band.ob_hz, band.minf_hz, MeasureLnlr(d)};
}

Quality ClassifyDevice(const DeviceMeasurement& m) {
  if (m.lnlr_db == kInfinity && m.minf_hz == 0.0) return Quality::kPerfect;
  if (m.ob_hz > 10000.0 && m.minf_hz < 600.0 && m.lnlr_db > 100.0) return Quality::kHigh;
  if (m.ob_hz < 10000.0 && m.minf_hz > 600.0 && m.lnlr_db < 100.0) return Quality::kLow;
  return Quality::kIndeterminate;
}

DeviceModel SynthesizeDevice(Quality q, Rng& rng, const SynthesisOptions& options) {
  const int fs = options.sample_rate;
  if (fs <= 0) throw ArgumentError("device sample rate must be positive");
  if (q == Quality::kPerfect) return DeviceModel::Perfect(fs);
  const ClassRanges r = RangesFor(q);
  const double ceiling = 0.45 * fs;
  if (r.minf_lo + r.band_lo >= ceiling) {
    throw ArgumentError("sample rate " + std::to_string(fs) +
                        " Hz cannot host a " + std::string(ToString(q)) +
                        "-quality device band");
  }
  for (int attempt = 0; attempt < options.max_attempts; ++attempt) {
    const double f_lo = rng.Uniform(r.minf_lo, r.minf_hi);
    const double band = rng.Uniform(r.band_lo, std::min(r.band_hi, ceiling - f_lo));
    if (band < r.band_lo) continue;
    const double lnlr_target = rng.Uniform(r.lnlr_lo, r.lnlr_hi);

    DeviceModel d;
    d.sample_rate = fs;
    d.branches[0] = DesignLinearBranch(f_lo, f_lo + band, fs);
    // Higher orders fall off by a random 3-10 dB per order.
    double order_gain = 1.0;
    for (int b = 1; b < kBranches; ++b) {
      auto h = DesignNonlinearBranch(rng, fs);
      for (double& v : h.taps) v *= order_gain;
      d.branches[static_cast<std::size_t>(b)] = std::move(h);
      order_gain *= std::pow(10.0, -rng.Uniform(3.0, 10.0) / 20.0);
    }
    // Nonlinear power scales with gain^2, so one measurement fixes the gain.
    const double lnlr_unit = MeasureLnlr(d);
    const double gain = std::pow(10.0, (lnlr_unit - lnlr_target) / 20.0);
    for (int b = 1; b < kBranches; ++b) {
      for (double& v : d.branches[static_cast<std::size_t>(b)].taps) v *= gain;
    }
    char name[64];
    std::snprintf(name, sizeof(name), "%s-%016llx", std::string(ToString(q)).c_str(),
                  static_cast<unsigned long long>(rng.NextU64()));
    d.name = name;
    const DeviceMeasurement m = MeasureDevice(d);
    if (ClassifyDevice(m) == q) return d;
    spdlog::debug("rejected {} draw: OB {:.0f} Hz, minF {:.0f} Hz, LNLR {:.1f} dB", ToString(q),
                  m.ob_hz, m.minf_hz, m.lnlr_db);
  }
  throw SynthesisError("no " + std::string(ToString(q)) + "-quality device after " +
                       std::to_string(options.max_attempts) + " attempts");
}

}  // namespace spoofsim::device
