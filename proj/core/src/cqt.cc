#include <spdlog/spdlog.h>

#include <cmath>
#include <mutex>
#include <numbers>

#include "spoofsim/errors.h"
#include "spoofsim/features.h"
#include "spoofsim/fft.h"

namespace spoofsim::features {
namespace {

void CheckConfig(const CqccConfig& cfg, int sample_rate) {
  if (sample_rate <= 0) throw ArgumentError("sample rate must be positive");
  if (cfg.octaves < 1 || cfg.bins_per_octave < 1) {
    throw ArgumentError("CQT needs at least one octave and one bin per octave");
  }
  if (cfg.f_max < 0.0 || cfg.f_max > sample_rate / 2.0) {
    throw ArgumentError("CQT maximum frequency must lie in (0, fs/2]");
  }
}

// numpy-style reflection (edge sample not repeated).
std::size_t Reflect(long long i, std::size_t n) {
  if (n == 1) return 0;
  const long long period = 2 * static_cast<long long>(n) - 2;
  i %= period;
  if (i < 0) i += period;
  return static_cast<std::size_t>(i < static_cast<long long>(n) ? i : period - i);
}

}  // namespace

double CqccConfig::MaxFrequency(int sample_rate) const {
  return f_max > 0.0 ? f_max : sample_rate / 2.0;
}

double CqccConfig::MinFrequency(int sample_rate) const {
  return MaxFrequency(sample_rate) / std::exp2(octaves);
}

double CqccConfig::QualityFactor() const {
  return 1.0 / (std::exp2(1.0 / bins_per_octave) - 1.0);
}

std::size_t CqtLongestWindow(const CqccConfig& cfg, int sample_rate) {
  CheckConfig(cfg, sample_rate);
  return static_cast<std::size_t>(
      std::ceil(cfg.QualityFactor() * sample_rate / cfg.MinFrequency(sample_rate)));
}

std::size_t CqtHop(const CqccConfig& cfg, int sample_rate) {
  CheckConfig(cfg, sample_rate);
  const double f_top =
      cfg.MinFrequency(sample_rate) * std::exp2((cfg.NumBins() - 1.0) / cfg.bins_per_octave);
  const double shortest = cfg.QualityFactor() * sample_rate / f_top;
  std::size_t hop = 1;
  while (static_cast<double>(hop * 2) <= shortest / 8.0) hop *= 2;
  return hop;
}

CqtResult Cqt(const Waveform& w, const CqccConfig& cfg) {
  const int fs = w.sample_rate;
  CheckConfig(cfg, fs);
  if (w.samples.empty()) throw ArgumentError("CQT of an empty signal");

  const std::size_t n = w.samples.size();
  const std::size_t hop = CqtHop(cfg, fs);
  const std::size_t longest = CqtLongestWindow(cfg, fs);
  if (n < longest) {
    static std::once_flag warned;
    std::call_once(warned, [&] {
      spdlog::warn("signal of {} samples is shorter than the longest CQT window ({}); "
                   "padding by reflection",
                   n, longest);
    });
  }
  const std::size_t pad = (longest / 2 + hop - 1) / hop * hop;
  const std::size_t padded = n + 2 * pad;
  const std::size_t m = fft::NextFastSize((padded + hop - 1) / hop);
  const std::size_t n_fft = m * hop;

  std::vector<double> x(n_fft, 0.0);
  for (std::size_t i = 0; i < padded; ++i) {
    x[i] = w.samples[Reflect(static_cast<long long>(i) - static_cast<long long>(pad), n)];
  }
  const auto spectrum = fft::Forward(x, n_fft);

  CqtResult out;
  out.bins = static_cast<std::size_t>(cfg.NumBins());
  out.hop = hop;
  out.frames = (n + hop - 1) / hop;
  out.values.assign(out.frames * out.bins, {});
  out.frequencies.resize(out.bins);

  const double q = cfg.QualityFactor();
  const double f_min = cfg.MinFrequency(fs);
  const double df = static_cast<double>(fs) / n_fft;
  const long long last_bin = static_cast<long long>(n_fft / 2);
  const std::size_t first_frame = pad / hop;
  const double scale = 2.0 / n_fft;
  std::vector<fft::Complex> band(m);
  for (std::size_t k = 0; k < out.bins; ++k) {
    const double fk = f_min * std::exp2(static_cast<double>(k) / cfg.bins_per_octave);
    out.frequencies[k] = fk;
    const double half = std::max(fk / q, 2.0 * df);
    const long long lo = std::max<long long>(0, std::ceil((fk - half) / df));
    const long long hi = std::min<long long>(last_bin, std::floor((fk + half) / df));
    const long long centre = std::llround(fk / df);
    std::fill(band.begin(), band.end(), fft::Complex{});
    for (long long j = lo; j <= hi; ++j) {
      const double g = 0.5 * (1.0 + std::cos(std::numbers::pi * (j * df - fk) / half));
      long long slot = (j - centre) % static_cast<long long>(m);
      if (slot < 0) slot += static_cast<long long>(m);
      band[static_cast<std::size_t>(slot)] += g * spectrum[static_cast<std::size_t>(j)];
    }
    fft::ComplexTransform(band, /*inverse=*/true);
    for (std::size_t t = 0; t < out.frames; ++t) {
      out.values[t * out.bins + k] = scale * band[first_frame + t];
    }
  }
  return out;
}

}  // namespace spoofsim::features
