#ifndef SPOOFSIM_SIGNAL_H_
#define SPOOFSIM_SIGNAL_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace spoofsim {

// Mono sampled audio. Amplitudes are nominally in [-1, 1]; intermediate
// simulation stages may exceed that range and are only clamped on write.
struct Waveform {
  std::vector<double> samples;
  int sample_rate = 0;

  double DurationSeconds() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate
                           : 0.0;
  }
  // Throws ArgumentError on a non-positive rate or non-finite samples.
  void Validate() const;
};

struct ImpulseResponse {
  std::vector<double> taps;
  int sample_rate = 0;

  static ImpulseResponse Delta(int sample_rate, std::size_t delay = 0,
                               double gain = 1.0);
  // The explicitly-constructed zero response: a single zero tap.
  static ImpulseResponse Zero(int sample_rate);

  double Energy() const;
  bool IsZero() const;
  // Nonempty, finite taps and a positive rate. Zero energy is allowed only for
  // the all-zero response.
  void Validate() const;
};

// RIFF/WAVE reader. Accepts 16-bit PCM and 32-bit IEEE float; multichannel
// files yield channel 0 with a warning. PCM is scaled by 1/32768.
Waveform ReadWav(const std::filesystem::path& path);

// Writes 16-bit PCM mono. Samples are rounded half away from zero and
// saturated to [-32768, 32767]. Returns the number of saturated samples.
std::size_t WriteWav(const std::filesystem::path& path, const Waveform& w);

// Encodes one amplitude the way WriteWav stores it.
std::int16_t QuantizePcm16(double amplitude);

// Windowed-sinc polyphase resampler (Kaiser window, >= 60 dB stopband).
// The output has ceil(n * target / source) samples and is time-aligned with
// the input (zero group delay).
Waveform Resample(const Waveform& w, int target_rate);

// Full linear convolution via FFT, length len(x) + len(h) - 1.
std::vector<double> ConvolveFft(std::span<const double> x,
                                std::span<const double> h);

// Throws ArgumentError when the rates differ.
Waveform Convolve(const Waveform& w, const ImpulseResponse& ir);

}  // namespace spoofsim

#endif  // SPOOFSIM_SIGNAL_H_
