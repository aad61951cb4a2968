#ifndef SPOOFSIM_FEATURES_H_
#define SPOOFSIM_FEATURES_H_

#include <complex>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "spoofsim/signal.h"

namespace spoofsim::features {

// Frames x dims, row-major.
struct FeatureMatrix {
  std::size_t frames = 0;
  std::size_t dims = 0;
  std::vector<double> values;
  double frame_shift = 0.0;  // seconds

  FeatureMatrix() = default;
  FeatureMatrix(std::size_t frames, std::size_t dims, double frame_shift = 0.0)
      : frames(frames), dims(dims), values(frames * dims, 0.0), frame_shift(frame_shift) {}

  double& at(std::size_t t, std::size_t d) { return values[t * dims + d]; }
  double at(std::size_t t, std::size_t d) const { return values[t * dims + d]; }
  std::span<const double> Row(std::size_t t) const {
    return {values.data() + t * dims, dims};
  }
};

struct CqccConfig {
  double f_max = 0.0;  // 0 selects fs / 2
  int octaves = 9;
  int bins_per_octave = 96;
  // Kept for configuration compatibility; the uniform grid always has as many
  // points as there are CQT bins.
  int resample_period = 16;
  int n_static = 30;

  double MaxFrequency(int sample_rate) const;
  double MinFrequency(int sample_rate) const;
  int NumBins() const { return octaves * bins_per_octave; }
  // 1 / (2^(1/B) - 1).
  double QualityFactor() const;
};

struct CqtResult {
  std::size_t frames = 0;
  std::size_t bins = 0;
  std::size_t hop = 0;           // samples
  std::vector<double> frequencies;  // Hz, per bin
  std::vector<std::complex<double>> values;  // frames x bins, row-major

  std::complex<double> at(std::size_t t, std::size_t k) const {
    return values[t * bins + k];
  }
};

// Longest analysis window, in samples, of the lowest bin.
std::size_t CqtLongestWindow(const CqccConfig& cfg, int sample_rate);
// Largest power of two not above 1/8 of the shortest window.
std::size_t CqtHop(const CqccConfig& cfg, int sample_rate);

// Constant-Q transform with Hann-shaped frequency responses of bandwidth
// 2 f_k / Q around f_k = f_min 2^(k/B). The signal is reflection-padded by
// half the longest window on each side; one frame per hop of the original
// signal. A unit sinusoid at f_k gives magnitude 1 in bin k.
CqtResult Cqt(const Waveform& w, const CqccConfig& cfg = {});

// CQCC: log CQT power (floored at 1e-10 times the squared sample peak),
// cubic-spline resampled onto a uniform grid of NumBins points from f_min to
// f_max, orthonormal DCT-II, first n_static coefficients, deltas and delta-deltas appended.
FeatureMatrix Cqcc(const Waveform& w, const CqccConfig& cfg = {});

struct LfccConfig {
  double win_len = 0.020;    // s
  double win_shift = 0.010;  // s
  int n_fft = 512;
  int n_filters = 20;
  int n_static = 20;
};

// floor((n - win) / shift) + 1 for n >= win, else 1 (the input is zero-padded).
std::size_t LfccFrameCount(std::size_t n_samples, const LfccConfig& cfg, int sample_rate);

// LFCC: symmetric Hamming frames, power spectrum, triangular filters with
// edges evenly spaced from 0 to fs/2, log (floored as in Cqcc), orthonormal
// DCT-II, first n_static coefficients, deltas and delta-deltas appended.
FeatureMatrix Lfcc(const Waveform& w, const LfccConfig& cfg = {});

// delta_t = (x_{t+1} - x_{t-1}) / 2 with the edge frames replicated; the
// delta-delta applies the same operator to the deltas. Output has 3x the dims.
FeatureMatrix AppendDeltas(const FeatureMatrix& f);

// Orthonormal DCT-II of x, first `keep` coefficients (all when keep == 0).
std::vector<double> DctII(std::span<const double> x, std::size_t keep = 0);
// Inverse of the full orthonormal DCT-II.
std::vector<double> InverseDctII(std::span<const double> c);

// Natural cubic spline through (x, y), evaluated at xq. Beyond the end knots
// the spline continues linearly.
std::vector<double> CubicSpline(std::span<const double> x, std::span<const double> y,
                                std::span<const double> xq);

enum class FeatureKind { kCqcc, kLfcc };
std::string_view ToString(FeatureKind k);
FeatureKind ParseFeatureKind(std::string_view text);
FeatureMatrix Extract(const Waveform& w, FeatureKind kind);

// Little-endian {"SPFT", u32 dims, u32 frames, f32 row-major}.
void WriteFeatures(const std::filesystem::path& path, const FeatureMatrix& f);
FeatureMatrix ReadFeatures(const std::filesystem::path& path);
void WriteFeaturesCsv(const std::filesystem::path& path, const FeatureMatrix& f);

}  // namespace spoofsim::features

#endif  // SPOOFSIM_FEATURES_H_
