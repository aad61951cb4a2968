#include <cmath>
#include <numbers>
#include <numeric>

#include "spoofsim/errors.h"
#include "spoofsim/signal.h"

namespace spoofsim {
namespace {

// Design targets relative to the lower of the two rates.
constexpr double kPassbandEdge = 0.45;
constexpr double kStopbandEdge = 0.50;
constexpr double kAttenuationDb = 70.0;
// Phase tables beyond this many phases are evaluated on the fly.
constexpr std::int64_t kMaxTabulatedPhases = 4096;

double Sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

class KaiserSinc {
 public:
  KaiserSinc(int source_rate, int target_rate) {
    const double low = std::min(source_rate, target_rate);
    const double cutoff_hz = 0.5 * (kPassbandEdge + kStopbandEdge) * low;
    const double transition_hz = (kStopbandEdge - kPassbandEdge) * low;
    beta_ = 0.1102 * (kAttenuationDb - 8.7);
    // Kaiser length estimate, expressed as a half-width in input samples.
    const double length_seconds =
        (kAttenuationDb - 7.95) / (2.285 * 2.0 * std::numbers::pi * transition_hz);
    half_width_ = 0.5 * length_seconds * source_rate;
    cutoff_ = 2.0 * cutoff_hz / source_rate;  // cycles per input sample, x2
    norm_ = std::cyl_bessel_i(0.0, beta_);
  }

  double half_width() const { return half_width_; }

  // Kernel value at an offset measured in input samples.
  double operator()(double tau) const {
    const double r = tau / half_width_;
    if (std::abs(r) >= 1.0) return 0.0;
    const double window = std::cyl_bessel_i(0.0, beta_ * std::sqrt(1.0 - r * r)) / norm_;
    return cutoff_ * Sinc(cutoff_ * tau) * window;
  }

 private:
  double beta_ = 0.0;
  double half_width_ = 0.0;
  double cutoff_ = 0.0;
  double norm_ = 1.0;
};

// Weights for one output phase: taps over input indices base-h+1 .. base+h,
// normalized to unit sum so DC passes exactly.
std::vector<double> PhaseWeights(const KaiserSinc& kernel, double frac,
                                 std::int64_t h) {
  std::vector<double> w(static_cast<std::size_t>(2 * h));
  double sum = 0.0;
  for (std::int64_t j = 0; j < 2 * h; ++j) {
    const double tau = frac - static_cast<double>(j - h + 1);
    w[static_cast<std::size_t>(j)] = kernel(tau);
    sum += w[static_cast<std::size_t>(j)];
  }
  if (sum != 0.0) {
    for (double& v : w) v /= sum;
  }
  return w;
}

}  // namespace

Waveform Resample(const Waveform& w, int target_rate) {
  if (target_rate <= 0) throw ArgumentError("target sample rate must be positive");
  if (w.sample_rate <= 0) throw ArgumentError("source sample rate must be positive");
  if (target_rate == w.sample_rate) return w;

  const std::int64_t g = std::gcd(target_rate, w.sample_rate);
  const std::int64_t up = target_rate / g;
  const std::int64_t down = w.sample_rate / g;
  const auto n_in = static_cast<std::int64_t>(w.samples.size());
  const std::int64_t n_out = (n_in * up + down - 1) / down;

  const KaiserSinc kernel(w.sample_rate, target_rate);
  const auto h = static_cast<std::int64_t>(std::ceil(kernel.half_width()));

  std::vector<std::vector<double>> table;
  if (up <= kMaxTabulatedPhases) {
    table.reserve(static_cast<std::size_t>(up));
    for (std::int64_t p = 0; p < up; ++p) {
      table.push_back(PhaseWeights(kernel, static_cast<double>(p) / up, h));
    }
  }

  Waveform out;
  out.sample_rate = target_rate;
  out.samples.assign(static_cast<std::size_t>(n_out), 0.0);
  std::vector<double> scratch;
  for (std::int64_t m = 0; m < n_out; ++m) {
    const std::int64_t num = m * down;
    const std::int64_t base = num / up;
    const std::int64_t phase = num % up;
    const std::vector<double>* weights;
    if (!table.empty()) {
      weights = &table[static_cast<std::size_t>(phase)];
    } else {
      scratch = PhaseWeights(kernel, static_cast<double>(phase) / up, h);
      weights = &scratch;
    }
    const std::int64_t first = base - h + 1;
    const std::int64_t lo = std::max<std::int64_t>(0, first);
    const std::int64_t hi = std::min<std::int64_t>(n_in, base + h + 1);
    double acc = 0.0;
    for (std::int64_t k = lo; k < hi; ++k) {
      acc += (*weights)[static_cast<std::size_t>(k - first)] *
             w.samples[static_cast<std::size_t>(k)];
    }
    out.samples[static_cast<std::size_t>(m)] = acc;
  }
  return out;
}

}  // namespace spoofsim
