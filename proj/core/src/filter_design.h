#ifndef SPOOFSIM_SRC_FILTER_DESIGN_H_
#define SPOOFSIM_SRC_FILTER_DESIGN_H_

#include <cmath>
#include <numbers>
#include <vector>

namespace spoofsim::internal {

inline double KaiserBeta(double attenuation_db) {
  if (attenuation_db > 50.0) return 0.1102 * (attenuation_db - 8.7);
  if (attenuation_db >= 21.0) {
    return 0.5842 * std::pow(attenuation_db - 21.0, 0.4) +
           0.07886 * (attenuation_db - 21.0);
  }
  return 0.0;
}

// Odd Kaiser length for a transition band of `transition_hz`.
inline int KaiserLength(double attenuation_db, double transition_hz, double fs) {
  const double dw = 2.0 * std::numbers::pi * transition_hz / fs;
  int n = static_cast<int>(std::ceil((attenuation_db - 7.95) / (2.285 * dw))) + 1;
  return n | 1;
}

inline std::vector<double> KaiserWindow(int length, double beta) {
  std::vector<double> w(static_cast<std::size_t>(length));
  const double norm = std::cyl_bessel_i(0.0, beta);
  const double half = 0.5 * (length - 1);
  for (int i = 0; i < length; ++i) {
    const double r = half > 0 ? (i - half) / half : 0.0;
    w[static_cast<std::size_t>(i)] =
        std::cyl_bessel_i(0.0, beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / norm;
  }
  return w;
}

// Linear-phase windowed-sinc band-pass with edges at f_lo, f_hi (Hz). f_lo = 0
// gives a low-pass.
inline std::vector<double> WindowedSincBandpass(double f_lo, double f_hi, double fs,
                                                const std::vector<double>& window) {
  const int n = static_cast<int>(window.size());
  const double half = 0.5 * (n - 1);
  std::vector<double> h(window.size());
  auto lowpass = [&](double fc, double t) {
    const double x = 2.0 * fc / fs;
    if (std::abs(t) < 1e-12) return x;
    return std::sin(std::numbers::pi * x * t) / (std::numbers::pi * t);
  };
  for (int i = 0; i < n; ++i) {
    const double t = i - half;
    const double ideal = lowpass(f_hi, t) - (f_lo > 0.0 ? lowpass(f_lo, t) : 0.0);
    h[static_cast<std::size_t>(i)] = ideal * window[static_cast<std::size_t>(i)];
  }
  return h;
}

}  // namespace spoofsim::internal

#endif  // SPOOFSIM_SRC_FILTER_DESIGN_H_
