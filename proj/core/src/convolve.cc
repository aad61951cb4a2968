#include "spoofsim/errors.h"
#include "spoofsim/fft.h"
#include "spoofsim/signal.h"

namespace spoofsim {

std::vector<double> ConvolveFft(std::span<const double> x,
                                std::span<const double> h) {
  if (x.empty() || h.empty()) return {};
  const std::size_t out_len = x.size() + h.size() - 1;
  // A single tap is a pure gain; skipping the transform keeps it exact.
  if (h.size() == 1 || x.size() == 1) {
    const double gain = h.size() == 1 ? h[0] : x[0];
    const auto& longer = h.size() == 1 ? x : h;
    std::vector<double> y(longer.begin(), longer.end());
    for (double& v : y) v *= gain;
    return y;
  }
  const std::size_t n = fft::NextFastSize(out_len);
  auto a = fft::Forward(x, n);
  const auto b = fft::Forward(h, n);
  for (std::size_t k = 0; k < a.size(); ++k) a[k] *= b[k];
  auto y = fft::Inverse(a, n);
  y.resize(out_len);
  return y;
}

Waveform Convolve(const Waveform& w, const ImpulseResponse& ir) {
  if (w.sample_rate != ir.sample_rate) {
    throw ArgumentError("convolve: sample rates differ (" +
                        std::to_string(w.sample_rate) + " vs " +
                        std::to_string(ir.sample_rate) + ")");
  }
  return Waveform{ConvolveFft(w.samples, ir.taps), w.sample_rate};
}

}  // namespace spoofsim
