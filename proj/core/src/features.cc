#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "spoofsim/errors.h"
#include "spoofsim/features.h"
#include "spoofsim/fft.h"

namespace spoofsim::features {
namespace {

constexpr double kLogFloor = 1e-10;

// Power floor relative to full scale: 1e-10 for a signal peaking at 1, and
// scaling with the signal so the floor never breaks gain invariance.
double PowerFloor(const Waveform& w) {
  double peak = 0.0;
  for (double v : w.samples) peak = std::max(peak, std::abs(v));
  return peak > 0.0 ? kLogFloor * peak * peak : kLogFloor;
}

// Rows of the orthonormal DCT-II basis, keep x n.
std::vector<double> DctTable(std::size_t n, std::size_t keep) {
  std::vector<double> table(keep * n);
  const double s0 = std::sqrt(1.0 / n);
  const double s = std::sqrt(2.0 / n);
  for (std::size_t k = 0; k < keep; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      table[k * n + i] =
          (k == 0 ? s0 : s) * std::cos(std::numbers::pi * (i + 0.5) * k / n);
    }
  }
  return table;
}

void ApplyDct(const std::vector<double>& table, std::span<const double> x, std::size_t keep,
              double* out) {
  const std::size_t n = x.size();
  for (std::size_t k = 0; k < keep; ++k) {
    const double* row = table.data() + k * n;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += row[i] * x[i];
    out[k] = acc;
  }
}

// Natural cubic spline on fixed knots and query points; Apply() maps knot
// values to query values.
class SplinePlan {
 public:
  SplinePlan(std::span<const double> x, std::span<const double> xq)
      : x_(x.begin(), x.end()), xq_(xq.begin(), xq.end()) {
    const std::size_t n = x_.size();
    if (n == 0) throw ArgumentError("spline needs at least one knot");
    for (std::size_t i = 1; i < n; ++i) {
      if (!(x_[i] > x_[i - 1])) throw ArgumentError("spline knots must increase strictly");
    }
    interval_.resize(xq_.size());
    for (std::size_t q = 0; q < xq_.size(); ++q) {
      auto it = std::upper_bound(x_.begin(), x_.end(), xq_[q]);
      std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
      interval_[q] = n < 2 ? 0 : std::min(i, n - 2);
    }
    if (n < 3) return;
    // Thomas factorization of the interior system for the second derivatives.
    const std::size_t m = n - 2;
    diag_.resize(m);
    lower_.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
      const double h0 = x_[i + 1] - x_[i];
      const double h1 = x_[i + 2] - x_[i + 1];
      double d = 2.0 * (h0 + h1);
      if (i > 0) {
        lower_[i] = h0 / diag_[i - 1];
        d -= lower_[i] * h0;
      }
      diag_[i] = d;
    }
  }

  std::vector<double> Apply(std::span<const double> y) const {
    const std::size_t n = x_.size();
    if (y.size() != n) throw ArgumentError("spline value count differs from knot count");
    std::vector<double> out(xq_.size());
    if (n == 1) {
      std::fill(out.begin(), out.end(), y[0]);
      return out;
    }
    std::vector<double> m2(n, 0.0);
    if (n >= 3) {
      const std::size_t m = n - 2;
      std::vector<double> rhs(m);
      for (std::size_t i = 0; i < m; ++i) {
        const double h0 = x_[i + 1] - x_[i];
        const double h1 = x_[i + 2] - x_[i + 1];
        rhs[i] = 6.0 * ((y[i + 2] - y[i + 1]) / h1 - (y[i + 1] - y[i]) / h0);
        if (i > 0) rhs[i] -= lower_[i] * rhs[i - 1];
      }
      for (std::size_t i = m; i-- > 0;) {
        double v = rhs[i];
        if (i + 1 < m) v -= (x_[i + 2] - x_[i + 1]) * m2[i + 2];
        m2[i + 1] = v / diag_[i];
      }
    }
    for (std::size_t q = 0; q < xq_.size(); ++q) {
      const std::size_t i = interval_[q];
      const double h = x_[i + 1] - x_[i];
      const double xv = xq_[q];
      if (xv < x_[0]) {
        const double slope = (y[1] - y[0]) / h - h * (2.0 * m2[0] + m2[1]) / 6.0;
        out[q] = y[0] + slope * (xv - x_[0]);
      } else if (xv > x_[n - 1]) {
        const double slope = (y[n - 1] - y[n - 2]) / h + h * (m2[n - 2] + 2.0 * m2[n - 1]) / 6.0;
        out[q] = y[n - 1] + slope * (xv - x_[n - 1]);
      } else {
        const double a = (x_[i + 1] - xv) / h;
        const double b = (xv - x_[i]) / h;
        out[q] = a * y[i] + b * y[i + 1] +
                 ((a * a * a - a) * m2[i] + (b * b * b - b) * m2[i + 1]) * h * h / 6.0;
      }
    }
    return out;
  }

 private:
  std::vector<double> x_, xq_;
  std::vector<std::size_t> interval_;
  std::vector<double> diag_, lower_;
};

}  // namespace

std::vector<double> DctII(std::span<const double> x, std::size_t keep) {
  if (x.empty()) throw ArgumentError("DCT of an empty vector");
  if (keep == 0 || keep > x.size()) keep = x.size();
  const auto table = DctTable(x.size(), keep);
  std::vector<double> out(keep);
  ApplyDct(table, x, keep, out.data());
  return out;
}

std::vector<double> InverseDctII(std::span<const double> c) {
  if (c.empty()) throw ArgumentError("DCT of an empty vector");
  const std::size_t n = c.size();
  const auto table = DctTable(n, n);
  std::vector<double> x(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) x[i] += table[k * n + i] * c[k];
  }
  return x;
}

std::vector<double> CubicSpline(std::span<const double> x, std::span<const double> y,
                                std::span<const double> xq) {
  return SplinePlan(x, xq).Apply(y);
}

FeatureMatrix AppendDeltas(const FeatureMatrix& f) {
  if (f.frames == 0 || f.dims == 0) throw ArgumentError("deltas of an empty feature matrix");
  if (f.frames == 1) spdlog::warn("single-frame features: deltas are zero");
  const std::size_t d = f.dims;
  FeatureMatrix out(f.frames, 3 * d, f.frame_shift);
  auto diff = [&](std::size_t t, std::size_t j, std::size_t offset) {
    const std::size_t prev = t == 0 ? 0 : t - 1;
    const std::size_t next = std::min(t + 1, f.frames - 1);
    return (out.at(next, offset + j) - out.at(prev, offset + j)) / 2.0;
  };
  for (std::size_t t = 0; t < f.frames; ++t) {
    for (std::size_t j = 0; j < d; ++j) out.at(t, j) = f.at(t, j);
  }
  for (std::size_t t = 0; t < f.frames; ++t) {
    for (std::size_t j = 0; j < d; ++j) out.at(t, d + j) = diff(t, j, 0);
  }
  for (std::size_t t = 0; t < f.frames; ++t) {
    for (std::size_t j = 0; j < d; ++j) out.at(t, 2 * d + j) = diff(t, j, d);
  }
  return out;
}

FeatureMatrix Cqcc(const Waveform& w, const CqccConfig& cfg) {
  if (cfg.n_static < 1 || cfg.n_static > cfg.NumBins()) {
    throw ArgumentError("CQCC static coefficient count out of range");
  }
  const CqtResult cqt = Cqt(w, cfg);
  const std::size_t bins = cqt.bins;
  const double f_min = cfg.MinFrequency(w.sample_rate);
  const double f_max = cfg.MaxFrequency(w.sample_rate);
  std::vector<double> grid(bins);
  for (std::size_t j = 0; j < bins; ++j) {
    grid[j] = bins == 1 ? f_min : f_min + j * (f_max - f_min) / (bins - 1.0);
  }
  const SplinePlan spline(cqt.frequencies, grid);
  const auto keep = static_cast<std::size_t>(cfg.n_static);
  const auto table = DctTable(bins, keep);

  FeatureMatrix statics(cqt.frames, keep, static_cast<double>(cqt.hop) / w.sample_rate);
  std::vector<double> log_power(bins);
  const double floor = PowerFloor(w);
  for (std::size_t t = 0; t < cqt.frames; ++t) {
    for (std::size_t k = 0; k < bins; ++k) {
      log_power[k] = std::log(std::max(std::norm(cqt.at(t, k)), floor));
    }
    const auto uniform = spline.Apply(log_power);
    ApplyDct(table, uniform, keep, &statics.at(t, 0));
  }
  return AppendDeltas(statics);
}

std::size_t LfccFrameCount(std::size_t n_samples, const LfccConfig& cfg, int sample_rate) {
  const auto win = static_cast<std::size_t>(std::llround(cfg.win_len * sample_rate));
  const auto shift = static_cast<std::size_t>(std::llround(cfg.win_shift * sample_rate));
  if (win == 0 || shift == 0) throw ArgumentError("LFCC window and shift must be positive");
  return n_samples < win ? 1 : (n_samples - win) / shift + 1;
}

FeatureMatrix Lfcc(const Waveform& w, const LfccConfig& cfg) {
  const int fs = w.sample_rate;
  if (fs <= 0) throw ArgumentError("sample rate must be positive");
  if (w.samples.empty()) throw ArgumentError("LFCC of an empty signal");
  const auto win = static_cast<std::size_t>(std::llround(cfg.win_len * fs));
  const auto shift = static_cast<std::size_t>(std::llround(cfg.win_shift * fs));
  const auto n_fft = static_cast<std::size_t>(cfg.n_fft);
  if (win < 2 || shift == 0) throw ArgumentError("LFCC window and shift too short");
  if (n_fft < win) throw ArgumentError("LFCC FFT size below the window length");
  if (cfg.n_filters < 1 || cfg.n_static < 1 || cfg.n_static > cfg.n_filters) {
    throw ArgumentError("LFCC filter or coefficient count out of range");
  }
  const std::size_t frames = LfccFrameCount(w.samples.size(), cfg, fs);
  if (w.samples.size() < win) {
    spdlog::warn("signal of {} samples is shorter than one LFCC frame; zero-padding",
                 w.samples.size());
  }

  std::vector<double> window(win);
  for (std::size_t i = 0; i < win; ++i) {
    window[i] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * i / (win - 1.0));
  }
  const std::size_t n_bins = n_fft / 2 + 1;
  const auto n_filters = static_cast<std::size_t>(cfg.n_filters);
  std::vector<double> edges(n_filters + 2);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edges[i] = (fs / 2.0) * i / (n_filters + 1.0);
  }
  std::vector<double> bank(n_filters * n_bins, 0.0);
  for (std::size_t m = 0; m < n_filters; ++m) {
    const double lo = edges[m], mid = edges[m + 1], hi = edges[m + 2];
    for (std::size_t j = 0; j < n_bins; ++j) {
      const double f = static_cast<double>(j) * fs / n_fft;
      double g = 0.0;
      if (f >= lo && f <= mid) g = (f - lo) / (mid - lo);
      else if (f > mid && f <= hi) g = (hi - f) / (hi - mid);
      bank[m * n_bins + j] = g;
    }
  }
  const auto keep = static_cast<std::size_t>(cfg.n_static);
  const auto table = DctTable(n_filters, keep);

  FeatureMatrix statics(frames, keep, static_cast<double>(shift) / fs);
  std::vector<double> frame(n_fft);
  std::vector<double> energies(n_filters);
  const double floor = PowerFloor(w);
  for (std::size_t t = 0; t < frames; ++t) {
    std::fill(frame.begin(), frame.end(), 0.0);
    for (std::size_t i = 0; i < win; ++i) {
      const std::size_t s = t * shift + i;
      if (s < w.samples.size()) frame[i] = w.samples[s] * window[i];
    }
    const auto spec = fft::Forward(frame, n_fft);
    for (std::size_t m = 0; m < n_filters; ++m) {
      double e = 0.0;
      for (std::size_t j = 0; j < n_bins; ++j) e += bank[m * n_bins + j] * std::norm(spec[j]);
      energies[m] = std::log(std::max(e, floor));
    }
    ApplyDct(table, energies, keep, &statics.at(t, 0));
  }
  return AppendDeltas(statics);
}

std::string_view ToString(FeatureKind k) { return k == FeatureKind::kCqcc ? "cqcc" : "lfcc"; }

FeatureKind ParseFeatureKind(std::string_view text) {
  if (text == "cqcc") return FeatureKind::kCqcc;
  if (text == "lfcc") return FeatureKind::kLfcc;
  throw ArgumentError("unknown feature kind '" + std::string(text) + "'");
}

FeatureMatrix Extract(const Waveform& w, FeatureKind kind) {
  return kind == FeatureKind::kCqcc ? Cqcc(w) : Lfcc(w);
}

}  // namespace spoofsim::features
