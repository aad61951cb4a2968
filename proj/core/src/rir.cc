#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "spoofsim/errors.h"
#include "spoofsim/room.h"

namespace spoofsim::room {
namespace {

constexpr int kTaps = 2 * kFractionalDelayHalfWidth + 1;
constexpr int kFractionSteps = 2048;

// Hann-windowed sinc sampled at offsets k - frac, k = -40..40, for frac on a
// 1/2048-sample grid.
class FractionalDelayTable {
 public:
  FractionalDelayTable() : table_(static_cast<std::size_t>(kFractionSteps + 1) * kTaps) {
    const double half = kFractionalDelayHalfWidth + 1;
    for (int s = 0; s <= kFractionSteps; ++s) {
      const double frac = static_cast<double>(s) / kFractionSteps;
      for (int j = 0; j < kTaps; ++j) {
        const double x = (j - kFractionalDelayHalfWidth) - frac;
        const double sinc =
            std::abs(x) < 1e-12 ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
        const double window = 0.5 * (1.0 + std::cos(std::numbers::pi * x / half));
        table_[static_cast<std::size_t>(s) * kTaps + j] = sinc * window;
      }
    }
  }

  const double* Row(double frac) const {
    const auto s = static_cast<std::size_t>(std::lround(frac * kFractionSteps));
    return &table_[s * kTaps];
  }

 private:
  std::vector<double> table_;
};

const FractionalDelayTable& DelayTable() {
  static const FractionalDelayTable table;
  return table;
}

void AddImpulse(std::vector<double>& ir, double delay_samples, double amplitude) {
  const double base = std::floor(delay_samples);
  const double frac = delay_samples - base;
  const double* row = DelayTable().Row(frac);
  const auto n0 = static_cast<std::int64_t>(base) - kFractionalDelayHalfWidth;
  const auto len = static_cast<std::int64_t>(ir.size());
  const std::int64_t j_lo = std::max<std::int64_t>(0, -n0);
  const std::int64_t j_hi = std::min<std::int64_t>(kTaps, len - n0);
  for (std::int64_t j = j_lo; j < j_hi; ++j) {
    ir[static_cast<std::size_t>(n0 + j)] += amplitude * row[j];
  }
}

// Second-order high-pass at 100 Hz (Allen and Berkley). Image sources are
// all in phase, so without it the response carries a spurious low-frequency
// component that grows with the image density and distorts the decay.
void HighPass(std::vector<double>& ir, double fs) {
  const double w = 2.0 * std::numbers::pi * 100.0 / fs;
  const double r1 = std::exp(-w);
  const double b1 = 2.0 * r1 * std::cos(w);
  const double b2 = -r1 * r1;
  const double a1 = -(1.0 + r1);
  double y0 = 0.0, y1 = 0.0, y2 = 0.0;
  for (double& v : ir) {
    y2 = y1;
    y1 = y0;
    y0 = b1 * y1 + b2 * y2 + v;
    v = y0 + a1 * y1 + r1 * y2;
  }
}

// Reflections suffered by image (n, parity) along one axis.
int Reflections(int n, int parity) { return std::abs(n - parity) + std::abs(n); }

}  // namespace

ImpulseResponse SimulateRir(const RoomInstance& room, const Point3& source,
                            const Point3& receiver, Directivity pattern,
                            const Point3& orientation, int sample_rate) {
  if (sample_rate <= 0) throw ArgumentError("sample rate must be positive");
  if (!(room.absorption > 0.0 && room.absorption <= 1.0)) {
    throw ArgumentError("absorption must lie in (0, 1]");
  }
  if (!room.Inside(source, 0.0) || !room.Inside(receiver, 0.0)) {
    throw ArgumentError("source and receiver must lie inside the room");
  }
  if (Distance(source, receiver) < 1e-9) {
    throw ArgumentError("source and receiver coincide");
  }
  Point3 axis;
  if (pattern == Directivity::kCardioid) axis = orientation.Normalized();

  const double fs = sample_rate;
  const double direct_delay = Distance(source, receiver) / kSpeedOfSound;
  const double decay_time =
      std::max(room.t60_target, PredictedT60(room, room.absorption, ReverbFormula::kEyring));
  const auto length = static_cast<std::size_t>(
      std::ceil((1.2 * decay_time + direct_delay) * fs) + kFractionalDelayHalfWidth + 1);
  std::vector<double> ir(length, 0.0);

  const double beta = std::sqrt(1.0 - room.absorption);
  // Highest reflection order whose loss stays above the -60 dB floor.
  int max_order = 0;
  if (beta > 0.0) {
    max_order = static_cast<int>(std::floor(kImageFloorDb / 20.0 * std::log(10.0) / std::log(beta)));
  }
  std::vector<double> gain(static_cast<std::size_t>(max_order) + 1);
  for (int n = 0; n <= max_order; ++n) gain[static_cast<std::size_t>(n)] = std::pow(beta, n);

  const double max_distance = static_cast<double>(length) / fs * kSpeedOfSound;
  const std::array<double, 3> dims = {room.length_x, room.width_y, room.height_z};
  const std::array<double, 3> src = {source.x, source.y, source.z};
  const std::array<double, 3> rcv = {receiver.x, receiver.y, receiver.z};
  std::array<int, 3> n_max{};
  for (int a = 0; a < 3; ++a) {
    n_max[a] = std::min(static_cast<int>(std::ceil(max_distance / (2.0 * dims[a]))) + 1,
                        max_order / 2 + 1);
  }

  for (int nx = -n_max[0]; nx <= n_max[0]; ++nx) {
    for (int px = 0; px < 2; ++px) {
      const int rx = Reflections(nx, px);
      if (rx > max_order) continue;
      const double dx = (1 - 2 * px) * src[0] + 2.0 * nx * dims[0] - rcv[0];
      for (int ny = -n_max[1]; ny <= n_max[1]; ++ny) {
        for (int py = 0; py < 2; ++py) {
          const int ry = Reflections(ny, py);
          if (rx + ry > max_order) continue;
          const double dy = (1 - 2 * py) * src[1] + 2.0 * ny * dims[1] - rcv[1];
          const double dxy2 = dx * dx + dy * dy;
          if (dxy2 > max_distance * max_distance) continue;
          for (int nz = -n_max[2]; nz <= n_max[2]; ++nz) {
            for (int pz = 0; pz < 2; ++pz) {
              const int order = rx + ry + Reflections(nz, pz);
              if (order > max_order) continue;
              const double dz = (1 - 2 * pz) * src[2] + 2.0 * nz * dims[2] - rcv[2];
              const double d = std::sqrt(dxy2 + dz * dz);
              const double delay = d / kSpeedOfSound * fs;
              if (delay - kFractionalDelayHalfWidth >= static_cast<double>(length)) continue;
              double g = 1.0;
              if (pattern == Directivity::kCardioid) {
                const double cos_theta = (dx * axis.x + dy * axis.y + dz * axis.z) / d;
                g = 0.5 * (1.0 + cos_theta);
                if (g <= 0.0) continue;
              }
              const double amplitude =
                  gain[static_cast<std::size_t>(order)] * g / (4.0 * std::numbers::pi * d);
              AddImpulse(ir, delay, amplitude);
            }
          }
        }
      }
    }
  }
  HighPass(ir, fs);
  return ImpulseResponse{std::move(ir), sample_rate};
}

double MeasureT60(const ImpulseResponse& ir) {
  ir.Validate();
  const std::size_t n = ir.taps.size();
  std::vector<double> energy(n);
  double acc = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    acc += ir.taps[i] * ir.taps[i];
    energy[i] = acc;
  }
  if (acc <= 0.0) throw InsufficientDecayError("impulse response has no energy");
  std::size_t start = n, stop = n;
  for (std::size_t i = 0; i < n; ++i) {
    const double db = 10.0 * std::log10(energy[i] / acc);
    if (start == n && db <= -5.0) start = i;
    if (db <= -25.0) {
      stop = i;
      break;
    }
  }
  if (start == n || stop == n || stop <= start + 1) {
    throw InsufficientDecayError("decay curve spans less than 20 dB below -5 dB");
  }
  // Least-squares slope of the decay curve in dB per sample.
  const double count = static_cast<double>(stop - start + 1);
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  for (std::size_t i = start; i <= stop; ++i) {
    const double t = static_cast<double>(i - start);
    const double y = 10.0 * std::log10(energy[i] / acc);
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
  }
  const double slope = (count * sty - st * sy) / (count * stt - st * st);
  if (!(slope < 0.0)) throw InsufficientDecayError("decay curve is not decreasing");
  return -60.0 / slope / ir.sample_rate;
}

}  // namespace spoofsim::room
