#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "spoofsim/errors.h"
#include "spoofsim/room.h"

namespace spoofsim::room {
namespace {

constexpr double kSabineConstant = 0.161;  // s/m, for c = 343 m/s

void CheckCategory(Category c, const char* what) {
  if (c < 0 || c > 2) {
    throw ArgumentError(std::string("invalid ") + what + " category " + std::to_string(c));
  }
}

// Uniform point on the horizontal plane at talker height, inside the margins.
Point3 RandomPlanarPoint(const RoomInstance& room, Rng& rng) {
  return {rng.Uniform(kWallMargin, room.length_x - kWallMargin),
          rng.Uniform(kWallMargin, room.width_y - kWallMargin), kTalkerHeight};
}

Point3 PointAtDistance(const Point3& from, double distance, Rng& rng) {
  const double angle = rng.Uniform(0.0, 2.0 * std::numbers::pi);
  return {from.x + distance * std::cos(angle), from.y + distance * std::sin(angle),
          from.z};
}

void DrawDimensions(RoomInstance& room, Rng& rng) {
  const Interval area = FloorArea(room.label.size);
  const double a = rng.Uniform(area.lo, area.hi);
  const double aspect = rng.Uniform(0.5, 2.0);
  room.length_x = std::sqrt(a * aspect);
  room.width_y = std::sqrt(a / aspect);
  room.height_z = kRoomHeight;
}

bool TryPlaceTalker(RoomInstance& room, Rng& rng) {
  const Interval ds = TalkerDistance(room.label.distance);
  for (int attempt = 0; attempt < kMaxPlacementAttempts; ++attempt) {
    const Point3 mic = RandomPlanarPoint(room, rng);
    const Point3 talker = PointAtDistance(mic, rng.Uniform(ds.lo, ds.hi), rng);
    if (room.Inside(talker)) {
      room.mic = mic;
      room.talker = talker;
      return true;
    }
  }
  return false;
}

// Largest in-plane distance from p to any admissible position.
double FarthestAdmissible(const RoomInstance& room, const Point3& p) {
  const double dx = std::max(p.x - kWallMargin, room.length_x - kWallMargin - p.x);
  const double dy = std::max(p.y - kWallMargin, room.width_y - kWallMargin - p.y);
  return std::hypot(dx, dy);
}

bool TryPlaceAttacker(RoomInstance& room, Category da, Rng& rng) {
  Interval range = AttackerDistance(da);
  range.hi = std::min(range.hi, FarthestAdmissible(room, room.talker));
  if (range.hi < range.lo) return false;
  const double ds = Distance(room.mic, room.talker);
  for (int attempt = 0; attempt < kMaxPlacementAttempts; ++attempt) {
    const Point3 attacker =
        PointAtDistance(room.talker, rng.Uniform(range.lo, range.hi), rng);
    if (!room.Inside(attacker)) continue;
    const Point3 bearing = attacker - room.mic;
    if (bearing.Norm() < 1e-3) continue;
    if (!room.Inside(room.mic + bearing.Normalized() * ds)) continue;
    room.attacker = attacker;
    return true;
  }
  return false;
}

// T60 of the continuum image-lattice model for unit decay constant
// a = -ln(1 - alpha) c; the true T60 is this value divided by a.
double LatticeDecayConstant(const RoomInstance& room) {
  constexpr int kGrid = 64;
  const double step = 0.5 * std::numbers::pi / kGrid;
  std::vector<double> rate;
  std::vector<double> weight;
  rate.reserve(kGrid * kGrid);
  weight.reserve(kGrid * kGrid);
  for (int i = 0; i < kGrid; ++i) {
    const double theta = (i + 0.5) * step;
    for (int j = 0; j < kGrid; ++j) {
      const double phi = (j + 0.5) * step;
      rate.push_back(std::sin(theta) * std::cos(phi) / room.length_x +
                     std::sin(theta) * std::sin(phi) / room.width_y +
                     std::cos(theta) / room.height_z);
      weight.push_back(std::sin(theta));
    }
  }
  // Schroeder integral of sum_u w exp(-k t) is sum_u w exp(-k t) / k.
  auto schroeder = [&](double t) {
    double s = 0.0;
    for (std::size_t n = 0; n < rate.size(); ++n) {
      s += weight[n] * std::exp(-rate[n] * t) / rate[n];
    }
    return s;
  };
  const double total = schroeder(0.0);
  auto crossing = [&](double db) {
    const double level = total * std::pow(10.0, db / 10.0);
    double lo = 0.0, hi = 1.0;
    while (schroeder(hi) > level) hi *= 2.0;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (schroeder(mid) > level ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  return 3.0 * (crossing(-25.0) - crossing(-5.0));
}

}  // namespace

std::string EnvironmentLabel::ToString() const {
  return {static_cast<char>('a' + size), static_cast<char>('a' + reverb),
          static_cast<char>('a' + distance)};
}

EnvironmentLabel EnvironmentLabel::Parse(std::string_view text) {
  if (text.size() != 3) {
    throw ArgumentError("environment label must have 3 characters: '" +
                        std::string(text) + "'");
  }
  int v[3];
  for (int i = 0; i < 3; ++i) {
    if (text[i] < 'a' || text[i] > 'c') {
      throw ArgumentError("invalid environment label '" + std::string(text) + "'");
    }
    v[i] = text[i] - 'a';
  }
  return {v[0], v[1], v[2]};
}

std::vector<EnvironmentLabel> EnvironmentLabel::All() {
  std::vector<EnvironmentLabel> all;
  for (int s = 0; s < 3; ++s)
    for (int r = 0; r < 3; ++r)
      for (int d = 0; d < 3; ++d) all.push_back({s, r, d});
  return all;
}

Interval FloorArea(Category s) {
  CheckCategory(s, "room size");
  static constexpr Interval kArea[] = {{2.0, 5.0}, {5.0, 10.0}, {10.0, 20.0}};
  return kArea[s];
}

Interval ReverbTime(Category r) {
  CheckCategory(r, "reverberation");
  static constexpr Interval kT60[] = {{0.05, 0.2}, {0.2, 0.6}, {0.6, 1.0}};
  return kT60[r];
}

Interval TalkerDistance(Category ds) {
  CheckCategory(ds, "talker distance");
  static constexpr Interval kDs[] = {{0.1, 0.5}, {0.5, 1.0}, {1.0, 1.5}};
  return kDs[ds];
}

Interval AttackerDistance(Category da) {
  CheckCategory(da, "attacker distance");
  static constexpr Interval kDa[] = {{0.1, 0.5}, {0.5, 1.0}, {1.0, 2.0}};
  return kDa[da];
}

double Point3::Norm() const { return std::sqrt(Dot(*this)); }

Point3 Point3::Normalized() const {
  const double n = Norm();
  if (n == 0.0) throw ArgumentError("cannot normalize a zero vector");
  return *this * (1.0 / n);
}

double Distance(const Point3& a, const Point3& b) { return (a - b).Norm(); }

double RoomInstance::SurfaceArea() const {
  return 2.0 * (length_x * width_y + length_x * height_z + width_y * height_z);
}

bool RoomInstance::Inside(const Point3& p, double margin) const {
  return p.x > margin && p.x < length_x - margin && p.y > margin &&
         p.y < width_y - margin && p.z > margin && p.z < height_z - margin;
}

Point3 RoomInstance::ReplaySource() const {
  if (!attacker) throw ArgumentError("room has no attacker position");
  const Point3 bearing = (*attacker - mic).Normalized();
  return mic + bearing * Distance(mic, talker);
}

double PredictedT60(const RoomInstance& room, double alpha, ReverbFormula formula) {
  if (alpha <= 0.0) return std::numeric_limits<double>::infinity();
  const double sa = room.SurfaceArea();
  const double v = room.Volume();
  if (formula == ReverbFormula::kSabine) return kSabineConstant * v / (sa * alpha);
  if (alpha >= 1.0) return 0.0;
  if (formula == ReverbFormula::kImageSource) {
    return LatticeDecayConstant(room) / (-std::log1p(-alpha) * kSpeedOfSound);
  }
  return kSabineConstant * v / (-sa * std::log1p(-alpha));
}

Absorption AbsorptionFromT60(const RoomInstance& room, ReverbFormula formula) {
  if (!(room.t60_target > 0.0)) throw ArgumentError("t60_target must be positive");
  double x = kSabineConstant * room.Volume() / (room.t60_target * room.SurfaceArea());
  if (formula == ReverbFormula::kImageSource) {
    x = LatticeDecayConstant(room) / (kSpeedOfSound * room.t60_target);
  }
  Absorption out;
  out.alpha = formula == ReverbFormula::kSabine ? x : -std::expm1(-x);
  if (out.alpha > kMaxAbsorption) {
    out.alpha = kMaxAbsorption;
    out.clamped = true;
  }
  out.achieved_t60 = PredictedT60(room, out.alpha, formula);
  if (out.clamped) {
    spdlog::warn("room {:.2f}x{:.2f}x{:.2f} m too small for T60 {:.3f} s; "
                 "absorption clamped, achieved T60 {:.3f} s",
                 room.length_x, room.width_y, room.height_z, room.t60_target,
                 out.achieved_t60);
  }
  return out;
}

RoomInstance SampleEnvironment(const EnvironmentLabel& label,
                               std::optional<Category> attack_da, Rng& rng,
                               const SamplingOptions& options) {
  CheckCategory(label.size, "room size");
  CheckCategory(label.reverb, "reverberation");
  CheckCategory(label.distance, "talker distance");
  if (attack_da) CheckCategory(*attack_da, "attacker distance");
  RoomInstance room;
  room.label = label;
  for (int retry = 0; retry < kMaxRoomRetries; ++retry) {
    DrawDimensions(room, rng);
    const Interval t60 = ReverbTime(label.reverb);
    room.t60_target = rng.Uniform(t60.lo, t60.hi);
    room.absorption = AbsorptionFromT60(room, options.formula).alpha;
    room.attacker.reset();
    if (!TryPlaceTalker(room, rng)) continue;
    if (attack_da && !TryPlaceAttacker(room, *attack_da, rng)) continue;
    return room;
  }
  throw InfeasibleError("cannot place positions for environment " + label.ToString() +
                        (attack_da ? std::string(" with attacker zone ") +
                                         static_cast<char>('A' + *attack_da)
                                   : std::string()) +
                        " after " + std::to_string(kMaxRoomRetries) + " room draws");
}

void PlaceAttacker(RoomInstance& room, Category da, Rng& rng) {
  CheckCategory(da, "attacker distance");
  if (!TryPlaceAttacker(room, da, rng)) {
    throw InfeasibleError("cannot place attacker in zone " +
                          std::string(1, static_cast<char>('A' + da)) + " in a " +
                          std::to_string(room.FloorArea()) + " m^2 room");
  }
}

}  // namespace spoofsim::room
