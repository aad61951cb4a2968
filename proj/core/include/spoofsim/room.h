#ifndef SPOOFSIM_ROOM_H_
#define SPOOFSIM_ROOM_H_

#include <array>
#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spoofsim/rng.h"
#include "spoofsim/signal.h"

namespace spoofsim::room {

inline constexpr double kSpeedOfSound = 343.0;  // m/s
inline constexpr double kRoomHeight = 2.7;      // m
inline constexpr double kTalkerHeight = 1.1;    // m, also the microphone height
inline constexpr double kWallMargin = 0.1;      // m
inline constexpr int kMaxPlacementAttempts = 10000;
inline constexpr int kMaxRoomRetries = 10;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool Contains(double v) const { return v >= lo && v <= hi; }
};

// Category index 0, 1, 2 for labels a/b/c (environment) or A/B/C (attack).
using Category = int;

// Environment triplet (room size S, reverberation R, talker distance Ds).
struct EnvironmentLabel {
  Category size = 0;
  Category reverb = 0;
  Category distance = 0;

  std::string ToString() const;
  // Parses "aaa" .. "ccc"; throws ArgumentError otherwise.
  static EnvironmentLabel Parse(std::string_view text);
  // All 27 labels in lexicographic order.
  static std::vector<EnvironmentLabel> All();

  auto operator<=>(const EnvironmentLabel&) const = default;
};

Interval FloorArea(Category s);         // m^2
Interval ReverbTime(Category r);        // s
Interval TalkerDistance(Category ds);   // m
// Attacker-to-talker distance. Category C is open-ended; it is capped at 2 m
// and at what the room geometry allows.
Interval AttackerDistance(Category da);

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Point3 operator+(const Point3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Point3 operator-(const Point3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Point3 operator*(double s) const { return {x * s, y * s, z * s}; }
  double Dot(const Point3& o) const { return x * o.x + y * o.y + z * o.z; }
  double Norm() const;
  Point3 Normalized() const;
  bool operator==(const Point3&) const = default;
};

double Distance(const Point3& a, const Point3& b);

struct RoomInstance {
  EnvironmentLabel label;
  double length_x = 0.0;
  double width_y = 0.0;
  double height_z = kRoomHeight;
  double t60_target = 0.0;
  // Uniform absorption coefficient of all six surfaces, in (0, 1].
  double absorption = 1.0;
  Point3 mic;
  Point3 talker;
  std::optional<Point3> attacker;

  double FloorArea() const { return length_x * width_y; }
  double Volume() const { return length_x * width_y * height_z; }
  double SurfaceArea() const;
  // Strictly inside with at least `margin` clearance from every wall.
  bool Inside(const Point3& p, double margin = kWallMargin) const;
  // Where the replay loudspeaker stands: at the talker's distance from the
  // microphone, on the bearing of the attacker.
  Point3 ReplaySource() const;
};

// kImageSource integrates the direction-dependent reflection rate of a shoebox
// image lattice, |ux|/Lx + |uy|/Ly + |uz|/Lz, over the sphere and reads T60 off
// the resulting Schroeder curve between -5 and -25 dB. It tracks what
// SimulateRir actually produces; Sabine and Eyring underestimate it by 10-20%.
enum class ReverbFormula { kSabine, kEyring, kImageSource };

struct Absorption {
  double alpha = 0.0;
  bool clamped = false;
  // T60 the clamped coefficient actually yields under the same formula.
  double achieved_t60 = 0.0;
};

inline constexpr double kMaxAbsorption = 0.99;

// Uniform absorption that yields room.t60_target. Sabine: 0.161 V / (T60 A);
// Eyring: 1 - exp(-0.161 V / (T60 A)); image source: 1 - exp(-K / (c T60))
// with K the room's lattice decay constant. Clamped to (0, 0.99] with a
// warning.
Absorption AbsorptionFromT60(const RoomInstance& room,
                             ReverbFormula formula = ReverbFormula::kSabine);

// Reverberation time predicted for a uniform absorption coefficient.
double PredictedT60(const RoomInstance& room, double alpha, ReverbFormula formula);

struct SamplingOptions {
  ReverbFormula formula = ReverbFormula::kImageSource;
};

// Draws a room, a microphone and a talker for the label (and an attacker when
// attack_da is given). Deterministic in the stream state. Throws
// InfeasibleError when 10 room draws each exhaust 10,000 placement attempts.
RoomInstance SampleEnvironment(const EnvironmentLabel& label,
                               std::optional<Category> attack_da, Rng& rng,
                               const SamplingOptions& options = {});

// Places (or re-places) the attacker within a fixed room. Throws
// InfeasibleError after 10,000 attempts.
void PlaceAttacker(RoomInstance& room, Category da, Rng& rng);

enum class Directivity { kOmnidirectional, kCardioid };

inline constexpr int kFractionalDelayHalfWidth = 40;
inline constexpr double kImageFloorDb = -60.0;

// Shoebox image-source impulse response. Each image contributes
// (1 - alpha)^(n/2) g(theta) / (4 pi d) at delay d / c through a +-40 tap
// windowed sinc; reflection orders stop once (1 - alpha)^(n/2) drops below
// -60 dB. The response is at least 1.2 T60 long.
ImpulseResponse SimulateRir(const RoomInstance& room, const Point3& source,
                            const Point3& receiver, Directivity pattern,
                            const Point3& orientation, int sample_rate);

// Schroeder backward integration, least-squares line between the -5 dB and
// -25 dB crossings, extrapolated to 60 dB. Throws InsufficientDecayError when
// the decay curve does not reach -25 dB.
double MeasureT60(const ImpulseResponse& ir);

}  // namespace spoofsim::room

#endif  // SPOOFSIM_ROOM_H_
