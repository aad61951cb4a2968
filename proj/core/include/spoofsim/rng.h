#ifndef SPOOFSIM_RNG_H_
#define SPOOFSIM_RNG_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace spoofsim {

// Seeded random stream. Distributions are implemented here rather than taken
// from <random> so draws are bit-identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t NextU64() { return engine_(); }
  // Uniform in [0, 1).
  double Uniform();
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  // Uniform integer in [0, n).
  std::uint64_t UniformIndex(std::uint64_t n);
  double Normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t SplitMix64(std::uint64_t x);

// Mixes a master seed with a tag, e.g. a trial id, into an independent
// substream seed.
std::uint64_t DeriveSeed(std::uint64_t master, std::string_view tag);
std::uint64_t DeriveSeed(std::uint64_t master, std::uint64_t index);

}  // namespace spoofsim

#endif  // SPOOFSIM_RNG_H_
