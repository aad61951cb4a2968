#ifndef SPOOFSIM_GMM_H_
#define SPOOFSIM_GMM_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "spoofsim/features.h"

namespace spoofsim::gmm {

// Diagonal-covariance Gaussian mixture.
struct GmmModel {
  std::size_t components = 0;
  std::size_t dims = 0;
  std::vector<double> weights;    // K
  std::vector<double> means;      // K x D
  std::vector<double> variances;  // K x D

  // Shapes agree, weights sum to 1 within 1e-9, variances positive.
  void Validate() const;
};

struct TrainConfig {
  int components = 512;
  int em_iters = 20;
  std::uint64_t seed = 0;
  // Per-dimension variance floor as a fraction of the global variance.
  double variance_floor_factor = 1e-6;
  int jobs = 1;
};

struct TrainResult {
  GmmModel model;
  // Average per-frame log-likelihood of the training data under the model
  // entering each of the em_iters final EM iterations, then under the final
  // model (em_iters + 1 values).
  std::vector<double> log_likelihood;
};

// Frames are pooled rows of one or more feature matrices.
features::FeatureMatrix PoolFrames(std::span<const features::FeatureMatrix> sets);

// Binary splitting 1 -> 2 -> ... -> K (means moved by +-0.1 sigma along a
// seeded sign pattern, 2 EM iterations per level; when doubling would exceed K
// only the heaviest components split), then em_iters EM iterations.
// Accumulation runs in fixed frame chunks, so results do not depend on jobs.
// Throws ArgumentError when there are fewer frames than components.
TrainResult TrainGmm(const features::FeatureMatrix& frames, const TrainConfig& cfg);

// log sum_k w_k N(x; mu_k, diag(var_k)).
double LogLikelihood(const GmmModel& m, std::span<const double> x);

// Mean (or, with sum, total) over frames of the bona fide minus spoof
// log-likelihood. Higher means more bona fide.
double ScoreLlr(const features::FeatureMatrix& f, const GmmModel& bona, const GmmModel& spoof,
                bool sum = false);

// Little-endian {"SPGM", u32 K, u32 D, f64 weights, means, variances}.
void WriteGmm(const std::filesystem::path& path, const GmmModel& m);
GmmModel ReadGmm(const std::filesystem::path& path);

}  // namespace spoofsim::gmm

#endif  // SPOOFSIM_GMM_H_
