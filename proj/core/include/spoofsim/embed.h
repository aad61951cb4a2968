#ifndef SPOOFSIM_EMBED_H_
#define SPOOFSIM_EMBED_H_

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace spoofsim::embed {

// N labelled vectors of dimension D, row-major.
struct EmbeddingSet {
  std::size_t dims = 0;
  std::vector<std::string> utt_ids;
  std::vector<std::string> speaker_ids;
  std::vector<std::string> class_ids;
  std::vector<double> values;

  std::size_t size() const { return utt_ids.size(); }
  std::span<const double> Row(std::size_t i) const { return {values.data() + i * dims, dims}; }
  // Consistent sizes, finite values.
  void Validate() const;
};

inline constexpr double kStdFloor = 1e-8;

// Per speaker: subtract the speaker mean and divide each dimension by the
// speaker's (population) standard deviation, floored at 1e-8. Throws
// ValidationError naming speakers with a single vector.
EmbeddingSet SpeakerWhiten(const EmbeddingSet& e);

// Scales every vector to unit Euclidean norm. Throws NumericalError on a zero
// vector.
EmbeddingSet LengthNormalize(const EmbeddingSet& e);

struct WccnResult {
  // B, D x D row-major, lower triangular with B B^T = W^-1.
  std::vector<double> transform;
  EmbeddingSet transformed;  // x <- B^T x
  bool ridged = false;
};

// W is the mean of the per-class maximum-likelihood covariances. When W is
// not safely positive definite a ridge of 1e-6 trace(W) / D is added first.
// Throws ValidationError for classes with a single vector and NumericalError
// when even the ridged W cannot be factored.
WccnResult Wccn(const EmbeddingSet& e);

// Whitening, length normalization and WCCN, in that order.
EmbeddingSet Process(const EmbeddingSet& e);

// M x M, row-major, over labels in lexicographic order.
struct DistanceMatrix {
  std::vector<std::string> labels;
  std::vector<double> values;

  std::size_t size() const { return labels.size(); }
  double at(std::size_t i, std::size_t j) const { return values[i * labels.size() + j]; }
  double& at(std::size_t i, std::size_t j) { return values[i * labels.size() + j]; }
};

// D(X_i, X_j) = mean over x in X_i of min over y in X_j of 1 - cos(x, y).
// Not symmetric in general; the diagonal is zero.
DistanceMatrix AttackDistance(const EmbeddingSet& e);

struct Merge {
  std::size_t left = 0;  // cluster ids: leaves 0..M-1, merges M, M+1, ...
  std::size_t right = 0;
  double height = 0.0;
  std::size_t size = 0;
};

struct Dendrogram {
  std::vector<std::string> labels;
  std::vector<Merge> merges;

  // Ultrametric tree with branch lengths of half the merge heights.
  std::string ToNewick() const;
  std::string ToJson() const;
};

// Average linkage on (D + D^T) / 2 with the size-weighted update. Ties go to
// the pair whose smallest member labels come first lexicographically.
Dendrogram Upgma(const DistanceMatrix& d);

// CSV "utt_id,speaker_id,class_id,v0,...,v{D-1}"; a header line starting with
// "utt_id" is skipped on read and written on write.
EmbeddingSet ReadEmbeddingsCsv(const std::filesystem::path& path);
void WriteEmbeddingsCsv(const std::filesystem::path& path, const EmbeddingSet& e);
void WriteDistanceCsv(const std::filesystem::path& path, const DistanceMatrix& d);

}  // namespace spoofsim::embed

#endif  // SPOOFSIM_EMBED_H_
