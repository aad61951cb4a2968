#include <spdlog/spdlog.h>

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <set>

#include "spoofsim/embed.h"
#include "spoofsim/errors.h"

namespace spoofsim::embed {
namespace {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Row indices grouped by label, labels in lexicographic order.
std::map<std::string, std::vector<std::size_t>> GroupBy(const std::vector<std::string>& labels) {
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < labels.size(); ++i) groups[labels[i]].push_back(i);
  return groups;
}

void RequirePairs(const std::map<std::string, std::vector<std::size_t>>& groups,
                  const char* what) {
  std::string singles;
  for (const auto& [label, rows] : groups) {
    if (rows.size() < 2) singles += " " + label;
  }
  if (!singles.empty()) {
    throw ValidationError(std::string(what) + " with fewer than 2 vectors:" + singles);
  }
}

double Cosine(std::span<const double> a, std::span<const double> b) {
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    ab += a[d] * b[d];
    aa += a[d] * a[d];
    bb += b[d] * b[d];
  }
  if (aa == 0.0 || bb == 0.0) throw NumericalError("cosine similarity of a zero vector");
  return ab / std::sqrt(aa * bb);
}

}  // namespace

void EmbeddingSet::Validate() const {
  const std::size_t n = utt_ids.size();
  if (speaker_ids.size() != n || class_ids.size() != n || values.size() != n * dims) {
    throw ValidationError("embedding set sizes disagree");
  }
  if (n > 0 && dims == 0) throw ValidationError("embeddings have no dimensions");
  for (double v : values) {
    if (!std::isfinite(v)) throw ValidationError("non-finite embedding value");
  }
}

EmbeddingSet SpeakerWhiten(const EmbeddingSet& e) {
  e.Validate();
  const auto groups = GroupBy(e.speaker_ids);
  RequirePairs(groups, "speakers");
  EmbeddingSet out = e;
  const std::size_t dims = e.dims;
  for (const auto& [speaker, rows] : groups) {
    std::vector<double> mean(dims, 0.0), var(dims, 0.0);
    for (std::size_t i : rows) {
      for (std::size_t d = 0; d < dims; ++d) mean[d] += e.values[i * dims + d];
    }
    for (double& m : mean) m /= rows.size();
    for (std::size_t i : rows) {
      for (std::size_t d = 0; d < dims; ++d) {
        const double c = e.values[i * dims + d] - mean[d];
        var[d] += c * c;
      }
    }
    for (std::size_t d = 0; d < dims; ++d) {
      const double sd = std::max(std::sqrt(var[d] / rows.size()), kStdFloor);
      for (std::size_t i : rows) {
        out.values[i * dims + d] = (e.values[i * dims + d] - mean[d]) / sd;
      }
    }
  }
  return out;
}

EmbeddingSet LengthNormalize(const EmbeddingSet& e) {
  e.Validate();
  EmbeddingSet out = e;
  for (std::size_t i = 0; i < e.size(); ++i) {
    double norm = 0.0;
    for (double v : e.Row(i)) norm += v * v;
    norm = std::sqrt(norm);
    if (norm == 0.0) throw NumericalError("zero vector for " + e.utt_ids[i]);
    for (std::size_t d = 0; d < e.dims; ++d) out.values[i * e.dims + d] /= norm;
  }
  return out;
}

WccnResult Wccn(const EmbeddingSet& e) {
  e.Validate();
  const auto groups = GroupBy(e.class_ids);
  RequirePairs(groups, "classes");
  const auto dims = static_cast<Eigen::Index>(e.dims);
  const Eigen::Map<const Matrix> x(e.values.data(), static_cast<Eigen::Index>(e.size()), dims);

  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(dims, dims);
  for (const auto& [label, rows] : groups) {
    Eigen::MatrixXd xc(rows.size(), dims);
    for (std::size_t r = 0; r < rows.size(); ++r) xc.row(r) = x.row(rows[r]);
    const Eigen::RowVectorXd mean = xc.colwise().mean();
    xc.rowwise() -= mean;
    w += xc.transpose() * xc / static_cast<double>(rows.size());
  }
  w /= static_cast<double>(groups.size());

  WccnResult result;
  Eigen::LLT<Eigen::MatrixXd> llt(w);
  const Eigen::VectorXd diag = llt.matrixL().toDenseMatrix().diagonal();
  // Well conditioned when the Cholesky factor's diagonal spans at most 1e6.
  const bool sound = llt.info() == Eigen::Success && diag.minCoeff() > 0.0 &&
                     diag.maxCoeff() / diag.minCoeff() < 1e6;
  if (!sound) {
    const double ridge = 1e-6 * w.trace() / static_cast<double>(dims);
    spdlog::warn("within-class covariance is ill-conditioned; adding ridge {:.3g}", ridge);
    w.diagonal().array() += ridge;
    llt.compute(w);
    result.ridged = true;
    if (llt.info() != Eigen::Success || !(ridge > 0.0)) {
      std::string small;
      for (const auto& [label, rows] : groups) {
        if (rows.size() <= e.dims) small += " " + label;
      }
      throw NumericalError("within-class covariance is rank deficient beyond repair" +
                           (small.empty() ? std::string() : "; classes with too few vectors:" + small));
    }
  }
  const Eigen::MatrixXd w_inv = llt.solve(Eigen::MatrixXd::Identity(dims, dims));
  const Eigen::MatrixXd b = Eigen::LLT<Eigen::MatrixXd>(0.5 * (w_inv + w_inv.transpose())).matrixL();

  result.transform.resize(e.dims * e.dims);
  Eigen::Map<Matrix>(result.transform.data(), dims, dims) = b;
  result.transformed = e;
  Eigen::Map<Matrix> y(result.transformed.values.data(), static_cast<Eigen::Index>(e.size()), dims);
  y = x * b;  // each row x^T B, i.e. (B^T x)^T
  return result;
}

EmbeddingSet Process(const EmbeddingSet& e) {
  return Wccn(LengthNormalize(SpeakerWhiten(e))).transformed;
}

DistanceMatrix AttackDistance(const EmbeddingSet& e) {
  e.Validate();
  const auto groups = GroupBy(e.class_ids);
  DistanceMatrix out;
  for (const auto& [label, rows] : groups) out.labels.push_back(label);
  const std::size_t m = out.labels.size();
  if (m == 0) throw ArgumentError("no classes");
  out.values.assign(m * m, 0.0);
  std::vector<const std::vector<std::size_t>*> members;
  for (const auto& [label, rows] : groups) members.push_back(&rows);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i == j) continue;
      double total = 0.0;
      for (std::size_t a : *members[i]) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t b : *members[j]) best = std::min(best, 1.0 - Cosine(e.Row(a), e.Row(b)));
        total += best;
      }
      out.at(i, j) = total / members[i]->size();
    }
  }
  return out;
}

}  // namespace spoofsim::embed
