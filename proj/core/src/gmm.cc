#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <thread>

#include "spoofsim/errors.h"
#include "spoofsim/gmm.h"
#include "spoofsim/rng.h"

namespace spoofsim::gmm {
namespace {

constexpr std::size_t kChunkFrames = 512;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Per-component terms that do not depend on the frame.
struct Precomputed {
  std::vector<double> log_const;  // log w_k - 0.5 (D log 2 pi + sum log var)
  std::vector<double> inv_var;    // K x D
};

Precomputed Prepare(const GmmModel& m) {
  Precomputed p;
  p.log_const.resize(m.components);
  p.inv_var.resize(m.variances.size());
  const double log2pi = std::log(2.0 * std::numbers::pi);
  for (std::size_t k = 0; k < m.components; ++k) {
    double log_det = 0.0;
    for (std::size_t d = 0; d < m.dims; ++d) {
      const double v = m.variances[k * m.dims + d];
      log_det += std::log(v);
      p.inv_var[k * m.dims + d] = 1.0 / v;
    }
    p.log_const[k] = (m.weights[k] > 0.0 ? std::log(m.weights[k]) : kNegInf) -
                     0.5 * (m.dims * log2pi + log_det);
  }
  return p;
}

// Fills logp[k] with log w_k N(x; k) and returns their log-sum-exp.
double ComponentLogs(const GmmModel& m, const Precomputed& p, const double* x, double* logp) {
  double best = kNegInf;
  for (std::size_t k = 0; k < m.components; ++k) {
    if (p.log_const[k] == kNegInf) {
      logp[k] = kNegInf;
      continue;
    }
    const double* mu = m.means.data() + k * m.dims;
    const double* iv = p.inv_var.data() + k * m.dims;
    double q = 0.0;
    for (std::size_t d = 0; d < m.dims; ++d) {
      const double e = x[d] - mu[d];
      q += e * e * iv[d];
    }
    logp[k] = p.log_const[k] - 0.5 * q;
    best = std::max(best, logp[k]);
  }
  if (best == kNegInf) return kNegInf;
  double acc = 0.0;
  for (std::size_t k = 0; k < m.components; ++k) acc += std::exp(logp[k] - best);
  return best + std::log(acc);
}

struct Stats {
  std::vector<double> n;   // K
  std::vector<double> f;   // K x D
  std::vector<double> s;   // K x D
  double log_likelihood = 0.0;

  Stats(std::size_t k, std::size_t d) : n(k, 0.0), f(k * d, 0.0), s(k * d, 0.0) {}
  void Add(const Stats& o) {
    for (std::size_t i = 0; i < n.size(); ++i) n[i] += o.n[i];
    for (std::size_t i = 0; i < f.size(); ++i) f[i] += o.f[i];
    for (std::size_t i = 0; i < s.size(); ++i) s[i] += o.s[i];
    log_likelihood += o.log_likelihood;
  }
};

Stats ChunkStats(const GmmModel& m, const Precomputed& p, const features::FeatureMatrix& x,
                 std::size_t begin, std::size_t end) {
  Stats st(m.components, m.dims);
  std::vector<double> logp(m.components);
  for (std::size_t t = begin; t < end; ++t) {
    const double* row = x.values.data() + t * x.dims;
    const double total = ComponentLogs(m, p, row, logp.data());
    st.log_likelihood += total;
    for (std::size_t k = 0; k < m.components; ++k) {
      const double g = std::exp(logp[k] - total);
      if (g == 0.0) continue;
      st.n[k] += g;
      double* fk = st.f.data() + k * m.dims;
      double* sk = st.s.data() + k * m.dims;
      for (std::size_t d = 0; d < m.dims; ++d) {
        fk[d] += g * row[d];
        sk[d] += g * row[d] * row[d];
      }
    }
  }
  return st;
}

// E-step over fixed chunks, reduced in chunk order.
Stats Accumulate(const GmmModel& m, const features::FeatureMatrix& x, int jobs) {
  const Precomputed p = Prepare(m);
  const std::size_t chunks = (x.frames + kChunkFrames - 1) / kChunkFrames;
  std::vector<Stats> partial(chunks, Stats(0, 0));
  auto run = [&](std::size_t first, std::size_t step) {
    for (std::size_t c = first; c < chunks; c += step) {
      partial[c] = ChunkStats(m, p, x, c * kChunkFrames, std::min(x.frames, (c + 1) * kChunkFrames));
    }
  };
  const auto workers = static_cast<std::size_t>(std::clamp<long long>(jobs, 1, chunks));
  if (workers <= 1) {
    run(0, 1);
  } else {
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(run, w, workers);
    for (auto& t : threads) t.join();
  }
  Stats total(m.components, m.dims);
  for (const auto& s : partial) total.Add(s);
  return total;
}

void MStep(GmmModel& m, const Stats& st, std::size_t frames, const std::vector<double>& floor) {
  for (std::size_t k = 0; k < m.components; ++k) {
    m.weights[k] = st.n[k] / frames;
    // A component with no responsibility keeps its parameters.
    if (st.n[k] < 1e-10) continue;
    for (std::size_t d = 0; d < m.dims; ++d) {
      const std::size_t i = k * m.dims + d;
      const double mean = st.f[i] / st.n[k];
      m.means[i] = mean;
      m.variances[i] = std::max(st.s[i] / st.n[k] - mean * mean, floor[d]);
    }
  }
  const double wsum = std::accumulate(m.weights.begin(), m.weights.end(), 0.0);
  for (double& w : m.weights) w /= wsum;
}

void Split(GmmModel& m, std::size_t target, Rng& rng) {
  const std::size_t k = m.components;
  const std::size_t splits = std::min(k, target - k);
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return m.weights[a] > m.weights[b]; });
  std::vector<double> signs(m.dims);
  for (double& s : signs) s = rng.Uniform() < 0.5 ? -1.0 : 1.0;
  for (std::size_t i = 0; i < splits; ++i) {
    const std::size_t c = order[i];
    m.weights[c] /= 2.0;
    m.weights.push_back(m.weights[c]);
    for (std::size_t d = 0; d < m.dims; ++d) {
      const double step = 0.1 * std::sqrt(m.variances[c * m.dims + d]) * signs[d];
      m.means.push_back(m.means[c * m.dims + d] - step);
      m.means[c * m.dims + d] += step;
      m.variances.push_back(m.variances[c * m.dims + d]);
    }
  }
  m.components += splits;
}

}  // namespace

void GmmModel::Validate() const {
  if (components == 0 || dims == 0) throw ValidationError("empty GMM");
  if (weights.size() != components || means.size() != components * dims ||
      variances.size() != components * dims) {
    throw ValidationError("GMM parameter shapes disagree");
  }
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw ValidationError("GMM weight negative or NaN");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ValidationError("GMM weights do not sum to 1");
  for (double v : variances) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError("GMM variance not positive");
  }
  for (double mu : means) {
    if (!std::isfinite(mu)) throw ValidationError("GMM mean not finite");
  }
}

features::FeatureMatrix PoolFrames(std::span<const features::FeatureMatrix> sets) {
  if (sets.empty()) throw ArgumentError("no feature matrices to pool");
  features::FeatureMatrix out;
  out.dims = sets.front().dims;
  out.frame_shift = sets.front().frame_shift;
  for (const auto& s : sets) {
    if (s.dims != out.dims) throw ArgumentError("feature dimensions differ across files");
    out.values.insert(out.values.end(), s.values.begin(), s.values.end());
    out.frames += s.frames;
  }
  return out;
}

TrainResult TrainGmm(const features::FeatureMatrix& x, const TrainConfig& cfg) {
  if (cfg.components < 1) throw ArgumentError("GMM needs at least one component");
  if (cfg.em_iters < 1) throw ArgumentError("GMM needs at least one EM iteration");
  const auto target = static_cast<std::size_t>(cfg.components);
  if (x.dims == 0) throw ArgumentError("features have no dimensions");
  if (x.frames < target) {
    throw ArgumentError("only " + std::to_string(x.frames) + " frames for " +
                        std::to_string(target) + " components");
  }
  for (double v : x.values) {
    if (!std::isfinite(v)) throw ArgumentError("non-finite feature value");
  }

  const std::size_t dims = x.dims;
  GmmModel m;
  m.components = 1;
  m.dims = dims;
  m.weights = {1.0};
  m.means.assign(dims, 0.0);
  m.variances.assign(dims, 0.0);
  for (std::size_t t = 0; t < x.frames; ++t) {
    for (std::size_t d = 0; d < dims; ++d) m.means[d] += x.at(t, d);
  }
  for (double& mu : m.means) mu /= x.frames;
  for (std::size_t t = 0; t < x.frames; ++t) {
    for (std::size_t d = 0; d < dims; ++d) {
      const double e = x.at(t, d) - m.means[d];
      m.variances[d] += e * e;
    }
  }
  std::vector<double> floor(dims);
  for (std::size_t d = 0; d < dims; ++d) {
    m.variances[d] /= x.frames;
    floor[d] = cfg.variance_floor_factor * m.variances[d];
    if (!(floor[d] > 0.0)) {
      spdlog::warn("feature dimension {} has zero variance; flooring", d);
      floor[d] = std::max(cfg.variance_floor_factor, std::numeric_limits<double>::min());
    }
    m.variances[d] = std::max(m.variances[d], floor[d]);
  }

  Rng rng(cfg.seed);
  while (m.components < target) {
    Split(m, target, rng);
    for (int i = 0; i < 2; ++i) MStep(m, Accumulate(m, x, cfg.jobs), x.frames, floor);
  }

  TrainResult result;
  for (int i = 0; i < cfg.em_iters; ++i) {
    const Stats st = Accumulate(m, x, cfg.jobs);
    result.log_likelihood.push_back(st.log_likelihood / x.frames);
    MStep(m, st, x.frames, floor);
  }
  result.log_likelihood.push_back(Accumulate(m, x, cfg.jobs).log_likelihood / x.frames);
  result.model = std::move(m);
  return result;
}

double LogLikelihood(const GmmModel& m, std::span<const double> x) {
  if (x.size() != m.dims) {
    throw ArgumentError("frame has " + std::to_string(x.size()) + " dims, model " +
                        std::to_string(m.dims));
  }
  const Precomputed p = Prepare(m);
  std::vector<double> logp(m.components);
  return ComponentLogs(m, p, x.data(), logp.data());
}

double ScoreLlr(const features::FeatureMatrix& f, const GmmModel& bona, const GmmModel& spoof,
                bool sum) {
  if (f.dims != bona.dims || f.dims != spoof.dims) {
    throw ArgumentError("feature and model dimensions differ");
  }
  if (f.frames == 0) throw ArgumentError("no frames to score");
  const Precomputed pb = Prepare(bona);
  const Precomputed ps = Prepare(spoof);
  std::vector<double> lb(bona.components), ls(spoof.components);
  double total = 0.0;
  for (std::size_t t = 0; t < f.frames; ++t) {
    const double* row = f.values.data() + t * f.dims;
    total += ComponentLogs(bona, pb, row, lb.data()) - ComponentLogs(spoof, ps, row, ls.data());
  }
  return sum ? total : total / f.frames;
}

}  // namespace spoofsim::gmm
