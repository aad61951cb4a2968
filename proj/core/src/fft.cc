#include "spoofsim/fft.h"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

namespace spoofsim::fft {
namespace {

enum class Kind { kR2C, kC2R, kForward, kBackward };

// FFTW planning is not thread-safe; execution with the new-array interface is.
// Plans are created once per (kind, size) and kept for the process lifetime.
class PlanCache {
 public:
  fftw_plan Get(Kind kind, std::size_t n) {
    std::lock_guard<std::mutex> lock(mu_);
    auto key = std::make_tuple(static_cast<int>(kind), n);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    const int size = static_cast<int>(n);
    auto* real = static_cast<double*>(fftw_malloc(sizeof(double) * n));
    auto* cplx = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
    fftw_plan plan = nullptr;
    switch (kind) {
      case Kind::kR2C:
        plan = fftw_plan_dft_r2c_1d(size, real, cplx, FFTW_ESTIMATE);
        break;
      case Kind::kC2R:
        plan = fftw_plan_dft_c2r_1d(size, cplx, real, FFTW_ESTIMATE);
        break;
      case Kind::kForward:
        plan = fftw_plan_dft_1d(size, cplx, cplx, FFTW_FORWARD, FFTW_ESTIMATE);
        break;
      case Kind::kBackward:
        plan = fftw_plan_dft_1d(size, cplx, cplx, FFTW_BACKWARD, FFTW_ESTIMATE);
        break;
    }
    fftw_free(real);
    fftw_free(cplx);
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mu_;
  std::map<std::tuple<int, std::size_t>, fftw_plan> plans_;
};

PlanCache& Cache() {
  static auto* cache = new PlanCache();
  return *cache;
}

struct FftwDeleter {
  void operator()(void* p) const { fftw_free(p); }
};

template <typename T>
std::unique_ptr<T[], FftwDeleter> Allocate(std::size_t n) {
  return std::unique_ptr<T[], FftwDeleter>(
      static_cast<T*>(fftw_malloc(sizeof(T) * std::max<std::size_t>(n, 1))));
}

}  // namespace

std::size_t NextFastSize(std::size_t n) {
  if (n <= 1) return 1;
  for (std::size_t m = n;; ++m) {
    std::size_t r = m;
    for (std::size_t p : {2, 3, 5, 7}) {
      while (r % p == 0) r /= p;
    }
    if (r == 1) return m;
  }
}

std::vector<Complex> Forward(std::span<const double> x, std::size_t n) {
  auto in = Allocate<double>(n);
  auto out = Allocate<fftw_complex>(n / 2 + 1);
  const std::size_t copy = std::min(n, x.size());
  std::copy_n(x.begin(), copy, in.get());
  std::fill(in.get() + copy, in.get() + n, 0.0);
  fftw_execute_dft_r2c(Cache().Get(Kind::kR2C, n), in.get(), out.get());
  std::vector<Complex> result(n / 2 + 1);
  for (std::size_t k = 0; k < result.size(); ++k) {
    result[k] = {out[k][0], out[k][1]};
  }
  return result;
}

std::vector<double> Inverse(std::span<const Complex> spectrum, std::size_t n) {
  auto in = Allocate<fftw_complex>(n / 2 + 1);
  auto out = Allocate<double>(n);
  for (std::size_t k = 0; k < n / 2 + 1; ++k) {
    const Complex v = k < spectrum.size() ? spectrum[k] : Complex{};
    in[k][0] = v.real();
    in[k][1] = v.imag();
  }
  fftw_execute_dft_c2r(Cache().Get(Kind::kC2R, n), in.get(), out.get());
  std::vector<double> result(out.get(), out.get() + n);
  const double scale = 1.0 / static_cast<double>(n);
  for (double& v : result) v *= scale;
  return result;
}

void ComplexTransform(std::vector<Complex>& data, bool inverse) {
  const std::size_t n = data.size();
  if (n == 0) return;
  auto buf = Allocate<fftw_complex>(n);
  std::memcpy(buf.get(), data.data(), sizeof(fftw_complex) * n);
  fftw_plan plan = Cache().Get(inverse ? Kind::kBackward : Kind::kForward, n);
  fftw_execute_dft(plan, buf.get(), buf.get());
  for (std::size_t i = 0; i < n; ++i) data[i] = {buf[i][0], buf[i][1]};
}

}  // namespace spoofsim::fft
