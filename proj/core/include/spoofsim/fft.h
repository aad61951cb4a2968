#ifndef SPOOFSIM_FFT_H_
#define SPOOFSIM_FFT_H_

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace spoofsim::fft {

using Complex = std::complex<double>;

// Smallest n' >= n whose only prime factors are 2, 3, 5 and 7.
std::size_t NextFastSize(std::size_t n);

// Real-to-complex transform of x zero-padded (or truncated) to n points.
// Returns n/2 + 1 bins.
std::vector<Complex> Forward(std::span<const double> x, std::size_t n);

// Inverse of Forward: n real samples, scaled by 1/n.
std::vector<double> Inverse(std::span<const Complex> spectrum, std::size_t n);

// In-place complex transform, unnormalized in both directions.
void ComplexTransform(std::vector<Complex>& data, bool inverse);

}  // namespace spoofsim::fft

#endif  // SPOOFSIM_FFT_H_
