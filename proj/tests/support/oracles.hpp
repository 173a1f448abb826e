#pragma once

// Independent reference implementations used as test oracles. These are kept
// deliberately naive (O(N^2) DFTs, brute-force sweeps) and must not reuse
// library code paths.

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

namespace oracle {

inline constexpr double kPi = 3.14159265358979323846;

// Unnormalized forward DFT, X[k] = sum_n x[n] e^{-j 2 pi k n / N}.
inline std::vector<std::complex<double>> dft(const std::vector<std::complex<double>>& x) {
  const size_t n = x.size();
  std::vector<std::complex<double>> out(n);
  for (size_t k = 0; k < n; ++k) {
    std::complex<double> acc{0, 0};
    for (size_t i = 0; i < n; ++i)
      acc += x[i] * std::polar(1.0, -2.0 * kPi * double(k) * double(i) / double(n));
    out[k] = acc;
  }
  return out;
}

template <typename C>
std::vector<std::complex<double>> to_cd(const C* x, size_t n) {
  std::vector<std::complex<double>> out(n);
  for (size_t i = 0; i < n; ++i) out[i] = {double(x[i].real()), double(x[i].imag())};
  return out;
}

// argmax of |X[k]| over k in [0, limit)
inline size_t argmax_mag(const std::vector<std::complex<double>>& x, size_t limit) {
  size_t best = 0;
  double best_mag = -1;
  for (size_t k = 0; k < limit && k < x.size(); ++k) {
    const double m = std::abs(x[k]);
    if (m > best_mag) {
      best_mag = m;
      best = k;
    }
  }
  return best;
}

}  // namespace oracle
