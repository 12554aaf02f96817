#pragma once

#include <Eigen/Dense>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace obhmc {

inline bool is_power_of_two(Eigen::Index n) { return n > 0 && (n & (n - 1)) == 0; }

/// In-place iterative radix-2 FFT with the unnormalized forward kernel
/// e^{-j 2 pi k n / N}. Length must be a power of two.
inline void fft_inplace(Eigen::VectorXcd& a) {
  const Eigen::Index n = a.size();
  if (!is_power_of_two(n)) throw std::domain_error("fft_inplace: length must be a power of two");
  for (Eigen::Index i = 1, j = 0; i < n; ++i) {
    Eigen::Index bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j |= bit;
    if (i < j) std::swap(a(i), a(j));
  }
  for (Eigen::Index len = 2; len <= n; len <<= 1) {
    const std::complex<double> wlen =
        std::polar(1.0, -2.0 * std::numbers::pi / static_cast<double>(len));
    for (Eigen::Index i = 0; i < n; i += len) {
      std::complex<double> w = 1.0;
      for (Eigen::Index k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a(i + k);
        const std::complex<double> v = a(i + k + len / 2) * w;
        a(i + k) = u + v;
        a(i + k + len / 2) = u - v;
        w *= wlen;
      }
    }
  }
}

/// Zero-pads x to n_fft and returns the forward DFT.
inline Eigen::VectorXcd fft_forward(const Eigen::VectorXcd& x, Eigen::Index n_fft) {
  if (n_fft < x.size()) throw std::domain_error("fft_forward: n_fft smaller than the input");
  if (!is_power_of_two(n_fft)) throw std::domain_error("fft_forward: n_fft must be a power of two");
  Eigen::VectorXcd a = Eigen::VectorXcd::Zero(n_fft);
  a.head(x.size()) = x;
  fft_inplace(a);
  return a;
}

}  // namespace obhmc
