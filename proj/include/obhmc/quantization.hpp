#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "obhmc/hankel.hpp"
#include "obhmc/rng.hpp"

namespace obhmc {

/// Sign with the fixed tie rule sign(0) = +1.
inline double sign_plus(double v) { return v < 0.0 ? -1.0 : 1.0; }

/// Uniform dither threshold matrix. Both parts are U[-delta/2, delta/2],
/// drawn from one seeded generator in row-major entry order, real part
/// before imaginary part, so the matrix regenerates bit-exactly from
/// (seed, delta, shape).
struct DitherMatrix {
  Eigen::MatrixXd real_part;
  Eigen::MatrixXd imag_part;
  double delta = 0.0;
  std::uint64_t seed = 0;

  static DitherMatrix generate(Eigen::Index n1, Eigen::Index n2, double delta,
                               std::uint64_t seed) {
    if (n1 < 1 || n2 < 1) throw std::domain_error("DitherMatrix: empty shape");
    if (!(delta > 0.0)) throw std::domain_error("DitherMatrix: delta must be positive");
    DitherMatrix d;
    d.real_part.resize(n1, n2);
    d.imag_part.resize(n1, n2);
    d.delta = delta;
    d.seed = seed;
    Rng rng(seed);
    const double half = delta / 2.0;
    for (Eigen::Index i = 0; i < n1; ++i)
      for (Eigen::Index j = 0; j < n2; ++j) {
        d.real_part(i, j) = rng.uniform(-half, half);
        d.imag_part(i, j) = rng.uniform(-half, half);
      }
    return d;
  }
};

/// One-bit comparator outputs: entries are +-1 +- j on the observed set and
/// exactly zero elsewhere, kept together with the dither scale and the
/// observation set that produced them.
struct OneBitObservation {
  Eigen::MatrixXcd signs;
  double delta = 0.0;
  ObservationSet omega;
};

/// Q_Delta(x) = Delta (floor((x + tau)/Delta) + 1/2).
inline double uniform_quantize(double x, double delta, double tau) {
  if (!(delta > 0.0)) throw std::domain_error("uniform_quantize: delta must be positive");
  return delta * (std::floor((x + tau) / delta) + 0.5);
}

/// r_{ij} = sign(Re X_{ij} - tau^R_{ij}) + j sign(Im X_{ij} - tau^I_{ij})
/// on the observed set; zero elsewhere. Ties resolve to +1.
inline OneBitObservation one_bit_quantize(const Eigen::MatrixXcd& h, const ObservationSet& omega,
                                          const DitherMatrix& dither) {
  if (h.rows() != omega.n1 || h.cols() != omega.n2 || h.rows() != dither.real_part.rows() ||
      h.cols() != dither.real_part.cols())
    throw std::domain_error("one_bit_quantize: shape mismatch");
  if (!(dither.delta > 0.0)) throw std::domain_error("one_bit_quantize: dither scale unset");
  OneBitObservation out;
  out.signs.setZero(omega.n1, omega.n2);
  out.delta = dither.delta;
  out.omega = omega;
  for (const auto& [i, j] : omega.indices)
    out.signs(i, j) = {sign_plus(h(i, j).real() - dither.real_part(i, j)),
                       sign_plus(h(i, j).imag() - dither.imag_part(i, j))};
  return out;
}

/// Dynamic-range collapse of the dithered uniform quantizer to a one-bit
/// comparator: Q_Delta(x; -tau) == (Delta/2) sign(x - tau) whenever
/// |x| <= Delta/2 and |tau| <= Delta/2. Throws outside that range, where
/// the identity is not guaranteed.
inline bool verify_onebit_equivalence(double x, double delta, double tau) {
  if (!(delta > 0.0)) throw std::domain_error("verify_onebit_equivalence: delta must be positive");
  if (std::abs(x) > delta / 2.0 || std::abs(tau) > delta / 2.0)
    throw std::domain_error("verify_onebit_equivalence: |x| and |tau| must be <= delta/2");
  return uniform_quantize(x, delta, -tau) == (delta / 2.0) * sign_plus(x - tau);
}

/// Smallest dither scale (plus headroom) dominating the observed dynamic
/// range: Delta = 2 (1 + margin) max_Omega max(|Re|, |Im|).
inline double design_dither_scale(const Eigen::MatrixXcd& h, const ObservationSet& omega,
                                  double margin = 0.05) {
  if (omega.indices.empty()) throw std::domain_error("design_dither_scale: empty observation set");
  if (margin < 0.0) throw std::domain_error("design_dither_scale: negative margin");
  double peak = 0.0;
  for (const auto& [i, j] : omega.indices)
    peak = std::max({peak, std::abs(h(i, j).real()), std::abs(h(i, j).imag())});
  if (peak == 0.0)
    throw std::domain_error("design_dither_scale: all observed entries are zero");
  return 2.0 * (1.0 + margin) * peak;
}

}  // namespace obhmc
