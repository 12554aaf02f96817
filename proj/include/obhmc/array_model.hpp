#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "obhmc/rng.hpp"

namespace obhmc {

struct Target {
  double azimuth_deg = 0.0;
  double amplitude = 1.0;
  double phase_rad = 0.0;
};

/// Far-field point-target scene observed by a linear array on a regular
/// grid. Azimuths live strictly inside (-90, 90) degrees and must be
/// pairwise distinct.
struct TargetScene {
  std::vector<Target> targets;
  double spacing = 0.5;  ///< element spacing in wavelengths

  void validate() const {
    if (targets.empty()) throw std::domain_error("TargetScene: at least one target required");
    if (!(spacing > 0.0)) throw std::domain_error("TargetScene: spacing must be positive");
    for (const Target& t : targets) {
      if (!(std::abs(t.azimuth_deg) < 90.0))
        throw std::domain_error("TargetScene: azimuth must lie strictly inside (-90, 90) degrees");
      if (!(t.amplitude > 0.0)) throw std::domain_error("TargetScene: amplitude must be positive");
    }
    for (std::size_t i = 0; i < targets.size(); ++i)
      for (std::size_t j = i + 1; j < targets.size(); ++j)
        if (targets[i].azimuth_deg == targets[j].azimuth_deg)
          throw std::domain_error("TargetScene: duplicate azimuths");
  }
};

/// Single-snapshot array response. Entries whose mask bit is false are
/// exactly zero.
struct Snapshot {
  Eigen::VectorXcd values;
  std::vector<bool> mask;

  Eigen::Index size() const { return values.size(); }
  Eigen::Index observed_count() const {
    return static_cast<Eigen::Index>(std::count(mask.begin(), mask.end(), true));
  }
};

/// MIMO array geometry: physical TX/RX element positions on the
/// half-wavelength grid and the derived virtual element index set,
/// normalized so the smallest virtual index is 0.
struct ArrayGeometry {
  std::vector<int> tx_positions;
  std::vector<int> rx_positions;
  std::vector<int> virtual_positions;  ///< sorted, unique, 0-based
  int grid_size = 0;                   ///< number of ULA grid points spanned (M)
};

/// a(theta): entry k is exp(j 2 pi k d sin(theta) / lambda), k = 0..M-1.
inline Eigen::VectorXcd steering_vector(double azimuth_deg, Eigen::Index m, double spacing = 0.5) {
  if (m < 1) throw std::domain_error("steering_vector: M must be >= 1");
  if (!(std::abs(azimuth_deg) < 90.0))
    throw std::domain_error("steering_vector: azimuth must lie strictly inside (-90, 90) degrees");
  const double phase_step =
      2.0 * std::numbers::pi * spacing * std::sin(azimuth_deg * std::numbers::pi / 180.0);
  Eigen::VectorXcd a(m);
  for (Eigen::Index k = 0; k < m; ++k) a(k) = std::polar(1.0, phase_step * static_cast<double>(k));
  return a;
}

/// x = sum_k sigma_k e^{j phi_k} a(theta_k) + n, with circular complex AWGN
/// of per-entry total variance `noise_variance` (half per part).
/// Deterministic for a fixed seed; the returned mask is all-true.
inline Snapshot synthesize_snapshot(const TargetScene& scene, Eigen::Index m,
                                    double noise_variance, std::uint64_t seed) {
  scene.validate();
  if (noise_variance < 0.0) throw std::domain_error("synthesize_snapshot: negative noise variance");
  Eigen::VectorXcd x = Eigen::VectorXcd::Zero(m);
  for (const Target& t : scene.targets)
    x += std::polar(t.amplitude, t.phase_rad) * steering_vector(t.azimuth_deg, m, scene.spacing);
  if (noise_variance > 0.0) {
    Rng rng(seed);
    for (Eigen::Index k = 0; k < m; ++k) x(k) += rng.complex_gaussian(noise_variance);
  }
  return Snapshot{std::move(x), std::vector<bool>(static_cast<std::size_t>(m), true)};
}

/// Virtual array of a MIMO transceiver: all pairwise TX+RX position sums,
/// deduplicated and shifted so the smallest index is 0. grid_size is the
/// span max - min + 1 of the underlying ULA grid.
inline ArrayGeometry virtual_array(std::vector<int> tx, std::vector<int> rx) {
  if (tx.empty() || rx.empty()) throw std::domain_error("virtual_array: empty position list");
  for (int p : tx)
    if (p < 0) throw std::domain_error("virtual_array: negative TX position");
  for (int p : rx)
    if (p < 0) throw std::domain_error("virtual_array: negative RX position");
  std::set<int> sums;
  for (int t : tx)
    for (int r : rx) sums.insert(t + r);
  const int lo = *sums.begin();
  const int hi = *sums.rbegin();
  ArrayGeometry g;
  g.tx_positions = std::move(tx);
  g.rx_positions = std::move(rx);
  g.virtual_positions.reserve(sums.size());
  for (int s : sums) g.virtual_positions.push_back(s - lo);
  g.grid_size = hi - lo + 1;
  return g;
}

/// Keeps entries at virtual element indices, zeroes the rest, and updates
/// the mask. Idempotent.
inline Snapshot apply_mask(const Snapshot& x, const ArrayGeometry& geom) {
  if (x.size() != geom.grid_size) throw std::domain_error("apply_mask: length mismatch");
  Snapshot out;
  out.values = Eigen::VectorXcd::Zero(x.size());
  out.mask.assign(static_cast<std::size_t>(x.size()), false);
  for (int idx : geom.virtual_positions) {
    if (x.mask[static_cast<std::size_t>(idx)]) {
      out.values(idx) = x.values(idx);
      out.mask[static_cast<std::size_t>(idx)] = true;
    }
  }
  return out;
}

}  // namespace obhmc
