#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <complex>
#include <stdexcept>
#include <utility>
#include <vector>

#include "obhmc/array_model.hpp"

namespace obhmc {

struct HankelDims {
  Eigen::Index n1 = 0, n2 = 0;
};

/// Near-square lifting sizes with n1 + n2 = M + 1:
/// n1 = n2 = (M+1)/2 for odd M, (M/2, M/2 + 1) for even M.
inline HankelDims hankel_dims(Eigen::Index m) {
  if (m < 1) throw std::domain_error("hankel_dims: M must be >= 1");
  if (m % 2 == 1) return {(m + 1) / 2, (m + 1) / 2};
  return {m / 2, m / 2 + 1};
}

/// Observed entries of an n1 x n2 matrix, stored in row-major order without
/// duplicates. The stored order doubles as the vectorization order used by
/// the sampling operator.
struct ObservationSet {
  Eigen::Index n1 = 0, n2 = 0;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> indices;

  Eigen::Index count() const { return static_cast<Eigen::Index>(indices.size()); }
};

struct HankelLift {
  Eigen::MatrixXcd matrix;
  ObservationSet omega;
};

/// Lifts a snapshot to the Hankel matrix H(i, j) = x[i + j] (0-based) and
/// derives the observed entry set from the mask through the anti-diagonal
/// rule: (i, j) is observed iff element i + j is. Unobserved entries are
/// zero. Passing dims with n1 + n2 - 1 < M truncates the snapshot (used to
/// force a square matrix on an even-length grid).
inline HankelLift build_hankel(const Snapshot& x, HankelDims dims) {
  if (dims.n1 < 1 || dims.n2 < 1) throw std::domain_error("build_hankel: empty dimensions");
  if (dims.n1 + dims.n2 - 1 > x.size())
    throw std::domain_error("build_hankel: dimensions exceed snapshot length");
  HankelLift out;
  out.matrix.setZero(dims.n1, dims.n2);
  out.omega.n1 = dims.n1;
  out.omega.n2 = dims.n2;
  for (Eigen::Index i = 0; i < dims.n1; ++i)
    for (Eigen::Index j = 0; j < dims.n2; ++j)
      if (x.mask[static_cast<std::size_t>(i + j)]) {
        out.matrix(i, j) = x.values(i + j);
        out.omega.indices.emplace_back(i, j);
      }
  return out;
}

inline HankelLift build_hankel(const Snapshot& x) { return build_hankel(x, hankel_dims(x.size())); }

/// Recovers a length n1 + n2 - 1 vector by averaging each anti-diagonal.
/// Exact inverse of the lift on Hankel-consistent matrices.
inline Eigen::VectorXcd dehankel(const Eigen::MatrixXcd& h) {
  const Eigen::Index n1 = h.rows(), n2 = h.cols();
  if (n1 < 1 || n2 < 1) throw std::domain_error("dehankel: empty matrix");
  Eigen::VectorXcd x(n1 + n2 - 1);
  for (Eigen::Index k = 0; k < n1 + n2 - 1; ++k) {
    const Eigen::Index ilo = std::max<Eigen::Index>(0, k - n2 + 1);
    const Eigen::Index ihi = std::min(n1 - 1, k);
    std::complex<double> acc = 0.0;
    for (Eigen::Index i = ilo; i <= ihi; ++i) acc += h(i, k - i);
    x(k) = acc / static_cast<double>(ihi - ilo + 1);
  }
  return x;
}

/// Singular values in descending order (divide-and-conquer SVD; accurate
/// down to the machine noise floor, unlike the Gram-matrix shortcut used
/// by the solver's shrinkage step).
inline Eigen::VectorXd singular_values(const Eigen::MatrixXcd& m) {
  return Eigen::BDCSVD<Eigen::MatrixXcd>(m).singularValues();
}

struct RankCheck {
  Eigen::Index numerical_rank = 0;
  Eigen::VectorXd singular_values;
};

/// Checks the Vandermonde rank structure: the noiseless Hankel lift of a
/// P-target scene must have numerical rank P. Rank counts sigma_i
/// exceeding tol * sigma_1.
inline RankCheck verify_vandermonde_rank(const TargetScene& scene, Eigen::Index m,
                                         double tol = 1e-8) {
  scene.validate();
  const HankelDims d = hankel_dims(m);
  if (static_cast<Eigen::Index>(scene.targets.size()) > std::min(d.n1, d.n2))
    throw std::domain_error("verify_vandermonde_rank: more targets than min(n1, n2)");
  const Snapshot x = synthesize_snapshot(scene, m, 0.0, 0);
  RankCheck rc;
  rc.singular_values = singular_values(build_hankel(x).matrix);
  if (rc.singular_values.size() == 0) return rc;
  const double s1 = rc.singular_values(0);
  for (Eigen::Index i = 0; i < rc.singular_values.size(); ++i)
    if (rc.singular_values(i) > tol * s1) ++rc.numerical_rank;
  return rc;
}

}  // namespace obhmc
