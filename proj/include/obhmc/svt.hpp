#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "obhmc/quantization.hpp"

namespace obhmc {

/// Entry-sampling operator A and its adjoint A*. Vectorization follows the
/// observation set's stored order, so A(A*(y)) = y holds exactly.
class SamplingOperator {
public:
  explicit SamplingOperator(ObservationSet omega) : omega_(std::move(omega)) {
    if (omega_.n1 < 1 || omega_.n2 < 1) throw std::domain_error("SamplingOperator: empty shape");
    auto sorted = omega_.indices;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t k = 0; k < sorted.size(); ++k) {
      const auto& [i, j] = sorted[k];
      if (i < 0 || i >= omega_.n1 || j < 0 || j >= omega_.n2)
        throw std::domain_error("SamplingOperator: index out of range");
      if (k > 0 && sorted[k] == sorted[k - 1])
        throw std::domain_error("SamplingOperator: duplicate index");
    }
  }

  Eigen::Index rows() const { return omega_.n1; }
  Eigen::Index cols() const { return omega_.n2; }
  Eigen::Index sample_count() const { return omega_.count(); }
  const ObservationSet& omega() const { return omega_; }

  /// A: reads the observed entries into a length-m' vector.
  Eigen::VectorXcd forward(const Eigen::MatrixXcd& m) const {
    if (m.rows() != omega_.n1 || m.cols() != omega_.n2)
      throw std::domain_error("SamplingOperator: shape mismatch");
    Eigen::VectorXcd y(sample_count());
    Eigen::Index k = 0;
    for (const auto& [i, j] : omega_.indices) y(k++) = m(i, j);
    return y;
  }

  /// A*: scatters a length-m' vector back onto Omega, zero elsewhere.
  Eigen::MatrixXcd adjoint(const Eigen::VectorXcd& y) const {
    if (y.size() != sample_count()) throw std::domain_error("SamplingOperator: length mismatch");
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(omega_.n1, omega_.n2);
    Eigen::Index k = 0;
    for (const auto& [i, j] : omega_.indices) m(i, j) = y(k++);
    return m;
  }

private:
  ObservationSet omega_;
};

/// Singular value soft-shrinkage D_tau: singular subspaces are kept and
/// every singular value maps to (sigma - tau)+. Computed through the
/// Hermitian eigendecomposition of the smaller Gram matrix, which equals
/// the full SVD shrinkage: with M = U S V^H, the Gram factor yields the
/// weights (sigma - tau)+/sigma applied column- or row-wise.
inline Eigen::MatrixXcd shrink(const Eigen::MatrixXcd& m, double threshold) {
  if (!(threshold >= 0.0)) throw std::domain_error("shrink: threshold must be >= 0");
  if (!m.allFinite()) throw std::domain_error("shrink: non-finite entries");
  const bool rows_small = m.rows() <= m.cols();
  const Eigen::MatrixXcd gram = rows_small ? Eigen::MatrixXcd(m * m.adjoint())
                                           : Eigen::MatrixXcd(m.adjoint() * m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gram);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("shrink: eigendecomposition did not converge");
  const Eigen::Index n = gram.rows();
  Eigen::VectorXd weights(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double sigma = std::sqrt(std::max(eig.eigenvalues()(i), 0.0));
    weights(i) = sigma > threshold ? (sigma - threshold) / sigma : 0.0;
  }
  const Eigen::MatrixXcd& u = eig.eigenvectors();
  if (rows_small) return u * (weights.asDiagonal() * (u.adjoint() * m));
  return ((m * u) * weights.asDiagonal()) * u.adjoint();
}

struct SvtOptions {
  std::optional<double> threshold;  ///< shrinkage tau; default 5 sqrt(n1 n2)
  std::optional<double> step;       ///< dual step delta_k; default min(1.2 n1 n2 / m', 1.9)
  std::optional<double> tol;        ///< stop when ||A(X) - b|| / ||b|| <= tol; default 1e-4
  int max_iters = 500;
  Eigen::VectorXcd warm_start;      ///< y^(0); zero when empty
};

struct SvtResult {
  Eigen::MatrixXcd completed;
  std::vector<double> residuals;  ///< ||A(X^(k)) - b|| / ||b|| per iteration
  int iterations = 0;
  bool converged = false;  ///< true: tolerance reached, false: max_iters hit
  double threshold = 0.0;  ///< resolved shrinkage threshold
  double step = 0.0;       ///< resolved step size
  double tol = 0.0;        ///< resolved stopping tolerance
};

class DivergenceError : public std::runtime_error {
public:
  DivergenceError(const std::string& what, std::vector<double> residual_history)
      : std::runtime_error(what), residuals(std::move(residual_history)) {}
  std::vector<double> residuals;
};

/// SVT completion from data b = vec over Omega:
///   X^(k) = D_tau(A*(y^(k-1)))
///   y^(k) = y^(k-1) + delta_k (b - A(X^(k)))
/// starting from y^(0) = 0 unless a warm start is given. The default step
/// caps the classical 1.2 n1 n2 / m' at 1.9, inside the provably stable
/// range of the dual ascent; the uncapped value oscillates on sparsely
/// observed problems. Divergence (a residual above 10x the initial one for
/// 20 consecutive iterations, or a non-finite residual) raises
/// DivergenceError with the history attached.
inline SvtResult svt_complete(const Eigen::VectorXcd& b, const SamplingOperator& op,
                              SvtOptions opt = {}) {
  if (b.size() != op.sample_count())
    throw std::domain_error("svt_complete: data length != |Omega|");
  if (opt.max_iters < 1) throw std::domain_error("svt_complete: max_iters must be >= 1");

  SvtResult res;
  res.threshold =
      opt.threshold.value_or(5.0 * std::sqrt(static_cast<double>(op.rows() * op.cols())));
  res.step = opt.step.value_or(std::min(1.2 * static_cast<double>(op.rows() * op.cols()) /
                                            static_cast<double>(op.sample_count()),
                                        1.9));
  res.tol = opt.tol.value_or(1e-4);
  if (res.threshold < 0.0) throw std::domain_error("svt_complete: negative threshold");
  if (!(res.step > 0.0)) throw std::domain_error("svt_complete: step must be positive");
  if (!(res.tol > 0.0)) throw std::domain_error("svt_complete: tol must be positive");

  const double b_norm = b.norm();
  if (b_norm == 0.0) {  // zero data: the zero matrix is already the fixed point
    res.completed.setZero(op.rows(), op.cols());
    res.converged = true;
    return res;
  }

  Eigen::VectorXcd y;
  if (opt.warm_start.size() > 0) {
    if (opt.warm_start.size() != op.sample_count())
      throw std::domain_error("svt_complete: warm start length != |Omega|");
    y = opt.warm_start;
  } else {
    y = Eigen::VectorXcd::Zero(op.sample_count());
  }

  res.residuals.reserve(static_cast<std::size_t>(opt.max_iters));
  int bad_streak = 0;
  for (int k = 1; k <= opt.max_iters; ++k) {
    res.completed = shrink(op.adjoint(y), res.threshold);
    const Eigen::VectorXcd ax = op.forward(res.completed);
    y += res.step * (b - ax);
    const double rel = (ax - b).norm() / b_norm;
    res.residuals.push_back(rel);
    res.iterations = k;
    if (!std::isfinite(rel))
      throw DivergenceError("svt_complete: non-finite residual at iteration " + std::to_string(k),
                            res.residuals);
    bad_streak = rel > 10.0 * res.residuals.front() ? bad_streak + 1 : 0;
    if (bad_streak >= 20)
      throw DivergenceError(
          "svt_complete: residual exceeded 10x the initial value for 20 consecutive iterations",
          res.residuals);
    if (rel <= res.tol) {
      res.converged = true;
      break;
    }
  }
  return res;
}

/// Builds b = vec((Delta/2) R over Omega), assembles the operator, and runs
/// the SVT solve. Pure composition, no hidden state.
inline SvtResult complete_hankel_pipeline(const OneBitObservation& obs, SvtOptions opt = {}) {
  if (obs.omega.indices.empty())
    throw std::domain_error("complete_hankel_pipeline: empty observation set");
  if (!(obs.delta > 0.0))
    throw std::domain_error("complete_hankel_pipeline: dither scale unset");
  SamplingOperator op(obs.omega);
  const Eigen::VectorXcd b = op.forward(obs.signs) * (obs.delta / 2.0);
  return svt_complete(b, op, std::move(opt));
}

}  // namespace obhmc
