#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "obhmc/parallel.hpp"
#include "obhmc/quantization.hpp"
#include "obhmc/rng.hpp"
#include "obhmc/svt.hpp"

namespace obhmc::theory {

/// Average distortion between observed entries and scaled one-bit values:
/// T_ave = (1/m') sum_Omega |X_ij - (Delta/2) R_ij|. One real channel;
/// complex data goes through twice, once per channel.
inline double t_ave(const Eigen::MatrixXd& x, const Eigen::MatrixXd& r,
                    const ObservationSet& omega, double delta) {
  if (omega.indices.empty()) throw std::domain_error("t_ave: empty observation set");
  if (x.rows() != omega.n1 || x.cols() != omega.n2 || r.rows() != omega.n1 ||
      r.cols() != omega.n2)
    throw std::domain_error("t_ave: shape mismatch");
  double acc = 0.0;
  for (const auto& [i, j] : omega.indices) {
    if (r(i, j) != 1.0 && r(i, j) != -1.0)
      throw std::domain_error("t_ave: signs must be +-1 on Omega");
    acc += std::abs(x(i, j) - 0.5 * delta * r(i, j));
  }
  return acc / static_cast<double>(omega.count());
}

struct TAveChannels {
  double real_channel = 0.0;
  double imag_channel = 0.0;
};

/// Complex data goes through the distortion average once per channel.
inline TAveChannels t_ave(const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& signs,
                          const ObservationSet& omega, double delta) {
  return {t_ave(Eigen::MatrixXd(x.real()), Eigen::MatrixXd(signs.real()), omega, delta),
          t_ave(Eigen::MatrixXd(x.imag()), Eigen::MatrixXd(signs.imag()), omega, delta)};
}

/// E_tau |x - alpha sign(x - tau)| = alpha - x^2/alpha for |x| <= alpha,
/// tau uniform on [-alpha, alpha].
inline double expected_distortion(double x, double alpha) {
  if (!(alpha > 0.0)) throw std::domain_error("expected_distortion: alpha must be positive");
  if (std::abs(x) > alpha) throw std::domain_error("expected_distortion: |x| must be <= alpha");
  return alpha - x * x / alpha;
}

struct TAveExpectation {
  double conditional = 0.0;  ///< alpha - ||P_Omega(X)||_F^2 / (alpha m'), Omega fixed
  double full = 0.0;         ///< alpha - ||X||_F^2 / (alpha n1 n2), (i,j) uniform
};

/// Both expectations of T_ave over the dither (and, for `full`, over
/// uniformly random entry positions). Requires ||X||_max <= alpha.
inline TAveExpectation expected_t_ave(const Eigen::MatrixXd& x, const ObservationSet& omega,
                                      double alpha) {
  if (omega.indices.empty()) throw std::domain_error("expected_t_ave: empty observation set");
  if (x.rows() != omega.n1 || x.cols() != omega.n2)
    throw std::domain_error("expected_t_ave: shape mismatch");
  if (!(alpha > 0.0)) throw std::domain_error("expected_t_ave: alpha must be positive");
  if (x.cwiseAbs().maxCoeff() > alpha)
    throw std::domain_error("expected_t_ave: ||X||_max must be <= alpha");
  double on_omega = 0.0;
  for (const auto& [i, j] : omega.indices) on_omega += x(i, j) * x(i, j);
  TAveExpectation e;
  e.conditional = alpha - on_omega / (alpha * static_cast<double>(omega.count()));
  e.full = alpha - x.squaredNorm() / (alpha * static_cast<double>(x.rows() * x.cols()));
  return e;
}

/// Consistency of uniform quantization on one real channel: X and Y
/// quantize identically on Omega under the shared dither.
inline bool check_consistency(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                              const ObservationSet& omega, const Eigen::MatrixXd& tau,
                              double delta) {
  if (x.rows() != omega.n1 || x.cols() != omega.n2 || y.rows() != omega.n1 ||
      y.cols() != omega.n2 || tau.rows() != omega.n1 || tau.cols() != omega.n2)
    throw std::domain_error("check_consistency: shape mismatch");
  for (const auto& [i, j] : omega.indices)
    if (uniform_quantize(x(i, j), delta, -tau(i, j)) !=
        uniform_quantize(y(i, j), delta, -tau(i, j)))
      return false;
  return true;
}

/// Consistency over both channels of complex data.
inline bool check_consistency(const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& y,
                              const ObservationSet& omega, const DitherMatrix& dither) {
  return check_consistency(Eigen::MatrixXd(x.real()), Eigen::MatrixXd(y.real()), omega,
                           dither.real_part, dither.delta) &&
         check_consistency(Eigen::MatrixXd(x.imag()), Eigen::MatrixXd(y.imag()), omega,
                           dither.imag_part, dither.delta);
}

/// Recovery error budget 2 sqrt(8 eps alpha n1 n2).
inline double recovery_error_bound(double epsilon, double alpha, Eigen::Index n1,
                                   Eigen::Index n2) {
  if (epsilon < 0.0 || !(alpha > 0.0) || n1 < 1 || n2 < 1)
    throw std::domain_error("recovery_error_bound: invalid arguments");
  return 2.0 * std::sqrt(8.0 * epsilon * alpha * static_cast<double>(n1) *
                         static_cast<double>(n2));
}

/// One-bit sample requirement ceil(c eps^{-5/2} r max(n1, n2)), with the
/// hidden constant exposed as c.
inline long long sample_complexity(double epsilon, Eigen::Index rank, Eigen::Index n1,
                                   Eigen::Index n2, double constant = 1.0) {
  if (!(epsilon > 0.0) || rank < 1 || n1 < 1 || n2 < 1 || !(constant > 0.0))
    throw std::domain_error("sample_complexity: invalid arguments");
  return static_cast<long long>(std::ceil(constant * std::pow(epsilon, -2.5) *
                                          static_cast<double>(rank) *
                                          static_cast<double>(std::max(n1, n2))));
}

struct HoeffdingTail {
  double pointwise = 0.0;  ///< 2 exp(-eps^2 m' / (2 alpha^2)), fixed X
  double supremum = 0.0;   ///< 2 exp(-eps^2 m' / (4 alpha^2)), sup over the rank-r ball
};

inline HoeffdingTail hoeffding_tail(double epsilon, long long m_prime, double alpha) {
  if (!(epsilon > 0.0) || m_prime < 1 || !(alpha > 0.0))
    throw std::domain_error("hoeffding_tail: invalid arguments");
  const double e2m = epsilon * epsilon * static_cast<double>(m_prime);
  return {2.0 * std::exp(-e2m / (2.0 * alpha * alpha)),
          2.0 * std::exp(-e2m / (4.0 * alpha * alpha))};
}

struct CoveringBounds {
  double log_covering = 0.0;  ///< (n1 + n2) r log(1 + 2 alpha sqrt(n1 n2) / rho)
  double entropy = 0.0;       ///< 2 alpha (n1 + n2) r sqrt(n1 n2) / rho
};

/// Log covering number of the bounded rank-r set and the looser entropy
/// bound; the former never exceeds the latter (log(1 + x) <= x).
inline CoveringBounds covering_bounds(double alpha, Eigen::Index rank, Eigen::Index n1,
                                      Eigen::Index n2, double rho) {
  if (!(alpha > 0.0) || rank < 1 || n1 < 1 || n2 < 1 || !(rho > 0.0))
    throw std::domain_error("covering_bounds: invalid arguments");
  const double dim = static_cast<double>((n1 + n2) * rank);
  const double root = std::sqrt(static_cast<double>(n1) * static_cast<double>(n2));
  CoveringBounds cb;
  cb.log_covering = dim * std::log1p(2.0 * alpha * root / rho);
  cb.entropy = 2.0 * alpha * dim * root / rho;
  if (cb.log_covering > cb.entropy * (1.0 + 1e-12) + 1e-12)
    throw std::runtime_error("covering_bounds: log-covering bound exceeded the entropy bound");
  return cb;
}

struct HoeffdingEmpirical {
  double epsilon = 0.0;
  double bound_pointwise = 0.0;
  double empirical = 0.0;
  long long exceed_count = 0;
};

/// Empirical tail of |T_ave - E T_ave| under the iid model matching the
/// Hoeffding step: each of the m' samples draws an entry position uniformly
/// with replacement and a fresh dither. Requires ||X||_max <= alpha.
inline std::vector<HoeffdingEmpirical> hoeffding_empirical_tail(
    const Eigen::MatrixXd& x, Eigen::Index m_prime, double alpha,
    const std::vector<double>& eps_grid, int trials, std::uint64_t seed) {
  if (m_prime < 1 || trials < 1)
    throw std::domain_error("hoeffding_empirical_tail: invalid arguments");
  if (!(alpha > 0.0) || x.cwiseAbs().maxCoeff() > alpha)
    throw std::domain_error("hoeffding_empirical_tail: ||X||_max must be <= alpha");
  const Eigen::Index n1 = x.rows(), n2 = x.cols();
  const double mean_full =
      alpha - x.squaredNorm() / (alpha * static_cast<double>(n1 * n2));
  Rng rng(seed);
  std::vector<double> deviations(static_cast<std::size_t>(trials));
  for (int t = 0; t < trials; ++t) {
    double acc = 0.0;
    for (Eigen::Index s = 0; s < m_prime; ++s) {
      const auto idx = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n1 * n2)));
      const double xi = x(idx / n2, idx % n2);
      const double tau = rng.uniform(-alpha, alpha);
      acc += std::abs(xi - alpha * sign_plus(xi - tau));
    }
    deviations[static_cast<std::size_t>(t)] =
        std::abs(acc / static_cast<double>(m_prime) - mean_full);
  }
  std::vector<HoeffdingEmpirical> out;
  out.reserve(eps_grid.size());
  for (double eps : eps_grid) {
    HoeffdingEmpirical he;
    he.epsilon = eps;
    he.bound_pointwise = hoeffding_tail(eps, m_prime, alpha).pointwise;
    he.exceed_count = std::count_if(deviations.begin(), deviations.end(),
                                    [&](double d) { return d >= eps; });
    he.empirical = static_cast<double>(he.exceed_count) / static_cast<double>(trials);
    out.push_back(he);
  }
  return out;
}

struct TheoremConfig {
  Eigen::Index n1 = 20, n2 = 20;
  Eigen::Index rank = 2;
  double epsilon = 0.4;
  double alpha = 1.0;
  double constant = 1.0;     ///< stand-in for the hidden constant in the sample bound
  Eigen::Index m_prime = 0;  ///< 0: sample_complexity(...), clamped to n1 n2
  int trials = 200;
  std::uint64_t seed = 1;
  double rho = 0.0;          ///< 0: proof coupling sqrt(8 eps alpha n1 n2)
  SvtOptions solver{};
};

struct TheoremTrialResult {
  double error = 0.0;  ///< ||X - Xbar||_F on the real channel
  bool consistent = false;
  bool within_bound = false;
  bool solver_failed = false;
  double parallelogram_rel = 0.0;
  double implied_epsilon = 0.0;
};

struct TheoremReport {
  Eigen::Index m_prime = 0;
  double bound = 0.0;
  double rho = 0.0;
  int trials = 0;
  int solver_failures = 0;
  int consistent_count = 0;
  int violations_consistent = 0;
  int violations_total = 0;
  double failure_probability_theorem = 0.0;  ///< 4 exp(-eps^2 m' / Delta^2)
  double failure_probability_lemma = 0.0;    ///< 4 exp(-eps^2 m' / (4 alpha^2))
  double max_parallelogram_rel = 0.0;
  double median_error = 0.0;
  double median_implied_epsilon = 0.0;
  long long implied_m_prime = 0;  ///< sample requirement at the median implied epsilon
  CoveringBounds covering{};
  std::vector<TheoremTrialResult> trial_results;
};

namespace detail {

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace detail

/// Monte Carlo check of the recovery guarantee on the real channel: random
/// rank-r matrices with ||X||_max = alpha, uniformly sampled observation
/// sets (without replacement), dithered signs with Delta = 2 alpha, SVT
/// reconstruction, and per-trial consistency, error-vs-bound, and
/// parallelogram-identity records. Non-consistent reconstructions are
/// counted and reported, never hidden. Note the structured Hankel sampling
/// of the radar pipeline is outside these hypotheses; this validator uses
/// the uniform model the guarantee assumes.
inline TheoremReport validate_theorem(const TheoremConfig& cfg) {
  if (cfg.n1 < 2 || cfg.n2 < 2) throw std::domain_error("validate_theorem: dimensions too small");
  if (cfg.rank < 1 || cfg.rank > std::min(cfg.n1, cfg.n2))
    throw std::domain_error("validate_theorem: invalid rank");
  if (!(cfg.epsilon > 0.0) || !(cfg.alpha > 0.0) || cfg.trials < 1)
    throw std::domain_error("validate_theorem: invalid arguments");

  const Eigen::Index total = cfg.n1 * cfg.n2;
  Eigen::Index m_prime = cfg.m_prime;
  if (m_prime <= 0)
    m_prime = std::min<Eigen::Index>(
        static_cast<Eigen::Index>(
            sample_complexity(cfg.epsilon, cfg.rank, cfg.n1, cfg.n2, cfg.constant)),
        total);
  m_prime = std::clamp<Eigen::Index>(m_prime, 1, total);

  const double delta = 2.0 * cfg.alpha;
  TheoremReport rep;
  rep.m_prime = m_prime;
  rep.trials = cfg.trials;
  rep.bound = recovery_error_bound(cfg.epsilon, cfg.alpha, cfg.n1, cfg.n2);
  rep.rho = cfg.rho > 0.0 ? cfg.rho : rep.bound / 2.0;
  rep.covering = covering_bounds(cfg.alpha, cfg.rank, cfg.n1, cfg.n2, rep.rho);
  const double e2m = cfg.epsilon * cfg.epsilon * static_cast<double>(m_prime);
  rep.failure_probability_theorem = 4.0 * std::exp(-e2m / (delta * delta));
  rep.failure_probability_lemma = 4.0 * std::exp(-e2m / (4.0 * cfg.alpha * cfg.alpha));
  rep.trial_results.resize(static_cast<std::size_t>(cfg.trials));

  parallel_for_index(cfg.trials, [&](int t) {
    TheoremTrialResult& tr = rep.trial_results[static_cast<std::size_t>(t)];
    const std::uint64_t base = cfg.seed + static_cast<std::uint64_t>(t);

    Rng gen = Rng::stream(base, SeedStream::noise);
    Eigen::MatrixXd g1(cfg.n1, cfg.rank), g2(cfg.n2, cfg.rank);
    for (Eigen::Index i = 0; i < cfg.n1; ++i)
      for (Eigen::Index r = 0; r < cfg.rank; ++r) g1(i, r) = gen.gaussian();
    for (Eigen::Index j = 0; j < cfg.n2; ++j)
      for (Eigen::Index r = 0; r < cfg.rank; ++r) g2(j, r) = gen.gaussian();
    Eigen::MatrixXd x = g1 * g2.transpose();
    x *= cfg.alpha / x.cwiseAbs().maxCoeff();

    Rng omega_rng = Rng::stream(base, SeedStream::omega);
    std::vector<Eigen::Index> linear(static_cast<std::size_t>(total));
    for (Eigen::Index i = 0; i < total; ++i) linear[static_cast<std::size_t>(i)] = i;
    for (Eigen::Index i = 0; i < m_prime; ++i) {
      const auto pick =
          i + static_cast<Eigen::Index>(omega_rng.below(static_cast<std::uint64_t>(total - i)));
      std::swap(linear[static_cast<std::size_t>(i)], linear[static_cast<std::size_t>(pick)]);
    }
    linear.resize(static_cast<std::size_t>(m_prime));
    std::sort(linear.begin(), linear.end());
    ObservationSet omega;
    omega.n1 = cfg.n1;
    omega.n2 = cfg.n2;
    for (Eigen::Index idx : linear) omega.indices.emplace_back(idx / cfg.n2, idx % cfg.n2);

    const DitherMatrix dither =
        DitherMatrix::generate(cfg.n1, cfg.n2, delta,
                               base + static_cast<std::uint64_t>(SeedStream::dither));

    Eigen::MatrixXd signs = Eigen::MatrixXd::Zero(cfg.n1, cfg.n2);
    for (const auto& [i, j] : omega.indices)
      signs(i, j) = sign_plus(x(i, j) - dither.real_part(i, j));

    SamplingOperator op(omega);
    Eigen::VectorXcd b(m_prime);
    Eigen::Index k = 0;
    for (const auto& [i, j] : omega.indices) b(k++) = cfg.alpha * signs(i, j);

    Eigen::MatrixXd xbar;
    try {
      xbar = svt_complete(b, op, cfg.solver).completed.real();
    } catch (const std::exception&) {
      tr.solver_failed = true;
      return;
    }

    tr.error = (x - xbar).norm();
    tr.within_bound = tr.error <= rep.bound;
    tr.consistent = check_consistency(x, xbar, omega, dither.real_part, delta);
    const double lhs = (x - xbar).squaredNorm();
    const double rhs =
        2.0 * (x.squaredNorm() + xbar.squaredNorm()) - (x + xbar).squaredNorm();
    tr.parallelogram_rel = std::abs(lhs - rhs) / std::max(lhs, 1e-300);
    tr.implied_epsilon = tr.error * tr.error /
                         (32.0 * cfg.alpha * static_cast<double>(cfg.n1) *
                          static_cast<double>(cfg.n2));
  });

  std::vector<double> errors, implied;
  for (const TheoremTrialResult& tr : rep.trial_results) {
    if (tr.solver_failed) {
      ++rep.solver_failures;
      continue;
    }
    errors.push_back(tr.error);
    implied.push_back(tr.implied_epsilon);
    rep.max_parallelogram_rel = std::max(rep.max_parallelogram_rel, tr.parallelogram_rel);
    if (tr.consistent) {
      ++rep.consistent_count;
      if (!tr.within_bound) ++rep.violations_consistent;
    }
    if (!tr.within_bound) ++rep.violations_total;
  }
  rep.median_error = detail::median(errors);
  rep.median_implied_epsilon = detail::median(implied);
  rep.implied_m_prime =
      rep.median_implied_epsilon > 0.0
          ? sample_complexity(rep.median_implied_epsilon, cfg.rank, cfg.n1, cfg.n2, cfg.constant)
          : 0;
  return rep;
}

}  // namespace obhmc::theory
