#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "obhmc/array_model.hpp"
#include "obhmc/hankel.hpp"
#include "obhmc/parallel.hpp"
#include "obhmc/quantization.hpp"
#include "obhmc/spectrum.hpp"
#include "obhmc/svt.hpp"
#include "obhmc/theory.hpp"

namespace obhmc {

/// Default stopping residual for SVT on one-bit data when the config leaves
/// the solver tolerance unset. The relative residual against sign data
/// bottoms out near the quantization noise level, not at zero.
inline constexpr double kOneBitStopResidual = 0.7;

struct GeometryConfig {
  std::vector<int> tx{1, 19, 37, 55, 79, 91};
  std::vector<int> rx{12, 22, 25, 39, 58, 62, 70, 73};
};

struct SceneConfig {
  std::vector<double> azimuths_deg{-57.0, -34.0};
  std::vector<double> amplitudes{};  ///< empty: all ones
  std::vector<double> phases_rad{};  ///< empty: all zeros
  double snr_db = 20.0;
  bool noiseless = false;
  double spacing = 0.5;
};

struct QuantizationConfig {
  std::string mode = "auto";  ///< auto | explicit | bypass
  double margin = 0.05;
  double delta = 0.0;  ///< used when mode == explicit
};

struct SpectrumConfig {
  Eigen::Index n_fft = 4096;
  int peak_count = 2;
  double min_separation_deg = 5.0;
  double detection_tol_deg = 1.0;
};

/// Range/velocity bookkeeping carried through reports; never enters the
/// angle-domain math.
struct MetadataConfig {
  double range_m = 100.0;
  double velocity_mps = -10.0;
};

struct ExperimentConfig {
  GeometryConfig geometry{};
  SceneConfig scene{};
  QuantizationConfig quantization{};
  SvtOptions solver{};
  SpectrumConfig spectrum{};
  bool hankel_force_square = false;
  std::uint64_t seed = 1;
  int trials = 50;
  MetadataConfig metadata{};

  double noise_variance() const {
    return scene.noiseless ? 0.0 : std::pow(10.0, -scene.snr_db / 10.0);
  }

  TargetScene to_scene() const {
    TargetScene s;
    s.spacing = scene.spacing;
    for (std::size_t k = 0; k < scene.azimuths_deg.size(); ++k) {
      Target t;
      t.azimuth_deg = scene.azimuths_deg[k];
      t.amplitude = k < scene.amplitudes.size() ? scene.amplitudes[k] : 1.0;
      t.phase_rad = k < scene.phases_rad.size() ? scene.phases_rad[k] : 0.0;
      s.targets.push_back(t);
    }
    return s;
  }

  void validate() const {
    if (geometry.tx.empty() || geometry.rx.empty())
      throw std::invalid_argument("config: geometry position lists must be nonempty");
    if (scene.azimuths_deg.empty())
      throw std::invalid_argument("config: scene needs at least one target");
    if (!scene.amplitudes.empty() && scene.amplitudes.size() != scene.azimuths_deg.size())
      throw std::invalid_argument("config: amplitudes length must match azimuths");
    if (!scene.phases_rad.empty() && scene.phases_rad.size() != scene.azimuths_deg.size())
      throw std::invalid_argument("config: phases length must match azimuths");
    if (quantization.mode != "auto" && quantization.mode != "explicit" &&
        quantization.mode != "bypass")
      throw std::invalid_argument("config: quantization mode must be auto, explicit, or bypass");
    if (quantization.mode == "explicit" && !(quantization.delta > 0.0))
      throw std::invalid_argument("config: explicit quantization requires delta > 0");
    if (quantization.margin < 0.0) throw std::invalid_argument("config: negative dither margin");
    if (!is_power_of_two(spectrum.n_fft))
      throw std::invalid_argument("config: n_fft must be a power of two");
    if (spectrum.peak_count < 1) throw std::invalid_argument("config: peak_count must be >= 1");
    if (!(spectrum.min_separation_deg >= 0.0) || !(spectrum.detection_tol_deg > 0.0))
      throw std::invalid_argument("config: bad spectrum tolerances");
    if ((solver.tol && !(*solver.tol > 0.0)) || solver.max_iters < 1)
      throw std::invalid_argument("config: bad solver settings");
    if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
    try {
      to_scene().validate();
    } catch (const std::domain_error& e) {
      throw std::invalid_argument(std::string("config: ") + e.what());
    }
  }
};

/// Error-budget cross-check attached to each run. The epsilon is implied by
/// inverting the recovery bound at the observed error, and the sampling
/// label records that the Hankel/SLA observation pattern sits outside the
/// guarantee's uniform-sampling hypothesis.
struct TheoryEvaluation {
  double bound = 0.0;
  long long m_prime = 0;
  bool satisfied = false;
  double alpha = 0.0;
  double epsilon_implied = 0.0;
  long long m_prime_required = 0;
  std::string sampling = "structured-hankel";
};

struct RunReport {
  ExperimentConfig config;
  std::uint64_t seed = 0;
  double delta = 0.0;
  std::complex<double> normalizer{0.0, 0.0};
  double completed_rel_error = 0.0;
  double recovery_correlation = 0.0;
  std::vector<double> residuals;
  int svt_iterations = 0;
  bool svt_converged = false;
  double svt_threshold = 0.0;
  double svt_step = 0.0;
  double svt_tol = 0.0;
  AngleSpectrum spectrum_sparse;
  AngleSpectrum spectrum_completed;
  PeakReport peaks_sparse;
  PeakReport peaks_completed;
  double psr_gain_db = 0.0;
  TheoryEvaluation theory{};
  double elapsed_seconds = 0.0;  ///< wall clock; never serialized
};

/// Pipeline failure with the stage it came from.
class PipelineError : public std::runtime_error {
public:
  PipelineError(std::string stage_name, const std::string& what)
      : std::runtime_error(stage_name + ": " + what), stage(std::move(stage_name)) {}
  std::string stage;
};

/// Full single-run pipeline: synthesize -> mask -> normalize by the first
/// observed element -> Hankel lift -> dither -> one-bit -> SVT -> de-Hankel
/// -> spectra and peaks, plus error metrics and the theory cross-check.
inline RunReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto t_start = std::chrono::steady_clock::now();
  RunReport rep;
  rep.config = cfg;
  rep.seed = cfg.seed;
  std::string stage = "geometry";
  try {
    const ArrayGeometry geom = virtual_array(cfg.geometry.tx, cfg.geometry.rx);
    const Eigen::Index m = geom.grid_size;

    stage = "synthesize";
    const TargetScene scene = cfg.to_scene();
    const Snapshot x_full = synthesize_snapshot(
        scene, m, cfg.noise_variance(),
        cfg.seed + static_cast<std::uint64_t>(SeedStream::noise));

    stage = "mask";
    const Snapshot x_masked = apply_mask(x_full, geom);

    stage = "normalize";
    const std::complex<double> z = x_masked.values(geom.virtual_positions.front());
    if (std::abs(z) == 0.0) throw std::runtime_error("first observed element is zero");
    rep.normalizer = z;
    const Snapshot x_norm{x_masked.values / z, x_masked.mask};

    stage = "hankel";
    HankelDims dims = hankel_dims(m);
    if (cfg.hankel_force_square && dims.n1 != dims.n2) dims = {dims.n1, dims.n1};
    const HankelLift lift = build_hankel(x_norm, dims);

    stage = "dither";
    rep.delta = cfg.quantization.mode == "explicit"
                    ? cfg.quantization.delta
                    : design_dither_scale(lift.matrix, lift.omega, cfg.quantization.margin);

    stage = "svt";
    SvtResult svt;
    if (cfg.quantization.mode == "bypass") {
      SamplingOperator op(lift.omega);
      svt = svt_complete(op.forward(lift.matrix), op, cfg.solver);
    } else {
      // One-bit data can always be fitted exactly, but doing so interpolates
      // quantization noise; stopping at the calibrated residual keeps the
      // iterate low-rank and the reconstructed spectrum clean.
      SvtOptions solver = cfg.solver;
      if (!solver.tol) solver.tol = kOneBitStopResidual;
      const DitherMatrix dither = DitherMatrix::generate(
          dims.n1, dims.n2, rep.delta,
          cfg.seed + static_cast<std::uint64_t>(SeedStream::dither));
      const OneBitObservation onebit = one_bit_quantize(lift.matrix, lift.omega, dither);
      svt = complete_hankel_pipeline(onebit, solver);
    }
    rep.residuals = svt.residuals;
    rep.svt_iterations = svt.iterations;
    rep.svt_converged = svt.converged;
    rep.svt_threshold = svt.threshold;
    rep.svt_step = svt.step;
    rep.svt_tol = svt.tol;

    stage = "dehankel";
    const Eigen::VectorXcd x_completed = dehankel(svt.completed);

    stage = "reference";
    const Snapshot full_norm{x_full.values / z,
                             std::vector<bool>(static_cast<std::size_t>(m), true)};
    const HankelLift ref = build_hankel(full_norm, dims);
    const double err_abs = (svt.completed - ref.matrix).norm();
    rep.completed_rel_error = err_abs / ref.matrix.norm();
    const Eigen::VectorXcd x_clean = synthesize_snapshot(scene, m, 0.0, 0).values;
    const Eigen::Index len = x_completed.size();
    const double denom = x_clean.head(len).norm() * x_completed.norm();
    rep.recovery_correlation =
        denom > 0.0 ? std::abs((x_clean.head(len).adjoint() * x_completed)(0)) / denom : 0.0;

    stage = "spectrum";
    rep.spectrum_sparse =
        angle_spectrum(x_norm.values, cfg.spectrum.n_fft, "sparse-zero-filled");
    rep.spectrum_completed = angle_spectrum(x_completed, cfg.spectrum.n_fft, "completed");

    stage = "peaks";
    rep.peaks_sparse =
        find_peaks(rep.spectrum_sparse, cfg.spectrum.peak_count, cfg.spectrum.min_separation_deg);
    rep.peaks_completed = find_peaks(rep.spectrum_completed, cfg.spectrum.peak_count,
                                     cfg.spectrum.min_separation_deg);
    rep.psr_gain_db =
        rep.peaks_completed.peak_to_max_sidelobe_db - rep.peaks_sparse.peak_to_max_sidelobe_db;

    stage = "theory";
    const double alpha = rep.delta / 2.0;
    rep.theory.alpha = alpha;
    rep.theory.m_prime = lift.omega.count();
    rep.theory.epsilon_implied =
        err_abs * err_abs /
        (32.0 * alpha * static_cast<double>(dims.n1) * static_cast<double>(dims.n2));
    rep.theory.bound =
        theory::recovery_error_bound(rep.theory.epsilon_implied, alpha, dims.n1, dims.n2);
    rep.theory.m_prime_required =
        rep.theory.epsilon_implied > 0.0
            ? theory::sample_complexity(rep.theory.epsilon_implied,
                                        static_cast<Eigen::Index>(scene.targets.size()), dims.n1,
                                        dims.n2, 1.0)
            : 0;
    rep.theory.satisfied = rep.theory.m_prime >= rep.theory.m_prime_required;
  } catch (const std::exception& e) {
    throw PipelineError(stage, e.what());
  }
  rep.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return rep;
}

struct TrialFailure {
  int trial = 0;
  std::string message;
};

struct MonteCarloReport {
  ExperimentConfig config;
  int trials = 0;
  std::vector<RunReport> reports;  ///< successful trials, ascending trial index
  std::vector<int> report_trials;  ///< trial index of each entry in `reports`
  std::vector<TrialFailure> failures;
  double detection_rate = 0.0;
  double median_rel_error = 0.0;
  double iqr_rel_error = 0.0;
  double median_psr_sparse_db = 0.0;
  double median_psr_completed_db = 0.0;
  double median_psr_gain_db = 0.0;
  double median_peak_error_deg = 0.0;  ///< median over trials of the worst matched-peak error
  double elapsed_seconds = 0.0;
};

/// True when every configured azimuth has a completed-spectrum peak within
/// the detection tolerance.
inline bool trial_detected(const RunReport& r) {
  for (double truth : r.config.scene.azimuths_deg) {
    double best = std::numeric_limits<double>::infinity();
    for (const Peak& p : r.peaks_completed.peaks)
      best = std::min(best, std::abs(p.angle_deg - truth));
    if (!(best <= r.config.spectrum.detection_tol_deg)) return false;
  }
  return true;
}

/// Worst-case angular error over configured azimuths, each matched to its
/// nearest reported peak.
inline double worst_peak_error_deg(const RunReport& r) {
  double worst = 0.0;
  for (double truth : r.config.scene.azimuths_deg) {
    double best = std::numeric_limits<double>::infinity();
    for (const Peak& p : r.peaks_completed.peaks)
      best = std::min(best, std::abs(p.angle_deg - truth));
    worst = std::max(worst, best);
  }
  return worst;
}

namespace detail {

inline double quantile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] * (1.0 - frac) + v[hi] * frac;
}

}  // namespace detail

/// Runs `trials` independent experiments; trial t reuses the config with
/// seed = base seed + t. Trials execute concurrently; aggregation is an
/// ordered reduce by trial index, so the report is scheduling-independent.
/// Failed trials are recorded, not fatal.
inline MonteCarloReport run_monte_carlo(const ExperimentConfig& cfg, int trials) {
  if (trials < 1) throw std::invalid_argument("run_monte_carlo: trials must be >= 1");
  cfg.validate();
  const auto t_start = std::chrono::steady_clock::now();

  std::vector<std::optional<RunReport>> results(static_cast<std::size_t>(trials));
  std::vector<std::string> errors(static_cast<std::size_t>(trials));
  parallel_for_index(trials, [&](int t) {
    ExperimentConfig c = cfg;
    c.seed = cfg.seed + static_cast<std::uint64_t>(t);
    try {
      results[static_cast<std::size_t>(t)] = run_experiment(c);
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(t)] = e.what();
    }
  });

  MonteCarloReport mc;
  mc.config = cfg;
  mc.trials = trials;
  int detected = 0;
  std::vector<double> rel_errors, psr_sparse, psr_completed, psr_gain, peak_errors;
  for (int t = 0; t < trials; ++t) {
    auto& res = results[static_cast<std::size_t>(t)];
    if (!res) {
      mc.failures.push_back({t, errors[static_cast<std::size_t>(t)]});
      continue;
    }
    if (trial_detected(*res)) ++detected;
    rel_errors.push_back(res->completed_rel_error);
    psr_sparse.push_back(res->peaks_sparse.peak_to_max_sidelobe_db);
    psr_completed.push_back(res->peaks_completed.peak_to_max_sidelobe_db);
    psr_gain.push_back(res->psr_gain_db);
    peak_errors.push_back(worst_peak_error_deg(*res));
    mc.report_trials.push_back(t);
    mc.reports.push_back(std::move(*res));
  }
  mc.detection_rate = static_cast<double>(detected) / static_cast<double>(trials);
  mc.median_rel_error = detail::quantile(rel_errors, 0.5);
  mc.iqr_rel_error =
      detail::quantile(rel_errors, 0.75) - detail::quantile(rel_errors, 0.25);
  mc.median_psr_sparse_db = detail::quantile(psr_sparse, 0.5);
  mc.median_psr_completed_db = detail::quantile(psr_completed, 0.5);
  mc.median_psr_gain_db = detail::quantile(psr_gain, 0.5);
  mc.median_peak_error_deg = detail::quantile(peak_errors, 0.5);
  mc.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return mc;
}

}  // namespace obhmc
