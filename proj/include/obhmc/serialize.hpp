#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "obhmc/experiment.hpp"
#include "obhmc/theory.hpp"

namespace obhmc {

using json = nlohmann::json;

inline void to_json(json& j, const GeometryConfig& g) {
  j = json{{"tx", g.tx}, {"rx", g.rx}};
}
inline void from_json(const json& j, GeometryConfig& g) {
  g = GeometryConfig{};
  g.tx = j.value("tx", g.tx);
  g.rx = j.value("rx", g.rx);
}

inline void to_json(json& j, const SceneConfig& s) {
  j = json{{"azimuths_deg", s.azimuths_deg}, {"amplitudes", s.amplitudes},
           {"phases_rad", s.phases_rad},     {"snr_db", s.snr_db},
           {"noiseless", s.noiseless},       {"spacing", s.spacing}};
}
inline void from_json(const json& j, SceneConfig& s) {
  s = SceneConfig{};
  s.azimuths_deg = j.value("azimuths_deg", s.azimuths_deg);
  s.amplitudes = j.value("amplitudes", s.amplitudes);
  s.phases_rad = j.value("phases_rad", s.phases_rad);
  s.snr_db = j.value("snr_db", s.snr_db);
  s.noiseless = j.value("noiseless", s.noiseless);
  s.spacing = j.value("spacing", s.spacing);
}

inline void to_json(json& j, const QuantizationConfig& q) {
  j = json{{"mode", q.mode}, {"margin", q.margin}, {"delta", q.delta}};
}
inline void from_json(const json& j, QuantizationConfig& q) {
  q = QuantizationConfig{};
  q.mode = j.value("mode", q.mode);
  q.margin = j.value("margin", q.margin);
  q.delta = j.value("delta", q.delta);
}

inline void to_json(json& j, const SvtOptions& s) {
  j = json{{"threshold", s.threshold ? json(*s.threshold) : json(nullptr)},
           {"step", s.step ? json(*s.step) : json(nullptr)},
           {"tol", s.tol ? json(*s.tol) : json(nullptr)},
           {"max_iters", s.max_iters}};
}
inline void from_json(const json& j, SvtOptions& s) {
  s = SvtOptions{};
  if (j.contains("threshold") && !j.at("threshold").is_null())
    s.threshold = j.at("threshold").get<double>();
  if (j.contains("step") && !j.at("step").is_null()) s.step = j.at("step").get<double>();
  if (j.contains("tol") && !j.at("tol").is_null()) s.tol = j.at("tol").get<double>();
  s.max_iters = j.value("max_iters", s.max_iters);
}

inline void to_json(json& j, const SpectrumConfig& s) {
  j = json{{"n_fft", s.n_fft},
           {"peak_count", s.peak_count},
           {"min_separation_deg", s.min_separation_deg},
           {"detection_tol_deg", s.detection_tol_deg}};
}
inline void from_json(const json& j, SpectrumConfig& s) {
  s = SpectrumConfig{};
  s.n_fft = j.value("n_fft", s.n_fft);
  s.peak_count = j.value("peak_count", s.peak_count);
  s.min_separation_deg = j.value("min_separation_deg", s.min_separation_deg);
  s.detection_tol_deg = j.value("detection_tol_deg", s.detection_tol_deg);
}

inline void to_json(json& j, const MetadataConfig& m) {
  j = json{{"range_m", m.range_m}, {"velocity_mps", m.velocity_mps}};
}
inline void from_json(const json& j, MetadataConfig& m) {
  m = MetadataConfig{};
  m.range_m = j.value("range_m", m.range_m);
  m.velocity_mps = j.value("velocity_mps", m.velocity_mps);
}

inline void to_json(json& j, const ExperimentConfig& c) {
  j = json{{"geometry", c.geometry},
           {"scene", c.scene},
           {"quantization", c.quantization},
           {"solver", c.solver},
           {"spectrum", c.spectrum},
           {"hankel_force_square", c.hankel_force_square},
           {"seed", c.seed},
           {"trials", c.trials},
           {"metadata", c.metadata}};
}
inline void from_json(const json& j, ExperimentConfig& c) {
  c = ExperimentConfig{};
  if (j.contains("geometry")) j.at("geometry").get_to(c.geometry);
  if (j.contains("scene")) j.at("scene").get_to(c.scene);
  if (j.contains("quantization")) j.at("quantization").get_to(c.quantization);
  if (j.contains("solver")) j.at("solver").get_to(c.solver);
  if (j.contains("spectrum")) j.at("spectrum").get_to(c.spectrum);
  c.hankel_force_square = j.value("hankel_force_square", c.hankel_force_square);
  c.seed = j.value("seed", c.seed);
  c.trials = j.value("trials", c.trials);
  if (j.contains("metadata")) j.at("metadata").get_to(c.metadata);
}

inline json peaks_json(const PeakReport& p) {
  json arr = json::array();
  for (const Peak& pk : p.peaks) arr.push_back({{"angle_deg", pk.angle_deg}, {"level_db", pk.level_db}});
  return arr;
}

/// Canonical report serialization. Timings are deliberately excluded so the
/// file is a pure function of (config, seed).
inline json report_json(const RunReport& r) {
  return json{
      {"config", r.config},
      {"seed", r.seed},
      {"delta", r.delta},
      {"normalizer", {{"real", r.normalizer.real()}, {"imag", r.normalizer.imag()}}},
      {"error_metrics",
       {{"completed_rel_error", r.completed_rel_error},
        {"recovery_correlation", r.recovery_correlation},
        {"psr_gain_db", r.psr_gain_db}}},
      {"svt",
       {{"iterations", r.svt_iterations},
        {"converged", r.svt_converged},
        {"threshold", r.svt_threshold},
        {"step", r.svt_step},
        {"tol", r.svt_tol},
        {"final_residual", r.residuals.empty() ? 0.0 : r.residuals.back()}}},
      {"residuals_path", "residuals.csv"},
      {"peaks", peaks_json(r.peaks_completed)},
      {"peaks_sparse", peaks_json(r.peaks_sparse)},
      {"peak_to_max_sidelobe_db",
       {{"sparse", r.peaks_sparse.peak_to_max_sidelobe_db},
        {"completed", r.peaks_completed.peak_to_max_sidelobe_db}}},
      {"theory",
       {{"bound", r.theory.bound},
        {"m_prime", r.theory.m_prime},
        {"satisfied", r.theory.satisfied},
        {"alpha", r.theory.alpha},
        {"epsilon_implied", r.theory.epsilon_implied},
        {"m_prime_required", r.theory.m_prime_required},
        {"sampling", r.theory.sampling}}}};
}

inline json monte_carlo_json(const MonteCarloReport& mc) {
  json trials = json::array();
  for (std::size_t k = 0; k < mc.reports.size(); ++k) {
    const RunReport& r = mc.reports[k];
    trials.push_back({{"trial", mc.report_trials[k]},
                      {"seed", r.seed},
                      {"detected", trial_detected(r)},
                      {"worst_peak_error_deg", worst_peak_error_deg(r)},
                      {"completed_rel_error", r.completed_rel_error},
                      {"psr_sparse_db", r.peaks_sparse.peak_to_max_sidelobe_db},
                      {"psr_completed_db", r.peaks_completed.peak_to_max_sidelobe_db},
                      {"svt_iterations", r.svt_iterations},
                      {"peaks", peaks_json(r.peaks_completed)}});
  }
  json failures = json::array();
  for (const TrialFailure& f : mc.failures)
    failures.push_back({{"trial", f.trial}, {"message", f.message}});
  return json{{"config", mc.config},
              {"trials", mc.trials},
              {"detection_rate", mc.detection_rate},
              {"median_rel_error", mc.median_rel_error},
              {"iqr_rel_error", mc.iqr_rel_error},
              {"median_psr_sparse_db", mc.median_psr_sparse_db},
              {"median_psr_completed_db", mc.median_psr_completed_db},
              {"median_psr_gain_db", mc.median_psr_gain_db},
              {"median_peak_error_deg", mc.median_peak_error_deg},
              {"trial_reports", trials},
              {"failures", failures}};
}

namespace theory {

inline void to_json(json& j, const TheoremConfig& c) {
  j = json{{"n1", c.n1},           {"n2", c.n2},      {"rank", c.rank},
           {"epsilon", c.epsilon}, {"alpha", c.alpha}, {"constant", c.constant},
           {"m_prime", c.m_prime}, {"trials", c.trials}, {"seed", c.seed},
           {"rho", c.rho},         {"solver", c.solver}};
}
inline void from_json(const json& j, TheoremConfig& c) {
  c = TheoremConfig{};
  c.n1 = j.value("n1", c.n1);
  c.n2 = j.value("n2", c.n2);
  c.rank = j.value("rank", c.rank);
  c.epsilon = j.value("epsilon", c.epsilon);
  c.alpha = j.value("alpha", c.alpha);
  c.constant = j.value("constant", c.constant);
  c.m_prime = j.value("m_prime", c.m_prime);
  c.trials = j.value("trials", c.trials);
  c.seed = j.value("seed", c.seed);
  c.rho = j.value("rho", c.rho);
  if (j.contains("solver")) j.at("solver").get_to(c.solver);
}

}  // namespace theory

inline json theorem_json(const theory::TheoremConfig& cfg, const theory::TheoremReport& rep) {
  return json{{"config", cfg},
              {"m_prime", rep.m_prime},
              {"bound", rep.bound},
              {"rho", rep.rho},
              {"trials", rep.trials},
              {"solver_failures", rep.solver_failures},
              {"consistent_count", rep.consistent_count},
              {"violations_consistent", rep.violations_consistent},
              {"violations_total", rep.violations_total},
              {"failure_probability_theorem", rep.failure_probability_theorem},
              {"failure_probability_lemma", rep.failure_probability_lemma},
              {"max_parallelogram_rel", rep.max_parallelogram_rel},
              {"median_error", rep.median_error},
              {"median_implied_epsilon", rep.median_implied_epsilon},
              {"implied_m_prime", rep.implied_m_prime},
              {"covering",
               {{"log_covering", rep.covering.log_covering}, {"entropy", rep.covering.entropy}}}};
}

namespace detail {

inline std::string full_precision(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("emit_outputs: cannot open " + path.string());
  out << text;
  if (!out) throw std::runtime_error("emit_outputs: write failed for " + path.string());
}

inline std::string spectrum_csv(const AngleSpectrum& s) {
  std::string text = "angle_deg,magnitude_db\n";
  for (Eigen::Index i = 0; i < s.angles_deg.size(); ++i)
    text += full_precision(s.angles_deg(i)) + "," + full_precision(s.magnitudes_db(i)) + "\n";
  return text;
}

}  // namespace detail

/// Writes the spectra, residual history, and JSON report into `dir` and
/// returns the manifest of written paths.
inline std::vector<std::filesystem::path> emit_outputs(const RunReport& rep,
                                                       const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> manifest;

  manifest.push_back(dir / "spectrum_sparse.csv");
  detail::write_text(manifest.back(), detail::spectrum_csv(rep.spectrum_sparse));

  manifest.push_back(dir / "spectrum_completed.csv");
  detail::write_text(manifest.back(), detail::spectrum_csv(rep.spectrum_completed));

  manifest.push_back(dir / "residuals.csv");
  std::string residuals = "iteration,relative_residual\n";
  for (std::size_t k = 0; k < rep.residuals.size(); ++k)
    residuals += std::to_string(k + 1) + "," + detail::full_precision(rep.residuals[k]) + "\n";
  detail::write_text(manifest.back(), residuals);

  manifest.push_back(dir / "report.json");
  detail::write_text(manifest.back(), report_json(rep).dump(2) + "\n");

  return manifest;
}

inline std::vector<std::filesystem::path> emit_outputs(const MonteCarloReport& mc,
                                                       const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> manifest;
  manifest.push_back(dir / "montecarlo.json");
  detail::write_text(manifest.back(), monte_carlo_json(mc).dump(2) + "\n");
  return manifest;
}

}  // namespace obhmc
