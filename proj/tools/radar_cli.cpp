// Command-line driver for the one-bit Hankel completion radar pipeline.
//
// Subcommands:
//   run              single experiment, writes spectra/residuals/report.json
//   montecarlo       seeded trial sweep with aggregate statistics
//   validate-theory  Monte Carlo check of the recovery guarantee
//   rank-check       singular values of the noiseless scene Hankel matrix
//
// Exit codes: 0 success, 1 configuration error, 2 numerical failure.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include <obhmc/obhmc.hpp>

namespace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

obhmc::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  try {
    return obhmc::json::parse(in);
  } catch (const obhmc::json::exception& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
}

obhmc::ExperimentConfig load_experiment_config(const std::string& path,
                                               std::optional<std::uint64_t> seed_override) {
  obhmc::ExperimentConfig cfg;
  if (!path.empty()) {
    try {
      cfg = load_json(path).get<obhmc::ExperimentConfig>();
    } catch (const obhmc::json::exception& e) {
      throw ConfigError("config field error in " + path + ": " + e.what());
    }
  }
  if (seed_override) cfg.seed = *seed_override;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

obhmc::theory::TheoremConfig load_theorem_config(const std::string& path,
                                                 std::optional<std::uint64_t> seed_override) {
  obhmc::theory::TheoremConfig cfg;
  if (!path.empty()) {
    const obhmc::json j = load_json(path);
    try {
      if (j.contains("theory"))
        j.at("theory").get_to(cfg);
      else
        j.get_to(cfg);
    } catch (const obhmc::json::exception& e) {
      throw ConfigError("config field error in " + path + ": " + e.what());
    }
  }
  if (seed_override) cfg.seed = *seed_override;
  return cfg;
}

void print_peaks(const char* label, const obhmc::PeakReport& rep) {
  std::printf("%s:", label);
  for (const obhmc::Peak& p : rep.peaks) std::printf("  %.3f deg (%.2f dB)", p.angle_deg, p.level_db);
  std::printf("  [peak-to-sidelobe %.2f dB]\n", rep.peak_to_max_sidelobe_db);
}

void print_manifest(const std::vector<std::filesystem::path>& manifest) {
  for (const auto& p : manifest) std::printf("wrote %s\n", p.string().c_str());
}

int run_single(const std::string& config_path, const std::string& out_dir,
               std::optional<std::uint64_t> seed) {
  const obhmc::ExperimentConfig cfg = load_experiment_config(config_path, seed);
  const obhmc::RunReport rep = obhmc::run_experiment(cfg);
  std::printf("seed %llu, delta %.4f, SVT %d iterations (%s), final residual %.4f\n",
              static_cast<unsigned long long>(rep.seed), rep.delta, rep.svt_iterations,
              rep.svt_converged ? "tolerance reached" : "max iterations",
              rep.residuals.empty() ? 0.0 : rep.residuals.back());
  print_peaks("completed  ", rep.peaks_completed);
  print_peaks("sparse     ", rep.peaks_sparse);
  std::printf("sidelobe gain %.2f dB, completed rel error %.4f, correlation %.4f\n",
              rep.psr_gain_db, rep.completed_rel_error, rep.recovery_correlation);
  std::printf("theory: m'=%lld, required m'=%lld at implied eps %.4g -> %s\n", rep.theory.m_prime,
              rep.theory.m_prime_required, rep.theory.epsilon_implied,
              rep.theory.satisfied ? "satisfied" : "not satisfied");
  std::printf("elapsed %.2f s\n", rep.elapsed_seconds);
  print_manifest(obhmc::emit_outputs(rep, out_dir));
  return 0;
}

int run_monte(const std::string& config_path, const std::string& out_dir,
              std::optional<std::uint64_t> seed, int trials_override) {
  const obhmc::ExperimentConfig cfg = load_experiment_config(config_path, seed);
  const int trials = trials_override > 0 ? trials_override : cfg.trials;
  const obhmc::MonteCarloReport mc = obhmc::run_monte_carlo(cfg, trials);
  std::printf("%d trials (%zu failed), detection rate %.3f\n", mc.trials, mc.failures.size(),
              mc.detection_rate);
  std::printf("median peak error %.3f deg; median rel error %.4f (IQR %.4f)\n",
              mc.median_peak_error_deg, mc.median_rel_error, mc.iqr_rel_error);
  std::printf("median peak-to-sidelobe: sparse %.2f dB, completed %.2f dB, gain %.2f dB\n",
              mc.median_psr_sparse_db, mc.median_psr_completed_db, mc.median_psr_gain_db);
  std::printf("elapsed %.2f s\n", mc.elapsed_seconds);
  print_manifest(obhmc::emit_outputs(mc, out_dir));
  return 0;
}

int run_theory(const std::string& config_path, const std::string& out_dir,
               std::optional<std::uint64_t> seed) {
  const obhmc::theory::TheoremConfig cfg = load_theorem_config(config_path, seed);
  const obhmc::theory::TheoremReport rep = obhmc::theory::validate_theorem(cfg);
  std::printf("%lldx%lld rank-%lld, eps %.3f, m'=%lld of %lld, %d trials\n",
              static_cast<long long>(cfg.n1), static_cast<long long>(cfg.n2),
              static_cast<long long>(cfg.rank), cfg.epsilon, static_cast<long long>(rep.m_prime),
              static_cast<long long>(cfg.n1 * cfg.n2), rep.trials);
  std::printf("error bound %.4f; median error %.4f; consistent %d/%d\n", rep.bound,
              rep.median_error, rep.consistent_count, rep.trials - rep.solver_failures);
  std::printf("bound violations: %d total, %d among consistent (failure prob: theorem %.3g, "
              "lemma %.3g)\n",
              rep.violations_total, rep.violations_consistent, rep.failure_probability_theorem,
              rep.failure_probability_lemma);
  std::printf("max parallelogram deviation %.3g; implied eps %.4g -> m' >= %lld\n",
              rep.max_parallelogram_rel, rep.median_implied_epsilon, rep.implied_m_prime);
  std::printf("covering: log-cover %.4g <= entropy %.4g\n", rep.covering.log_covering,
              rep.covering.entropy);
  std::filesystem::create_directories(out_dir);
  const auto path = std::filesystem::path(out_dir) / "theory_report.json";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << obhmc::theorem_json(cfg, rep).dump(2) << "\n";
  std::printf("wrote %s\n", path.string().c_str());
  return 0;
}

int run_rank_check(const std::string& config_path, const std::string& out_dir,
                   std::optional<std::uint64_t> seed) {
  const obhmc::ExperimentConfig cfg = load_experiment_config(config_path, seed);
  const obhmc::ArrayGeometry geom = obhmc::virtual_array(cfg.geometry.tx, cfg.geometry.rx);
  const obhmc::RankCheck rc = obhmc::verify_vandermonde_rank(cfg.to_scene(), geom.grid_size);
  std::printf("grid size M=%d, %zu virtual elements, %zu targets\n", geom.grid_size,
              geom.virtual_positions.size(), cfg.scene.azimuths_deg.size());
  std::printf("numerical rank %lld\n", static_cast<long long>(rc.numerical_rank));
  const Eigen::Index show = std::min<Eigen::Index>(6, rc.singular_values.size());
  for (Eigen::Index i = 0; i < show; ++i)
    std::printf("  sigma_%lld = %.6e\n", static_cast<long long>(i + 1), rc.singular_values(i));
  if (rc.singular_values.size() > 1 && rc.singular_values(0) > 0.0) {
    const Eigen::Index p = static_cast<Eigen::Index>(cfg.scene.azimuths_deg.size());
    if (p < rc.singular_values.size())
      std::printf("sigma_%lld / sigma_1 = %.3e\n", static_cast<long long>(p + 1),
                  rc.singular_values(p) / rc.singular_values(0));
  }
  std::filesystem::create_directories(out_dir);
  const auto path = std::filesystem::path(out_dir) / "rank_check.json";
  obhmc::json j{{"grid_size", geom.grid_size},
                {"virtual_elements", geom.virtual_positions.size()},
                {"numerical_rank", rc.numerical_rank},
                {"singular_values", std::vector<double>(rc.singular_values.begin(),
                                                        rc.singular_values.end())}};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << "\n";
  std::printf("wrote %s\n", path.string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"One-bit Hankel matrix completion for sparse linear array radar"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  int trials = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config path (defaults when omitted)");
    sub->add_option("--out", out_dir, "output directory")->capture_default_str();
    sub->add_option("--seed", seed, "seed override");
  };

  CLI::App* cmd_run = app.add_subcommand("run", "run one experiment");
  add_common(cmd_run);
  CLI::App* cmd_mc = app.add_subcommand("montecarlo", "run seeded trials");
  add_common(cmd_mc);
  cmd_mc->add_option("--trials", trials, "trial count override");
  CLI::App* cmd_theory =
      app.add_subcommand("validate-theory", "Monte Carlo check of the recovery guarantee");
  add_common(cmd_theory);
  CLI::App* cmd_rank = app.add_subcommand("rank-check", "Hankel rank structure check");
  add_common(cmd_rank);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (cmd_run->parsed()) return run_single(config_path, out_dir, seed);
    if (cmd_mc->parsed()) return run_monte(config_path, out_dir, seed, trials);
    if (cmd_theory->parsed()) return run_theory(config_path, out_dir, seed);
    if (cmd_rank->parsed()) return run_rank_check(config_path, out_dir, seed);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
