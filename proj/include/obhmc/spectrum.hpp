#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "obhmc/array_model.hpp"
#include "obhmc/fft.hpp"

namespace obhmc {

inline constexpr double kDbFloor = -120.0;

/// Azimuth spectrum in dB, normalized so the strongest bin sits at 0 dB.
/// The angle grid is strictly increasing inside (-90, 90) degrees.
struct AngleSpectrum {
  Eigen::VectorXd angles_deg;
  Eigen::VectorXd magnitudes_db;
  std::string source;
};

struct Peak {
  double angle_deg = 0.0;
  double level_db = 0.0;
};

struct PeakReport {
  std::vector<Peak> peaks;                 ///< strongest first
  double peak_to_max_sidelobe_db = 0.0;    ///< weakest peak minus strongest unselected local max
};

class DetectionFailure : public std::runtime_error {
public:
  DetectionFailure(const std::string& what, PeakReport partial_report)
      : std::runtime_error(what), partial(std::move(partial_report)) {}
  PeakReport partial;
};

/// Zero-padded FFT of the (zero-filled) response, shifted to spatial
/// frequency u in [-1/2, 1/2) and mapped to azimuth theta = asin(2u) for
/// the half-wavelength grid. The u = -1/2 bin maps to -90 degrees and is
/// dropped to keep the grid inside the open interval.
inline AngleSpectrum angle_spectrum(const Eigen::VectorXcd& x, Eigen::Index n_fft = 4096,
                                    std::string source = {}) {
  if (x.size() < 1) throw std::domain_error("angle_spectrum: empty input");
  const Eigen::VectorXcd s = fft_forward(x, n_fft);
  const double peak = s.cwiseAbs().maxCoeff();
  if (peak == 0.0) throw std::domain_error("angle_spectrum: all-zero input cannot be normalized");
  AngleSpectrum out;
  out.source = std::move(source);
  out.angles_deg.resize(n_fft - 1);
  out.magnitudes_db.resize(n_fft - 1);
  for (Eigen::Index p = 1; p < n_fft; ++p) {
    const double u =
        (static_cast<double>(p) - static_cast<double>(n_fft) / 2.0) / static_cast<double>(n_fft);
    const Eigen::Index bin = (p + n_fft / 2) % n_fft;
    out.angles_deg(p - 1) = std::asin(2.0 * u) * 180.0 / std::numbers::pi;
    const double mag = std::abs(s(bin));
    out.magnitudes_db(p - 1) =
        mag > 0.0 ? std::max(20.0 * std::log10(mag / peak), kDbFloor) : kDbFloor;
  }
  return out;
}

inline AngleSpectrum angle_spectrum(const Snapshot& x, Eigen::Index n_fft = 4096,
                                    std::string source = {}) {
  return angle_spectrum(x.values, n_fft, std::move(source));
}

/// Picks the `count` strongest local maxima subject to a minimum pairwise
/// angular separation (greedy, by level). The sidelobe figure compares the
/// weakest selected peak against the strongest local maximum left
/// unselected; with no other maxima it falls back to the dB floor. Fewer
/// selectable maxima than requested raises DetectionFailure carrying the
/// partial report.
inline PeakReport find_peaks(const AngleSpectrum& s, int count, double min_separation_deg = 5.0) {
  if (count < 1) throw std::domain_error("find_peaks: count must be >= 1");
  if (min_separation_deg < 0.0) throw std::domain_error("find_peaks: negative separation");
  const Eigen::Index n = s.magnitudes_db.size();
  std::vector<Eigen::Index> maxima;
  for (Eigen::Index i = 1; i + 1 < n; ++i)
    if (s.magnitudes_db(i) > s.magnitudes_db(i - 1) && s.magnitudes_db(i) > s.magnitudes_db(i + 1))
      maxima.push_back(i);
  std::stable_sort(maxima.begin(), maxima.end(), [&](Eigen::Index a, Eigen::Index b) {
    return s.magnitudes_db(a) > s.magnitudes_db(b);
  });

  std::vector<Eigen::Index> selected;
  std::vector<Eigen::Index> rest;
  for (Eigen::Index idx : maxima) {
    const bool separated =
        std::all_of(selected.begin(), selected.end(), [&](Eigen::Index sel) {
          return std::abs(s.angles_deg(idx) - s.angles_deg(sel)) >= min_separation_deg;
        });
    if (static_cast<int>(selected.size()) < count && separated)
      selected.push_back(idx);
    else
      rest.push_back(idx);
  }

  PeakReport report;
  for (Eigen::Index idx : selected)
    report.peaks.push_back({s.angles_deg(idx), s.magnitudes_db(idx)});
  const double weakest =
      report.peaks.empty() ? kDbFloor : report.peaks.back().level_db;
  double max_sidelobe = kDbFloor;
  for (Eigen::Index idx : rest) max_sidelobe = std::max(max_sidelobe, s.magnitudes_db(idx));
  report.peak_to_max_sidelobe_db = weakest - max_sidelobe;

  if (static_cast<int>(selected.size()) < count)
    throw DetectionFailure("find_peaks: found " + std::to_string(selected.size()) +
                               " separable local maxima, needed " + std::to_string(count),
                           report);
  return report;
}

}  // namespace obhmc
