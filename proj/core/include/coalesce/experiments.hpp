#pragma once

// Dataset pipelines for the transmission spectra, the resonant transmission
// versus displacement, the mode-pulling avoided crossing and the coalescence
// threshold sweep. Each dataset carries the closed-form overlay next to the
// numeric series, plus every parameter needed to regenerate it.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "coalesce/closed_form.hpp"
#include "coalesce/parallel.hpp"
#include "coalesce/spectrum.hpp"

namespace coalesce {

using ParamValue = std::variant<double, std::int64_t, std::string, std::vector<double>>;

struct Column {
  std::string name;
  std::vector<double> values;
};

struct FigureDataset {
  std::string name;
  std::vector<Column> columns;
  std::vector<std::pair<std::string, ParamValue>> params;

  std::size_t rows() const noexcept;
  /// Throws invalid_parameter for an unknown column.
  const Column& column(std::string_view column_name) const;
  bool has_column(std::string_view column_name) const noexcept;
  /// Throws internal_consistency if the columns differ in length.
  void validate() const;
};

/// n evenly spaced values over [lo, hi].
std::vector<double> linspace(double lo, double hi, std::size_t n);

/// Column-name suffix for a reflector value, e.g. "zm=-50".
std::string zeta_m_label(double zeta_m);

/// {0, zeta, 5 zeta, 15 zeta, zeta*_m, 1.5 zeta*_m}.
std::vector<double> default_fig1_zeta_m_list(double zeta);

inline constexpr std::size_t kDefaultSpectrumPoints = 2001;
inline constexpr std::size_t kDefaultXPoints = 201;

/// Columns: k, then per zeta_m "T_<label>" (numeric transmission) and
/// "bare_<label>" (unit Lorentzians of half width kappa at the cavity
/// resonances 2n pi - atan(1/|zeta|) and that value minus 2 delta).
FigureDataset run_fig1_spectra(double zeta, std::span<const double> zeta_m_list,
                               Bracket k_window,
                               std::size_t n_points = kDefaultSpectrumPoints,
                               Parallelism par = {});

/// Columns: x, then per zeta_m "k_<label>" (tracked resonant wavenumber),
/// "T_num_<label>" (its peak height), "T_sin_law_<label>" (the sin-law
/// approximation at that wavenumber) and "T_two_mode_<label>". The tracked
/// peak is the one at the unshifted even resonance for x = 0.
FigureDataset run_fig2_resonant_transmission(double zeta,
                                             std::span<const double> zeta_m_list,
                                             std::span<const double> x_grid,
                                             const PeakSearchOptions& opts = {});

/// Columns: x, k_lower, k_upper, T_lower, T_upper, peak_count,
/// k_lossless_lower, k_lossless_upper (perfect end mirrors),
/// k_two_mode_lower, k_two_mode_upper (NaN while merged), and the offsets
/// dk_* of each branch pair from its own x = 0 centre.
FigureDataset run_fig3_mode_pulling(double zeta, double zeta_m,
                                    std::span<const double> x_grid, Bracket k_window,
                                    const PeakSearchOptions& opts = {});

/// Columns: zeta_m, n_peaks, T_high (tallest peak), T_low (other peak or
/// NaN), peak_gap (NaN for one peak), fwhm (merged peak, NaN for two),
/// past_merge (0/1). Params carry zeta_m_star and zeta_m_merge.
FigureDataset run_threshold_sweep(double zeta, std::span<const double> zeta_m_grid);

struct PhasePoint {
  double x;
  double k;
  double T_numeric;
  double T_sin_law;
};

/// Follows the fig2 resonance from x = 0 to the displacement where the
/// phase 2 k(x) x reaches target_phase (pi/2 puts the reflector at lambda/8).
PhasePoint resonant_transmission_at_phase(double zeta, double zeta_m,
                                          double target_phase,
                                          const PeakSearchOptions& opts = {});

}  // namespace coalesce
