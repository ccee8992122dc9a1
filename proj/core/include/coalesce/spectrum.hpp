#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "coalesce/closed_form.hpp"
#include "coalesce/parallel.hpp"
#include "coalesce/transfer_matrix.hpp"

namespace coalesce {

struct SpectrumSample {
  double k;
  double T;
};

struct ResonancePeak {
  double k_peak;
  double T_peak;
  double hwhm;
};

/// Refined maximum without a width measurement.
struct PeakLocation {
  double k;
  double T;
};

/// The one or two refined peaks of a coalescing pair at displacement x.
/// When the pair has merged, peak_count is 1 and lower == upper.
struct BranchPoint {
  double x;
  double k_lower;
  double k_upper;
  double T_lower;
  double T_upper;
  int peak_count;
};

struct PeakSearchOptions {
  /// Grid step is kappa / grid_per_kappa, kappa being the bare end-mirror
  /// linewidth.
  int grid_per_kappa = 20;
  double refine_tol = 1e-10;
  Parallelism parallelism{};
};

/// n_points uniformly spaced samples over [k_min, k_max] inclusive.
std::vector<SpectrumSample> scan_transmission(const CavitySystem& sys,
                                              double k_min, double k_max,
                                              std::size_t n_points,
                                              Parallelism par = {});

/// Grid step used by the peak search for a system.
double peak_grid_step(const CavitySystem& sys, double k_min, double k_max,
                      int grid_per_kappa);

/// Interior local maxima of T on the search grid, each refined to
/// refine_tol. Sorted ascending; empty if the window has none.
std::vector<PeakLocation> locate_maxima(const CavitySystem& sys, double k_min,
                                        double k_max,
                                        const PeakSearchOptions& opts = {});

/// locate_maxima plus the half width of every peak.
std::vector<ResonancePeak> find_peaks(const CavitySystem& sys, double k_min,
                                      double k_max,
                                      const PeakSearchOptions& opts = {});

/// Half width at T_peak/2: (k_right - k_left)/2, each side by bisection to
/// 1e-12. The search extends at most search_limit from the peak on each
/// side; running out raises edge_truncation.
double peak_halfwidth(const CavitySystem& sys, const PeakLocation& peak,
                      double search_limit = 1.5707963267948966);
double peak_halfwidth(const CavitySystem& sys, const ResonancePeak& peak,
                      double search_limit = 1.5707963267948966);

/// Follows the coalescing pair inside a window of fixed width that is
/// recentred on the previous pair midpoint. x_values must be sorted; the walk
/// starts at the value closest to zero (searched in k_window) and proceeds
/// outward in both directions, each branch continuing to the maximum nearest
/// its previous position. Results are in input order. Raises
/// pair_identification if the first window holds more than two maxima or a
/// chosen pair is more than one free spectral range apart.
std::vector<BranchPoint> track_branches(Polarizability zeta,
                                        Polarizability zeta_m,
                                        std::span<const double> x_values,
                                        Bracket k_window,
                                        const PeakSearchOptions& opts = {});

struct TrackedResonance {
  double x;
  double k;
  double T;
};

/// Follows a single transmission peak that sits at k_start for x = 0.
/// Starts from the x value closest to zero and walks outward in both
/// directions; results are returned in input order. Each step searches
/// [k_prev - half_window, k_prev + half_window] and keeps the maximum
/// nearest k_prev; coarse grid steps are subdivided internally.
std::vector<TrackedResonance> track_resonance(Polarizability zeta,
                                              Polarizability zeta_m,
                                              std::span<const double> x_values,
                                              double k_start,
                                              double half_window = 0.05,
                                              const PeakSearchOptions& opts = {});

/// Window around the coalescing pair near 2 n pi used for merge detection:
/// [bare even resonance - pi/2, bare even resonance + pi/4].
Bracket pair_window(double zeta, int n = 1);

/// Number of interior local maxima on a grid of step kappa/50 in window.
int count_maxima(const CavitySystem& sys, Bracket window);

/// Bisection in zeta_m on "two maxima" vs "one maximum" inside
/// pair_window(zeta). The range ends may be given in either order; raises
/// not_bracketed unless one end shows two peaks and the other one.
double find_merge_point(Polarizability zeta, Bracket zeta_m_range,
                        double rel_tol = 1e-7);

}  // namespace coalesce
