#include "coalesce/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "coalesce/error.hpp"

namespace coalesce {

namespace {

using detail::fail;
using detail::require;
using std::numbers::pi;

constexpr std::size_t kMaxGridPoints = 50'000'000;
// Two maxima of one pair are never further apart than a free spectral range
// (pi); the slack absorbs the exact-pi spacing of an empty cavity.
constexpr double kMaxPairSeparation = 1.05 * pi;
constexpr double kGoldenRatio = 0.6180339887498949;
// A grid maximum must stand out of its lower neighbour by more than
// round-off, otherwise a flat spectrum would report noise as peaks.
constexpr double kProminence = 1e-12;

bool is_grid_maximum(double left, double mid, double right) {
  return mid > left && mid >= right && mid - std::min(left, right) > kProminence * mid;
}

double end_linewidth(const CavitySystem& sys) {
  const double z = sys.zeta_end().value();
  return z == 0.0 ? std::numeric_limits<double>::infinity()
                  : bare_linewidth(z);
}

void check_window(double k_min, double k_max) {
  require(std::isfinite(k_min) && std::isfinite(k_max) && k_min > 0.0 &&
              k_min < k_max,
          ErrorKind::invalid_parameter, "wavenumber window needs 0 < k_min < k_max");
}

void check_search_options(const PeakSearchOptions& opts) {
  require(opts.grid_per_kappa >= 10, ErrorKind::invalid_parameter,
          "grid_per_kappa must be >= 10");
  require(opts.refine_tol > 0.0 && opts.refine_tol <= 1e-8,
          ErrorKind::invalid_parameter, "refine_tol must lie in (0, 1e-8]");
}

std::vector<double> uniform_grid(double lo, double hi, std::size_t n) {
  std::vector<double> ks(n);
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) ks[i] = lo + step * static_cast<double>(i);
  ks.back() = hi;
  return ks;
}

std::size_t grid_size(double span, double step) {
  const double n = std::ceil(span / step) + 1.0;
  require(n <= static_cast<double>(kMaxGridPoints), ErrorKind::invalid_parameter,
          "peak-search grid too fine for this window");
  return std::max<std::size_t>(3, static_cast<std::size_t>(n));
}

// Maximum of T inside [lo, hi], where the grid says T(lo), T(hi) < T(mid).
PeakLocation refine_maximum(const CavitySystem& sys, double lo, double hi,
                            double tol) {
  const double s_lo = transmission_slope(sys, lo);
  const double s_hi = transmission_slope(sys, hi);
  if (s_lo > 0.0 && s_hi < 0.0) {
    while (hi - lo > tol) {
      const double mid = 0.5 * (lo + hi);
      const double s = transmission_slope(sys, mid);
      if (s > 0.0) {
        lo = mid;
      } else if (s < 0.0) {
        hi = mid;
      } else {
        lo = hi = mid;
      }
    }
  } else {
    // Slope signs unusable (flat top at round-off level): golden section.
    double a = hi - kGoldenRatio * (hi - lo);
    double b = lo + kGoldenRatio * (hi - lo);
    double ta = transmission(sys, a);
    double tb = transmission(sys, b);
    while (hi - lo > tol) {
      if (ta < tb) {
        lo = a;
        a = b;
        ta = tb;
        b = lo + kGoldenRatio * (hi - lo);
        tb = transmission(sys, b);
      } else {
        hi = b;
        b = a;
        tb = ta;
        a = hi - kGoldenRatio * (hi - lo);
        ta = transmission(sys, a);
      }
    }
  }
  const double k = 0.5 * (lo + hi);
  return {k, transmission(sys, k)};
}

double half_height_crossing(const CavitySystem& sys, double k_inside,
                            double k_outside, double level) {
  double in = k_inside;
  double out = k_outside;
  while (std::abs(out - in) > 1e-12) {
    const double mid = 0.5 * (in + out);
    if (transmission(sys, mid) >= level) {
      in = mid;
    } else {
      out = mid;
    }
  }
  return 0.5 * (in + out);
}

std::vector<PeakLocation> maxima_in(Polarizability zeta, Polarizability zeta_m,
                                    double x, double lo, double hi,
                                    const PeakSearchOptions& opts) {
  const auto sys = CavitySystem::membrane_in_middle(zeta, zeta_m, x);
  return locate_maxima(sys, std::max(lo, 1e-9), hi, opts);
}

std::size_t index_closest_to_zero(std::span<const double> xs) {
  const auto it = std::min_element(
      xs.begin(), xs.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
  return static_cast<std::size_t>(it - xs.begin());
}

}  // namespace

std::vector<SpectrumSample> scan_transmission(const CavitySystem& sys,
                                              double k_min, double k_max,
                                              std::size_t n_points,
                                              Parallelism par) {
  check_window(k_min, k_max);
  require(n_points >= 2, ErrorKind::invalid_parameter,
          "a scan needs at least two points");
  const std::vector<double> ks = uniform_grid(k_min, k_max, n_points);
  return parallel_map(n_points, par, [&](std::size_t i) {
    return SpectrumSample{ks[i], transmission(sys, ks[i])};
  });
}

double peak_grid_step(const CavitySystem& sys, double k_min, double k_max,
                      int grid_per_kappa) {
  const double scale = std::min(end_linewidth(sys), 0.25 * (k_max - k_min));
  return scale / grid_per_kappa;
}

std::vector<PeakLocation> locate_maxima(const CavitySystem& sys, double k_min,
                                        double k_max,
                                        const PeakSearchOptions& opts) {
  check_window(k_min, k_max);
  check_search_options(opts);
  const double step = peak_grid_step(sys, k_min, k_max, opts.grid_per_kappa);
  const std::size_t n = grid_size(k_max - k_min, step);
  const std::vector<double> ks = uniform_grid(k_min, k_max, n);
  const std::vector<double> ts = parallel_map(
      n, opts.parallelism, [&](std::size_t i) { return transmission(sys, ks[i]); });

  std::vector<PeakLocation> peaks;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (is_grid_maximum(ts[i - 1], ts[i], ts[i + 1])) {
      const PeakLocation p = refine_maximum(sys, ks[i - 1], ks[i + 1], opts.refine_tol);
      if (!peaks.empty() && p.k - peaks.back().k <= 10.0 * opts.refine_tol) {
        if (p.T > peaks.back().T) peaks.back() = p;
        continue;
      }
      peaks.push_back(p);
    }
  }
  return peaks;
}

std::vector<ResonancePeak> find_peaks(const CavitySystem& sys, double k_min,
                                      double k_max,
                                      const PeakSearchOptions& opts) {
  const std::vector<PeakLocation> located = locate_maxima(sys, k_min, k_max, opts);
  std::vector<ResonancePeak> out;
  out.reserve(located.size());
  for (const PeakLocation& p : located) {
    out.push_back({p.k, p.T, peak_halfwidth(sys, p)});
  }
  return out;
}

double peak_halfwidth(const CavitySystem& sys, const PeakLocation& peak,
                      double search_limit) {
  require(peak.T > 0.0 && peak.k > 0.0, ErrorKind::invalid_parameter,
          "peak must have positive height and wavenumber");
  const double level = 0.5 * peak.T;
  const double step = std::min(0.25 * end_linewidth(sys), 0.01);

  auto walk = [&](double direction) {
    double inside = peak.k;
    for (double offset = step; offset <= search_limit + step; offset += step) {
      const double k = peak.k + direction * std::min(offset, search_limit);
      if (k <= 0.0) break;
      if (transmission(sys, k) < level) {
        return half_height_crossing(sys, inside, k, level);
      }
      inside = k;
      if (offset >= search_limit) break;
    }
    fail(ErrorKind::edge_truncation,
         "half height not reached inside the search range");
  };

  const double right = walk(+1.0);
  const double left = walk(-1.0);
  return 0.5 * (right - left);
}

double peak_halfwidth(const CavitySystem& sys, const ResonancePeak& peak,
                      double search_limit) {
  return peak_halfwidth(sys, PeakLocation{peak.k_peak, peak.T_peak}, search_limit);
}

std::vector<BranchPoint> track_branches(Polarizability zeta,
                                        Polarizability zeta_m,
                                        std::span<const double> x_values,
                                        Bracket k_window,
                                        const PeakSearchOptions& opts) {
  check_window(k_window.lo, k_window.hi);
  require(!x_values.empty(), ErrorKind::invalid_parameter, "x grid is empty");
  require(std::is_sorted(x_values.begin(), x_values.end()),
          ErrorKind::invalid_parameter, "x grid must be sorted ascending");
  const double width = k_window.hi - k_window.lo;

  auto solve = [&](double x, const BranchPoint* prev) {
    double lo = k_window.lo;
    double hi = k_window.hi;
    if (prev != nullptr) {
      const double mid = 0.5 * (prev->k_lower + prev->k_upper);
      lo = mid - 0.5 * width;
      hi = mid + 0.5 * width;
    }
    const std::vector<PeakLocation> peaks = maxima_in(zeta, zeta_m, x, lo, hi, opts);
    if (peaks.empty()) {
      fail(ErrorKind::pair_identification, "no transmission maximum in the pair window");
    }

    BranchPoint bp{x, peaks.front().k, peaks.front().k, peaks.front().T,
                   peaks.front().T, 1};
    if (peaks.size() >= 2) {
      std::size_t pick = 0;
      if (prev == nullptr) {
        if (peaks.size() > 2) {
          fail(ErrorKind::pair_identification,
               "initial window holds more than two maxima");
        }
      } else {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j + 1 < peaks.size(); ++j) {
          const double cost = std::abs(peaks[j].k - prev->k_lower) +
                              std::abs(peaks[j + 1].k - prev->k_upper);
          if (cost < best) {
            best = cost;
            pick = j;
          }
        }
      }
      const PeakLocation& a = peaks[pick];
      const PeakLocation& b = peaks[pick + 1];
      bp = {x, a.k, b.k, a.T, b.T, 2};
    }
    if (bp.k_upper - bp.k_lower > kMaxPairSeparation) {
      fail(ErrorKind::pair_identification,
           "tracked maxima are more than one free spectral range apart");
    }
    return bp;
  };

  const std::size_t i0 = index_closest_to_zero(x_values);
  std::vector<BranchPoint> out(x_values.size());
  out[i0] = solve(x_values[i0], nullptr);
  for (std::size_t i = i0 + 1; i < x_values.size(); ++i) {
    out[i] = solve(x_values[i], &out[i - 1]);
  }
  for (std::size_t i = i0; i-- > 0;) {
    out[i] = solve(x_values[i], &out[i + 1]);
  }
  return out;
}

std::vector<TrackedResonance> track_resonance(Polarizability zeta,
                                              Polarizability zeta_m,
                                              std::span<const double> x_values,
                                              double k_start,
                                              double half_window,
                                              const PeakSearchOptions& opts) {
  require(!x_values.empty(), ErrorKind::invalid_parameter, "x grid is empty");
  require(std::is_sorted(x_values.begin(), x_values.end()),
          ErrorKind::invalid_parameter, "x grid must be sorted ascending");
  require(half_window > 0.0, ErrorKind::invalid_parameter,
          "tracking half window must be positive");

  auto step = [&](double x, double k_prev) {
    const std::vector<PeakLocation> peaks =
        maxima_in(zeta, zeta_m, x, k_prev - half_window, k_prev + half_window, opts);
    if (peaks.empty()) {
      fail(ErrorKind::pair_identification, "tracked resonance lost");
    }
    const auto nearest = std::min_element(
        peaks.begin(), peaks.end(), [&](const PeakLocation& a, const PeakLocation& b) {
          return std::abs(a.k - k_prev) < std::abs(b.k - k_prev);
        });
    return TrackedResonance{x, nearest->k, nearest->T};
  };

  // A resonance moves at most 2k per unit displacement; long grid steps are
  // subdivided so each move stays well inside the search window.
  auto walk = [&](const TrackedResonance& from, double x) {
    const double dx = x - from.x;
    const double substeps = std::ceil(std::abs(dx) * 2.0 * from.k / (0.5 * half_window));
    const int n = static_cast<int>(std::clamp(substeps, 1.0, 1e6));
    TrackedResonance at = from;
    for (int j = 1; j < n; ++j) at = step(from.x + dx * j / n, at.k);
    return step(x, at.k);
  };

  const std::size_t i0 = index_closest_to_zero(x_values);

  std::vector<TrackedResonance> out(x_values.size());
  out[i0] = step(x_values[i0], k_start);
  for (std::size_t i = i0 + 1; i < x_values.size(); ++i) {
    out[i] = walk(out[i - 1], x_values[i]);
  }
  for (std::size_t i = i0; i-- > 0;) {
    out[i] = walk(out[i + 1], x_values[i]);
  }
  return out;
}

Bracket pair_window(double zeta, int n) {
  const double even = bare_resonance(2 * n, zeta);
  return {even - 0.5 * pi, even + 0.25 * pi};
}

int count_maxima(const CavitySystem& sys, Bracket window) {
  check_window(window.lo, window.hi);
  const double step = std::min(end_linewidth(sys), window.hi - window.lo) / 50.0;
  const std::size_t n = grid_size(window.hi - window.lo, step);
  const std::vector<double> ks = uniform_grid(window.lo, window.hi, n);
  int count = 0;
  double prev = transmission(sys, ks[0]);
  double cur = transmission(sys, ks[1]);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double next = transmission(sys, ks[i + 1]);
    if (is_grid_maximum(prev, cur, next)) ++count;
    prev = cur;
    cur = next;
  }
  return count;
}

double find_merge_point(Polarizability zeta, Bracket zeta_m_range, double rel_tol) {
  require(zeta.value() != 0.0, ErrorKind::invalid_parameter,
          "merge point needs end mirrors (zeta != 0)");
  const Bracket window = pair_window(zeta.value());
  auto peaks_at = [&](double zm) {
    return count_maxima(CavitySystem::membrane_in_middle(zeta, Polarizability(zm), 0.0),
                        window);
  };

  double split = zeta_m_range.lo;
  double merged = zeta_m_range.hi;
  int c_split = peaks_at(split);
  int c_merged = peaks_at(merged);
  if (c_split == 1 && c_merged == 2) {
    std::swap(split, merged);
    std::swap(c_split, c_merged);
  }
  if (c_split != 2 || c_merged != 1) {
    fail(ErrorKind::not_bracketed,
         "zeta_m range does not straddle the two-peak/one-peak transition");
  }
  while (std::abs(merged - split) > rel_tol * std::abs(0.5 * (merged + split))) {
    const double mid = 0.5 * (split + merged);
    if (peaks_at(mid) >= 2) {
      split = mid;
    } else {
      merged = mid;
    }
  }
  return 0.5 * (split + merged);
}

}  // namespace coalesce
