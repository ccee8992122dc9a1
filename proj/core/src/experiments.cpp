#include "coalesce/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "coalesce/error.hpp"
#include "coalesce/two_mode.hpp"

namespace coalesce {

namespace {

using detail::fail;
using detail::require;
using std::numbers::pi;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kTrackHalfWindow = 0.05;

double lorentzian(double k, double center, double hwhm) {
  const double d = (k - center) / hwhm;
  return 1.0 / (1.0 + d * d);
}

void check_x_grid(std::span<const double> xs) {
  require(!xs.empty(), ErrorKind::invalid_parameter, "x grid is empty");
  require(std::is_sorted(xs.begin(), xs.end()), ErrorKind::invalid_parameter,
          "x grid must be sorted ascending");
  for (double x : xs) {
    require(std::isfinite(x) && std::abs(x) < 0.25, ErrorKind::invalid_parameter,
            "x grid must lie inside (-1/4, 1/4)");
  }
}

std::size_t index_closest_to_zero(std::span<const double> xs) {
  const auto it = std::min_element(
      xs.begin(), xs.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
  return static_cast<std::size_t>(it - xs.begin());
}

struct LosslessPair {
  double lower;
  double upper;
};

// Adjacent perfect-mirror eigenmodes inside [center - width/2, center + width/2]
// that best continue `prev`.
LosslessPair lossless_pair(double zeta_m, double x, double center, double width,
                           LosslessPair prev) {
  constexpr int kSteps = 4000;
  const double lo = center - 0.5 * width;
  const double h = width / kSteps;
  std::vector<double> roots;
  double k_prev = lo;
  double f_prev = lossless_residual(zeta_m, x, k_prev);
  for (int i = 1; i <= kSteps; ++i) {
    const double k = lo + h * i;
    const double f = lossless_residual(zeta_m, x, k);
    if (f_prev == 0.0) {
      roots.push_back(k_prev);
    } else if ((f < 0.0) != (f_prev < 0.0) && f != 0.0) {
      roots.push_back(lossless_eigenmode(zeta_m, x, {k_prev, k}));
    }
    k_prev = k;
    f_prev = f;
  }
  if (roots.size() < 2) {
    fail(ErrorKind::pair_identification, "perfect-mirror pair not found in window");
  }
  std::size_t pick = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j + 1 < roots.size(); ++j) {
    const double cost = std::abs(roots[j] - prev.lower) + std::abs(roots[j + 1] - prev.upper);
    if (cost < best) {
      best = cost;
      pick = j;
    }
  }
  return {roots[pick], roots[pick + 1]};
}

PeakLocation peak_near(double zeta, double zeta_m, double x, double k_guess,
                       const PeakSearchOptions& opts) {
  const auto sys = CavitySystem::membrane_in_middle(Polarizability(zeta),
                                                    Polarizability(zeta_m), x);
  const auto peaks =
      locate_maxima(sys, k_guess - kTrackHalfWindow, k_guess + kTrackHalfWindow, opts);
  if (peaks.empty()) fail(ErrorKind::pair_identification, "tracked resonance lost");
  return *std::min_element(peaks.begin(), peaks.end(),
                           [&](const PeakLocation& a, const PeakLocation& b) {
                             return std::abs(a.k - k_guess) < std::abs(b.k - k_guess);
                           });
}

}  // namespace

std::size_t FigureDataset::rows() const noexcept {
  return columns.empty() ? 0 : columns.front().values.size();
}

bool FigureDataset::has_column(std::string_view column_name) const noexcept {
  return std::any_of(columns.begin(), columns.end(),
                     [&](const Column& c) { return c.name == column_name; });
}

const Column& FigureDataset::column(std::string_view column_name) const {
  for (const Column& c : columns) {
    if (c.name == column_name) return c;
  }
  fail(ErrorKind::invalid_parameter, "unknown column: " + std::string(column_name));
}

void FigureDataset::validate() const {
  for (const Column& c : columns) {
    if (c.values.size() != rows()) {
      fail(ErrorKind::internal_consistency, "column length mismatch in " + c.name);
    }
  }
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  require(n >= 1, ErrorKind::invalid_parameter, "linspace needs n >= 1");
  if (n == 1) return {lo};
  std::vector<double> out(n);
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) out[i] = lo + step * static_cast<double>(i);
  out.back() = hi;
  return out;
}

std::string zeta_m_label(double zeta_m) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "zm=%.6g", zeta_m);
  return buf;
}

std::vector<double> default_fig1_zeta_m_list(double zeta) {
  const double star = coalescence_threshold(zeta);
  return {0.0, zeta, 5.0 * zeta, 15.0 * zeta, star, 1.5 * star};
}

FigureDataset run_fig1_spectra(double zeta, std::span<const double> zeta_m_list,
                               Bracket k_window, std::size_t n_points, Parallelism par) {
  require(!zeta_m_list.empty(), ErrorKind::invalid_parameter, "zeta_m list is empty");
  const double kappa = bare_linewidth(zeta);
  const double mirror_phase = std::atan(1.0 / std::abs(zeta));

  FigureDataset ds;
  ds.name = "fig1";
  const std::vector<double> ks = linspace(k_window.lo, k_window.hi, n_points);
  ds.columns.push_back({"k", ks});

  for (double zm : zeta_m_list) {
    const auto sys = CavitySystem::membrane_in_middle(Polarizability(zeta),
                                                      Polarizability(zm), 0.0);
    const auto samples = scan_transmission(sys, k_window.lo, k_window.hi, n_points, par);
    Column t{"T_" + zeta_m_label(zm), {}};
    t.values.reserve(n_points);
    for (const auto& s : samples) t.values.push_back(s.T);

    // Cavity resonances of each pair: the even one stays at the empty-cavity
    // value, the odd one sits 2 delta below it.
    const double splitting = mode_splitting(zm);
    Column bare{"bare_" + zeta_m_label(zm), std::vector<double>(n_points, 0.0)};
    const int n_first = std::max(1, static_cast<int>(std::floor(k_window.lo / (2.0 * pi))));
    const int n_last = static_cast<int>(std::ceil(k_window.hi / (2.0 * pi))) + 1;
    for (int n = n_first; n <= n_last; ++n) {
      const double even = 2.0 * n * pi - mirror_phase;
      for (double center : {even, even - splitting}) {
        for (std::size_t i = 0; i < n_points; ++i) {
          bare.values[i] = std::max(bare.values[i], lorentzian(ks[i], center, kappa));
        }
      }
    }
    ds.columns.push_back(std::move(t));
    ds.columns.push_back(std::move(bare));
  }

  ds.params = {{"zeta", zeta},
               {"zeta_m_list", std::vector<double>(zeta_m_list.begin(), zeta_m_list.end())},
               {"k_min", k_window.lo},
               {"k_max", k_window.hi},
               {"points", static_cast<std::int64_t>(n_points)},
               {"kappa", kappa}};
  ds.validate();
  return ds;
}

FigureDataset run_fig2_resonant_transmission(double zeta,
                                             std::span<const double> zeta_m_list,
                                             std::span<const double> x_grid,
                                             const PeakSearchOptions& opts) {
  require(!zeta_m_list.empty(), ErrorKind::invalid_parameter, "zeta_m list is empty");
  check_x_grid(x_grid);
  const double k_start = bare_resonance(2, zeta);

  FigureDataset ds;
  ds.name = "fig2";
  ds.columns.push_back({"x", std::vector<double>(x_grid.begin(), x_grid.end())});
  for (double zm : zeta_m_list) {
    const auto track = track_resonance(Polarizability(zeta), Polarizability(zm), x_grid,
                                       k_start, kTrackHalfWindow, opts);
    const TwoModeParams tm = two_mode_params(zeta, zm);
    const std::string label = zeta_m_label(zm);
    Column k{"k_" + label, {}}, num{"T_num_" + label, {}}, sin_law{"T_sin_law_" + label, {}},
        two{"T_two_mode_" + label, {}};
    for (const auto& p : track) {
      k.values.push_back(p.k);
      num.values.push_back(p.T);
      sin_law.values.push_back(resonant_transmission(p.x, zm, p.k));
      two.values.push_back(two_mode_resonant_transmission(tm, p.x));
    }
    for (Column* c : {&k, &num, &sin_law, &two}) ds.columns.push_back(std::move(*c));
  }
  ds.params = {{"zeta", zeta},
               {"zeta_m_list", std::vector<double>(zeta_m_list.begin(), zeta_m_list.end())},
               {"x_min", x_grid.front()},
               {"x_max", x_grid.back()},
               {"x_points", static_cast<std::int64_t>(x_grid.size())},
               {"k_start", k_start},
               {"grid_per_kappa", static_cast<std::int64_t>(opts.grid_per_kappa)},
               {"refine_tol", opts.refine_tol}};
  ds.validate();
  return ds;
}

FigureDataset run_fig3_mode_pulling(double zeta, double zeta_m,
                                    std::span<const double> x_grid, Bracket k_window,
                                    const PeakSearchOptions& opts) {
  check_x_grid(x_grid);
  const Polarizability z(zeta), zm(zeta_m);
  const auto branches = track_branches(z, zm, x_grid, k_window, opts);

  const double origin[] = {0.0};
  const BranchPoint at_rest = track_branches(z, zm, origin, k_window, opts).front();
  const double pulled_center = 0.5 * (at_rest.k_lower + at_rest.k_upper);

  // Perfect end mirrors remove the mirror phase atan(1/|zeta|): same pair,
  // shifted up by that amount.
  const double mirror_phase = std::atan(1.0 / std::abs(zeta));
  const double width = k_window.hi - k_window.lo;
  const int n = std::max(1, static_cast<int>(std::lround(
                                0.5 * (k_window.lo + k_window.hi) / (2.0 * pi))));
  const double anchor = 2.0 * n * pi;
  const double splitting = mode_splitting(zeta_m);
  const LosslessPair rest_guess{anchor - splitting, anchor};
  const LosslessPair lossless_rest = lossless_pair(
      zeta_m, 0.0, pulled_center + mirror_phase, width, rest_guess);
  const double lossless_center = 0.5 * (lossless_rest.lower + lossless_rest.upper);

  std::vector<LosslessPair> lossless(x_grid.size());
  const std::size_t i0 = index_closest_to_zero(x_grid);
  auto solve = [&](std::size_t i, LosslessPair prev) {
    return lossless_pair(zeta_m, x_grid[i], 0.5 * (prev.lower + prev.upper), width, prev);
  };
  lossless[i0] = solve(i0, lossless_rest);
  for (std::size_t i = i0 + 1; i < x_grid.size(); ++i) lossless[i] = solve(i, lossless[i - 1]);
  for (std::size_t i = i0; i-- > 0;) lossless[i] = solve(i, lossless[i + 1]);

  const TwoModeParams tm = two_mode_params(zeta, zeta_m);

  FigureDataset ds;
  ds.name = "fig3";
  std::vector<Column> cols = {
      {"x", {}},          {"k_lower", {}},          {"k_upper", {}},
      {"T_lower", {}},    {"T_upper", {}},          {"peak_count", {}},
      {"k_lossless_lower", {}}, {"k_lossless_upper", {}}, {"k_two_mode_lower", {}},
      {"k_two_mode_upper", {}}, {"dk_lower", {}},   {"dk_upper", {}},
      {"dk_lossless_lower", {}}, {"dk_lossless_upper", {}}, {"dk_two_mode_lower", {}},
      {"dk_two_mode_upper", {}}};
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    const BranchPoint& b = branches[i];
    const auto two = branch_frequencies(tm, b.x);
    const double two_lo = two ? two->first : kNaN;
    const double two_hi = two ? two->second : kNaN;
    const double row[] = {b.x,
                          b.k_lower,
                          b.k_upper,
                          b.T_lower,
                          b.T_upper,
                          static_cast<double>(b.peak_count),
                          lossless[i].lower,
                          lossless[i].upper,
                          two_lo,
                          two_hi,
                          b.k_lower - pulled_center,
                          b.k_upper - pulled_center,
                          lossless[i].lower - lossless_center,
                          lossless[i].upper - lossless_center,
                          two_lo - tm.omega,
                          two_hi - tm.omega};
    for (std::size_t c = 0; c < cols.size(); ++c) cols[c].values.push_back(row[c]);
  }
  ds.columns = std::move(cols);
  ds.params = {{"zeta", zeta},
               {"zeta_m", zeta_m},
               {"x_min", x_grid.front()},
               {"x_max", x_grid.back()},
               {"x_points", static_cast<std::int64_t>(x_grid.size())},
               {"k_min", k_window.lo},
               {"k_max", k_window.hi},
               {"pulled_center", pulled_center},
               {"lossless_center", lossless_center},
               {"g_m", tm.g_m},
               {"delta", tm.delta},
               {"kappa", tm.kappa},
               {"grid_per_kappa", static_cast<std::int64_t>(opts.grid_per_kappa)},
               {"refine_tol", opts.refine_tol}};
  ds.validate();
  return ds;
}

FigureDataset run_threshold_sweep(double zeta, std::span<const double> zeta_m_grid) {
  require(zeta_m_grid.size() >= 2, ErrorKind::invalid_parameter,
          "threshold sweep needs at least two zeta_m values");
  const double star = coalescence_threshold(zeta);
  const double merge =
      find_merge_point(Polarizability(zeta), {zeta_m_grid.front(), zeta_m_grid.back()});
  const Bracket window = pair_window(zeta);
  PeakSearchOptions opts;
  opts.grid_per_kappa = 50;

  FigureDataset ds;
  ds.name = "threshold_sweep";
  std::vector<Column> cols = {{"zeta_m", {}},   {"n_peaks", {}},  {"T_high", {}},
                              {"T_low", {}},    {"peak_gap", {}}, {"fwhm", {}},
                              {"past_merge", {}}};
  for (double zm : zeta_m_grid) {
    const auto sys =
        CavitySystem::membrane_in_middle(Polarizability(zeta), Polarizability(zm), 0.0);
    const auto peaks = locate_maxima(sys, window.lo, window.hi, opts);
    double high = kNaN, low = kNaN, gap = kNaN, fwhm = kNaN;
    if (!peaks.empty()) {
      const auto tallest = std::max_element(
          peaks.begin(), peaks.end(),
          [](const PeakLocation& a, const PeakLocation& b) { return a.T < b.T; });
      high = tallest->T;
      if (peaks.size() == 1) {
        fwhm = 2.0 * peak_halfwidth(sys, peaks.front());
      } else {
        const auto other = tallest == peaks.begin() ? peaks.begin() + 1 : peaks.begin();
        low = other->T;
        gap = peaks.back().k - peaks.front().k;
      }
    }
    const double row[] = {zm,  static_cast<double>(peaks.size()),
                          high, low, gap, fwhm,
                          std::abs(zm) > std::abs(merge) ? 1.0 : 0.0};
    for (std::size_t c = 0; c < cols.size(); ++c) cols[c].values.push_back(row[c]);
  }
  ds.columns = std::move(cols);
  ds.params = {{"zeta", zeta},
               {"zeta_m_min", zeta_m_grid.front()},
               {"zeta_m_max", zeta_m_grid.back()},
               {"zeta_m_points", static_cast<std::int64_t>(zeta_m_grid.size())},
               {"zeta_m_star", star},
               {"zeta_m_merge", merge},
               {"window_lo", window.lo},
               {"window_hi", window.hi},
               {"grid_per_kappa", static_cast<std::int64_t>(opts.grid_per_kappa)}};
  ds.validate();
  return ds;
}

PhasePoint resonant_transmission_at_phase(double zeta, double zeta_m, double target_phase,
                                          const PeakSearchOptions& opts) {
  require(target_phase > 0.0 && std::isfinite(target_phase), ErrorKind::invalid_parameter,
          "target phase must be positive");
  constexpr double kStep = 1e-3;
  auto phase = [](double x, double k) { return 2.0 * k * x; };

  double x_a = 0.0;
  PeakLocation p_a = peak_near(zeta, zeta_m, 0.0, bare_resonance(2, zeta), opts);
  double x_b = x_a;
  PeakLocation p_b = p_a;
  while (phase(x_b, p_b.k) < target_phase) {
    x_a = x_b;
    p_a = p_b;
    x_b = x_a + kStep;
    require(x_b < 0.25, ErrorKind::invalid_parameter,
            "target phase not reached for |x| < 1/4");
    p_b = peak_near(zeta, zeta_m, x_b, p_a.k, opts);
  }
  for (int it = 0; it < 80 && x_b - x_a > 1e-14; ++it) {
    const double x_mid = 0.5 * (x_a + x_b);
    const PeakLocation p_mid = peak_near(zeta, zeta_m, x_mid, p_a.k, opts);
    if (phase(x_mid, p_mid.k) < target_phase) {
      x_a = x_mid;
      p_a = p_mid;
    } else {
      x_b = x_mid;
      p_b = p_mid;
    }
  }
  return {x_b, p_b.k, p_b.T, resonant_transmission(x_b, zeta_m, p_b.k)};
}

}  // namespace coalesce
