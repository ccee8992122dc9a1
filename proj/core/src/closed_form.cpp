#include "coalesce/closed_form.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "coalesce/error.hpp"

namespace coalesce {

namespace {

using detail::fail;
using detail::require;
using std::numbers::pi;

void check_finite(double v, const char* what) {
  require(std::isfinite(v), ErrorKind::invalid_parameter, what);
}

}  // namespace

double bare_resonance(int n, double zeta) {
  require(n >= 1, ErrorKind::invalid_parameter, "mode index must be >= 1");
  check_finite(zeta, "zeta must be finite");
  return (n - 1) * pi + std::acos(zeta / std::hypot(1.0, zeta));
}

double bare_linewidth(double zeta) {
  check_finite(zeta, "zeta must be finite");
  require(zeta != 0.0, ErrorKind::invalid_parameter,
          "linewidth undefined without end mirrors (zeta = 0)");
  return 1.0 / (2.0 * std::abs(zeta) * std::hypot(1.0, zeta));
}

double mode_splitting(double zeta_m) {
  check_finite(zeta_m, "zeta_m must be finite");
  return std::abs(std::atan2(2.0 * zeta_m, zeta_m * zeta_m - 1.0));
}

double half_splitting(double zeta_m) { return 0.5 * mode_splitting(zeta_m); }

double coalescence_threshold(double zeta) {
  check_finite(zeta, "zeta must be finite");
  return 2.0 * zeta * std::sqrt(zeta * zeta + 1.0);
}

double threshold_discriminant(double zeta, double zeta_m) {
  return 4.0 * zeta * zeta * (zeta * zeta + 1.0) - zeta_m * zeta_m;
}

ShiftedPeaks peak_positions(double zeta, double zeta_m, int n) {
  check_finite(zeta, "zeta must be finite");
  check_finite(zeta_m, "zeta_m must be finite");
  require(zeta != 0.0, ErrorKind::invalid_parameter,
          "peak positions need end mirrors (zeta != 0)");
  require(n >= 1, ErrorKind::invalid_parameter, "pair index must be >= 1");

  const double scale = 4.0 * zeta * zeta * (zeta * zeta + 1.0);
  double disc = threshold_discriminant(zeta, zeta_m);
  if (disc < 0.0) {
    // zeta_m == zeta*_m evaluated in floating point can land a few ulps
    // below zero.
    if (disc < -1e-12 * scale) {
      fail(ErrorKind::above_threshold,
           "|zeta_m| exceeds the coalescence threshold; peak positions are "
           "complex");
    }
    disc = 0.0;
  }

  const double z2 = zeta * zeta;
  const double base = zeta_m * (2.0 * z2 + 1.0) * (zeta * zeta_m - 1.0);
  const double root = (zeta + zeta_m) * std::sqrt(disc);
  const double denom = 2.0 * zeta * (z2 + 1.0) * (zeta_m * zeta_m + 1.0);

  ShiftedPeaks out{};
  out.cos_eps_plus = (base + root) / denom;
  out.cos_eps_minus = (base - root) / denom;
  constexpr double slack = 1e-12;
  if (std::abs(out.cos_eps_plus) > 1.0 + slack ||
      std::abs(out.cos_eps_minus) > 1.0 + slack) {
    fail(ErrorKind::internal_consistency, "cos(eps) outside [-1, 1]");
  }
  out.eps_plus = std::acos(std::clamp(out.cos_eps_plus, -1.0, 1.0));
  out.eps_minus = std::acos(std::clamp(out.cos_eps_minus, -1.0, 1.0));
  const double anchor = 2.0 * n * pi;
  out.k_lower = anchor - std::max(out.eps_plus, out.eps_minus);
  out.k_upper = anchor - std::min(out.eps_plus, out.eps_minus);
  out.pair_gap = std::abs(out.eps_minus - out.eps_plus);
  return out;
}

double pair_center(double zeta, double zeta_m, int n) {
  require(n >= 1, ErrorKind::invalid_parameter, "pair index must be >= 1");
  require(zeta != 0.0, ErrorKind::invalid_parameter,
          "pair centre needs end mirrors (zeta != 0)");
  return 2.0 * n * pi - std::atan(1.0 / std::abs(zeta)) -
         half_splitting(zeta_m);
}

double resonant_transmission(double x, double zeta_m, double k) {
  const double s = zeta_m * std::sin(2.0 * k * x);
  return 1.0 / (1.0 + s * s);
}

double lossless_residual(double zeta_m, double x, double k) {
  const double a = 0.5 + x;
  const double b = 0.5 - x;
  return std::sin(k) - 2.0 * zeta_m * std::sin(k * a) * std::sin(k * b);
}

double lossless_eigenmode(double zeta_m, double x, Bracket bracket) {
  check_finite(zeta_m, "zeta_m must be finite");
  require(bracket.lo < bracket.hi, ErrorKind::invalid_parameter,
          "bracket must satisfy lo < hi");
  double lo = bracket.lo;
  double hi = bracket.hi;
  double f_lo = lossless_residual(zeta_m, x, lo);
  const double f_hi = lossless_residual(zeta_m, x, hi);
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if ((f_lo < 0.0) == (f_hi < 0.0)) {
    fail(ErrorKind::not_bracketed, "no sign change of the eigenvalue residual");
  }
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = lossless_residual(zeta_m, x, mid);
    if (f_mid == 0.0) return mid;
    if ((f_mid < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double multilayer_threshold(double zeta, int layers) {
  check_finite(zeta, "zeta must be finite");
  require(layers >= 2, ErrorKind::invalid_parameter,
          "multilayer threshold needs N >= 2");
  return std::pow(zeta * zeta / std::ldexp(1.0, layers - 2), 1.0 / layers);
}

ClosedFormReport closed_form_report(double zeta, double zeta_m) {
  ClosedFormReport r{};
  r.kappa = bare_linewidth(zeta);
  r.delta = half_splitting(zeta_m);
  r.zeta_m_star = coalescence_threshold(zeta);
  try {
    const ShiftedPeaks p = peak_positions(zeta, zeta_m);
    r.eps_plus = p.eps_plus;
    r.eps_minus = p.eps_minus;
    r.pair_gap = p.pair_gap;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::above_threshold) throw;
  }
  return r;
}

}  // namespace coalesce
