#pragma once

// Analytic predictions for a symmetric cavity with a thin middle reflector,
// in units c = L = 1. These serve as oracles for the transfer-matrix engine.

#include <optional>

namespace coalesce {

struct Bracket {
  double lo;
  double hi;
};

/// Empty-cavity resonance of mode n >= 1: (n-1) pi + arccos(zeta/sqrt(1+zeta^2)).
double bare_resonance(int n, double zeta);

/// Empty-cavity half width at half maximum 1/(2 |zeta| sqrt(1+zeta^2)).
/// Throws invalid_parameter for zeta = 0.
double bare_linewidth(double zeta);

/// Odd/even splitting 2 delta = |atan2(2 zeta_m, zeta_m^2 - 1)|. Runs from
/// pi at zeta_m = 0 down to 0 as |zeta_m| grows.
double mode_splitting(double zeta_m);

/// delta = mode_splitting / 2.
double half_splitting(double zeta_m);

/// zeta*_m = 2 zeta sqrt(zeta^2 + 1); same sign as zeta.
double coalescence_threshold(double zeta);

/// 4 zeta^2 (zeta^2 + 1) - zeta_m^2; non-negative exactly when
/// |zeta_m| <= |zeta*_m|.
double threshold_discriminant(double zeta, double zeta_m);

struct ShiftedPeaks {
  double cos_eps_plus;
  double cos_eps_minus;
  double eps_plus;   // principal arccos branch
  double eps_minus;
  double k_lower;    // 2 n pi - eps_minus
  double k_upper;    // 2 n pi - eps_plus
  double pair_gap;   // |eps_minus - eps_plus|
};

/// Transmission-peak positions of the coalescing pair near 2 n pi.
/// Throws above_threshold when |zeta_m| > |zeta*_m|.
ShiftedPeaks peak_positions(double zeta, double zeta_m, int n = 1);

/// Centre of the cavity-resonance pair near 2 n pi:
/// 2 n pi - atan(1/|zeta|) - delta. Valid on both sides of the threshold.
double pair_center(double zeta, double zeta_m, int n = 1);

/// 1 / (1 + [zeta_m sin(2 k x)]^2). The phase 2kx is 4 pi x / lambda.
double resonant_transmission(double x, double zeta_m, double k);

/// Root residual of the perfect-mirror eigenvalue problem with the reflector
/// at 1/2 + x: sin k - 2 zeta_m sin(k a) sin(k b), a = 1/2 + x, b = 1/2 - x.
/// Equivalent to cot(k a) + cot(k b) = 2 zeta_m away from nodes, and regular
/// at them.
double lossless_residual(double zeta_m, double x, double k);

/// Bisection on lossless_residual to 1e-12. Throws not_bracketed without a
/// sign change.
double lossless_eigenmode(double zeta_m, double x, Bracket bracket);

/// Per-element polarizability magnitude needed for coalescence with an
/// N-layer reflector: (zeta^2 / 2^(N-2))^(1/N). N >= 2.
double multilayer_threshold(double zeta, int layers);

struct ClosedFormReport {
  double kappa;
  double delta;
  double zeta_m_star;
  std::optional<double> eps_plus;
  std::optional<double> eps_minus;
  std::optional<double> pair_gap;
};

/// Everything above for one (zeta, zeta_m); the epsilon fields are empty
/// past the threshold.
ClosedFormReport closed_form_report(double zeta, double zeta_m);

}  // namespace coalesce
