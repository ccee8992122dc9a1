#pragma once

// Reduced model of the coalescing pair: two opposite-parity modes at
// omega -/+ delta, each with half width kappa, coupled by a
// displacement-induced tunneling g_m x. Frequencies in units c/L,
// displacements in units of L, except for the SI membrane estimator.

#include <optional>
#include <utility>

namespace coalesce {

struct TwoModeParams {
  double omega;
  double delta;
  double kappa;
  double g_m;

  /// Throws invalid_parameter unless kappa > 0, delta >= 0, g_m >= 0 and
  /// omega is finite.
  void validate() const;
};

/// Parameters of the pair near 2 n pi for end mirrors zeta and reflector
/// zeta_m: omega = pair_center, delta = half_splitting, kappa =
/// bare_linewidth, g_m = tunneling_rate(zeta_m, omega).
TwoModeParams two_mode_params(double zeta, double zeta_m, int n = 1);

/// |kappa/(kappa + i(omega - delta - probe)) - kappa/(kappa + i(omega + delta - probe))|^2
double two_mode_transmission(const TwoModeParams& p, double probe);

/// g_m = 2 omega sqrt((zeta_m/2) atan2(2 zeta_m, zeta_m^2 - 1)).
double tunneling_rate(double zeta_m, double omega);

/// omega -/+ sqrt(delta^2 + (g_m x)^2 - kappa^2), lower first; empty while
/// the radicand is negative (merged peaks).
std::optional<std::pair<double, double>> branch_frequencies(const TwoModeParams& p,
                                                            double x);

/// 1 / (1 + (g_m x / delta)^2).
double two_mode_resonant_transmission(const TwoModeParams& p, double x);

/// G2^(0) = 2 omega^2 |zeta_m| (magnitude; c = L = 1).
double quadratic_coupling_base(double zeta_m, double omega);

struct SensitivityReport {
  double g2_base;
  double g2;
  double enhancement;
  double x_small_bound;
  double lamb_dicke_cap;
};

/// Readout sensitivity G2 = enhancement * G2^(0) with enhancement
/// 2 zeta^2 / sqrt(zeta*_m^2 - zeta_m^2). x_small_bound is
/// sqrt(delta^2 - kappa^2)/g_m. The Lamb-Dicke cap 2/(eta |zeta_m|) uses
/// eta = 2 pi |x| / lambda = omega |x| with x = displacement_amplitude, or
/// x_small_bound when none is given. Throws divergent_sensitivity at or
/// past the threshold (including the sliver where delta <= kappa).
SensitivityReport readout_sensitivity(double zeta, double zeta_m, double omega,
                                      std::optional<double> displacement_amplitude = {});

/// G2 from the branch curvature: g_m^2 / (2 sqrt(delta^2 - kappa^2)).
double branch_curvature(const TwoModeParams& p);

namespace si {
inline constexpr double kHbar = 1.054571817e-34;      // J s
inline constexpr double kBoltzmann = 1.380649e-23;    // J / K
}  // namespace si

struct MembranePhysical {
  double mass;         // kg
  double mech_freq;    // rad / s
  double temperature;  // K, 0 for the ground state
  double wavelength;   // m
  double zeta_m;
};

struct PhysicalEnhancement {
  double x_zpf;           // m
  double x_rms;           // m
  double eta;
  double lamb_dicke_cap;
  double nbar;
};

/// Zero-point and thermal displacement scales of a membrane and the
/// resulting bound 2/(eta |zeta_m|) on the usable enhancement.
PhysicalEnhancement physical_enhancement(const MembranePhysical& m);

}  // namespace coalesce
