#include "coalesce/two_mode.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "coalesce/closed_form.hpp"
#include "coalesce/error.hpp"

namespace coalesce {

namespace {

using detail::fail;
using detail::require;

}  // namespace

void TwoModeParams::validate() const {
  require(std::isfinite(omega), ErrorKind::invalid_parameter, "omega must be finite");
  require(std::isfinite(kappa) && kappa > 0.0, ErrorKind::invalid_parameter,
          "kappa must be positive");
  require(std::isfinite(delta) && delta >= 0.0, ErrorKind::invalid_parameter,
          "delta must be non-negative");
  require(std::isfinite(g_m) && g_m >= 0.0, ErrorKind::invalid_parameter,
          "g_m must be non-negative");
}

TwoModeParams two_mode_params(double zeta, double zeta_m, int n) {
  const double omega = pair_center(zeta, zeta_m, n);
  TwoModeParams p{omega, half_splitting(zeta_m), bare_linewidth(zeta),
                  tunneling_rate(zeta_m, omega)};
  p.validate();
  return p;
}

double two_mode_transmission(const TwoModeParams& p, double probe) {
  p.validate();
  using C = std::complex<double>;
  const C a = p.kappa / C(p.kappa, p.omega - p.delta - probe);
  const C b = p.kappa / C(p.kappa, p.omega + p.delta - probe);
  return std::norm(a - b);
}

double tunneling_rate(double zeta_m, double omega) {
  require(std::isfinite(zeta_m), ErrorKind::invalid_parameter, "zeta_m must be finite");
  require(std::isfinite(omega) && omega > 0.0, ErrorKind::invalid_parameter,
          "omega must be positive");
  // atan2 carries the sign of zeta_m, so the product is never negative.
  const double radicand =
      0.5 * zeta_m * std::atan2(2.0 * zeta_m, zeta_m * zeta_m - 1.0);
  if (radicand < 0.0) {
    fail(ErrorKind::internal_consistency, "negative tunneling radicand");
  }
  return 2.0 * omega * std::sqrt(radicand);
}

std::optional<std::pair<double, double>> branch_frequencies(const TwoModeParams& p,
                                                            double x) {
  p.validate();
  const double gx = p.g_m * x;
  const double radicand = p.delta * p.delta + gx * gx - p.kappa * p.kappa;
  if (radicand < 0.0) return std::nullopt;
  const double half_gap = std::sqrt(radicand);
  return std::pair{p.omega - half_gap, p.omega + half_gap};
}

double two_mode_resonant_transmission(const TwoModeParams& p, double x) {
  p.validate();
  if (x == 0.0) return 1.0;
  require(p.delta > 0.0, ErrorKind::invalid_parameter,
          "resonant transmission undefined for delta = 0 and x != 0");
  const double ratio = p.g_m * x / p.delta;
  return 1.0 / (1.0 + ratio * ratio);
}

double quadratic_coupling_base(double zeta_m, double omega) {
  require(std::isfinite(omega) && omega > 0.0, ErrorKind::invalid_parameter,
          "omega must be positive");
  return 2.0 * omega * omega * std::abs(zeta_m);
}

double branch_curvature(const TwoModeParams& p) {
  p.validate();
  const double gap2 = p.delta * p.delta - p.kappa * p.kappa;
  if (gap2 <= 0.0) {
    fail(ErrorKind::divergent_sensitivity, "branch curvature diverges for delta <= kappa");
  }
  return p.g_m * p.g_m / (2.0 * std::sqrt(gap2));
}

SensitivityReport readout_sensitivity(double zeta, double zeta_m, double omega,
                                      std::optional<double> displacement_amplitude) {
  const double star = coalescence_threshold(zeta);
  const double star2_minus = star * star - zeta_m * zeta_m;
  const double delta = half_splitting(zeta_m);
  const double kappa = bare_linewidth(zeta);
  if (!(star2_minus > 0.0) || delta <= kappa || zeta_m == 0.0) {
    fail(ErrorKind::divergent_sensitivity,
         "readout sensitivity needs 0 < |zeta_m| < |zeta*_m| with delta > kappa");
  }

  SensitivityReport r{};
  r.g2_base = quadratic_coupling_base(zeta_m, omega);
  r.enhancement = 2.0 * zeta * zeta / std::sqrt(star2_minus);
  r.g2 = r.enhancement * r.g2_base;
  const double g_m = tunneling_rate(zeta_m, omega);
  r.x_small_bound = std::sqrt(delta * delta - kappa * kappa) / g_m;

  const double amplitude = displacement_amplitude.value_or(r.x_small_bound);
  require(std::isfinite(amplitude) && amplitude != 0.0, ErrorKind::invalid_parameter,
          "displacement amplitude must be non-zero");
  const double eta = omega * std::abs(amplitude);
  r.lamb_dicke_cap = 2.0 / (eta * std::abs(zeta_m));
  return r;
}

PhysicalEnhancement physical_enhancement(const MembranePhysical& m) {
  require(m.mass > 0.0 && std::isfinite(m.mass), ErrorKind::invalid_parameter,
          "mass must be positive");
  require(m.mech_freq > 0.0 && std::isfinite(m.mech_freq), ErrorKind::invalid_parameter,
          "mechanical frequency must be positive");
  require(m.wavelength > 0.0 && std::isfinite(m.wavelength), ErrorKind::invalid_parameter,
          "wavelength must be positive");
  require(m.temperature >= 0.0 && std::isfinite(m.temperature),
          ErrorKind::invalid_parameter, "temperature must be non-negative");
  require(std::isfinite(m.zeta_m) && m.zeta_m != 0.0, ErrorKind::invalid_parameter,
          "zeta_m must be finite and non-zero");

  PhysicalEnhancement out{};
  out.x_zpf = std::sqrt(si::kHbar / (2.0 * m.mass * m.mech_freq));
  if (m.temperature == 0.0) {
    out.nbar = 0.0;
  } else {
    const double ratio = si::kHbar * m.mech_freq / (si::kBoltzmann * m.temperature);
    out.nbar = 1.0 / std::expm1(ratio);
  }
  out.x_rms = out.x_zpf * std::sqrt(2.0 * out.nbar + 1.0);
  out.eta = 2.0 * std::numbers::pi * out.x_rms / m.wavelength;
  out.lamb_dicke_cap = 2.0 / (out.eta * std::abs(m.zeta_m));
  return out;
}

}  // namespace coalesce
