#pragma once

// One-dimensional transfer matrices for zero-thickness scatterers and free
// propagation. Units: c = 1, cavity length L = 1, so the wavenumber k doubles
// as the angular frequency.
//
// A matrix maps the (right-moving, left-moving) amplitudes just left of an
// element onto those just right of it. With that convention a system's
// amplitude transmission is t = 1/m22 and its reflection (incident from the
// left) is r = -m21/m22.

#include <complex>
#include <span>
#include <vector>

namespace coalesce {

using Complex = std::complex<double>;

/// Dimensionless, real strength of a thin scatterer; |r|^2 = zeta^2/(1+zeta^2).
class Polarizability {
 public:
  /// Throws Error(invalid_parameter) for non-finite values.
  explicit Polarizability(double value);

  double value() const noexcept { return value_; }

  friend bool operator==(Polarizability, Polarizability) = default;

 private:
  double value_;
};

struct TransferMatrix2 {
  Complex m11{1.0}, m12{0.0}, m21{0.0}, m22{1.0};

  static constexpr TransferMatrix2 identity() noexcept { return {}; }

  /// m11*m22 - m12*m21 of the stored entries, evaluated with compensated
  /// arithmetic so the only error left is the rounding of the entries.
  Complex det() const noexcept;

  friend TransferMatrix2 operator*(const TransferMatrix2& a,
                                   const TransferMatrix2& b) noexcept {
    return {a.m11 * b.m11 + a.m12 * b.m21, a.m11 * b.m12 + a.m12 * b.m22,
            a.m21 * b.m11 + a.m22 * b.m21, a.m21 * b.m12 + a.m22 * b.m22};
  }
};

/// A thin element at an absolute position along the axis.
struct Scatterer {
  double position;
  Polarizability zeta;
};

/// Symmetric Fabry-Perot cavity on [0, 1]: identical end mirrors at 0 and 1
/// and an ordered set of interior scatterers strictly inside (0, 1).
class CavitySystem {
 public:
  /// Throws Error(invalid_parameter) unless positions are strictly increasing
  /// and strictly inside (0, 1).
  CavitySystem(Polarizability zeta_end, std::vector<Scatterer> elements);

  static CavitySystem empty(Polarizability zeta_end);

  /// Single middle reflector at 1/2 + x, |x| < 1/2.
  static CavitySystem membrane_in_middle(Polarizability zeta_end,
                                         Polarizability zeta_m,
                                         double displacement);

  Polarizability zeta_end() const noexcept { return zeta_end_; }
  std::span<const Scatterer> elements() const noexcept { return elements_; }

  /// The cavity seen from the other side (z -> 1 - z).
  CavitySystem mirrored() const;

 private:
  Polarizability zeta_end_;
  std::vector<Scatterer> elements_;
};

TransferMatrix2 scatter_matrix(Polarizability zeta) noexcept;

/// diag(e^{ikd}, e^{-ikd}); requires k > 0 and d >= 0.
TransferMatrix2 propagation_matrix(double k, double d);

/// Ordered product of end mirror, propagations, interior elements and the
/// far end mirror.
TransferMatrix2 system_matrix(const CavitySystem& sys, double k);

/// Intensity transmission 1/|m22|^2.
double transmission(const CavitySystem& sys, double k);

/// dT/dk evaluated analytically through the product rule.
double transmission_slope(const CavitySystem& sys, double k);

/// Amplitude reflection for incidence from the left, -m21/m22.
Complex reflection_amplitude(const CavitySystem& sys, double k);

/// Transfer matrix of a bare stack (no end mirrors). Positions must be
/// strictly increasing but are otherwise unconstrained.
TransferMatrix2 stack_matrix(std::span<const Scatterer> stack, double k);

/// |r/t| of a bare stack; equals |zeta| for a single element. Returns
/// +infinity if the stack is perfectly reflecting at k.
double effective_polarizability(std::span<const Scatterer> stack, double k);

/// N identical elements with uniform spacing, first element at 0.
std::vector<Scatterer> uniform_stack(Polarizability zeta, int count,
                                     double spacing);

struct StackOptimum {
  double spacing;
  double zeta_eff;
};

/// Grid search over uniform spacings in (0, 2 pi / k] maximizing the
/// effective polarizability at k.
StackOptimum optimal_uniform_spacing(Polarizability zeta, int count, double k,
                                     int grid_points = 20000);

}  // namespace coalesce
