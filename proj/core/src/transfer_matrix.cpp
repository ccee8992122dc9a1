#include "coalesce/transfer_matrix.hpp"

#include <cmath>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <string>
#include <utility>

#include "coalesce/error.hpp"

namespace coalesce {

namespace {

using detail::require;

constexpr Complex kI{0.0, 1.0};

// Sum of signed products a[i]*b[i] with error-free products and a
// compensated running sum.
double compensated_dot(std::initializer_list<std::pair<double, double>> terms) {
  double sum = 0.0;
  double carry = 0.0;
  auto accumulate = [&](double v) {
    const double t = sum + v;
    carry += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  };
  for (const auto& [a, b] : terms) {
    const double p = a * b;
    accumulate(p);
    accumulate(std::fma(a, b, -p));
  }
  return sum + carry;
}

void check_wavenumber(double k) {
  require(std::isfinite(k) && k > 0.0, ErrorKind::invalid_parameter,
          "wavenumber must be finite and positive");
}

// Matrix together with its derivative in k, composed by the product rule.
struct Jet {
  TransferMatrix2 value;
  TransferMatrix2 slope{0.0, 0.0, 0.0, 0.0};
};

TransferMatrix2 add(const TransferMatrix2& a, const TransferMatrix2& b) {
  return {a.m11 + b.m11, a.m12 + b.m12, a.m21 + b.m21, a.m22 + b.m22};
}

// Left-multiplies by a k-independent element.
void apply(Jet& jet, const TransferMatrix2& element) {
  jet.value = element * jet.value;
  jet.slope = element * jet.slope;
}

// Left-multiplies by propagation over d.
void apply_propagation(Jet& jet, double k, double d) {
  const TransferMatrix2 p = propagation_matrix(k, d);
  const TransferMatrix2 dp{kI * d * p.m11, 0.0, 0.0, -kI * d * p.m22};
  jet.slope = add(dp * jet.value, p * jet.slope);
  jet.value = p * jet.value;
}

Jet system_jet(const CavitySystem& sys, double k) {
  check_wavenumber(k);
  const TransferMatrix2 end = scatter_matrix(sys.zeta_end());
  Jet jet{end};
  double pos = 0.0;
  for (const Scatterer& s : sys.elements()) {
    apply_propagation(jet, k, s.position - pos);
    apply(jet, scatter_matrix(s.zeta));
    pos = s.position;
  }
  apply_propagation(jet, k, 1.0 - pos);
  apply(jet, end);
  return jet;
}

void check_increasing(std::span<const Scatterer> elements) {
  for (std::size_t i = 1; i < elements.size(); ++i) {
    require(elements[i].position > elements[i - 1].position,
            ErrorKind::invalid_parameter,
            "scatterer positions must be strictly increasing");
  }
}

}  // namespace

Complex TransferMatrix2::det() const noexcept {
  const double re = compensated_dot({{m11.real(), m22.real()},
                                     {-m11.imag(), m22.imag()},
                                     {-m12.real(), m21.real()},
                                     {m12.imag(), m21.imag()}});
  const double im = compensated_dot({{m11.real(), m22.imag()},
                                     {m11.imag(), m22.real()},
                                     {-m12.real(), m21.imag()},
                                     {-m12.imag(), m21.real()}});
  return {re, im};
}

Polarizability::Polarizability(double value) : value_(value) {
  require(std::isfinite(value), ErrorKind::invalid_parameter,
          "polarizability must be finite");
}

CavitySystem::CavitySystem(Polarizability zeta_end,
                           std::vector<Scatterer> elements)
    : zeta_end_(zeta_end), elements_(std::move(elements)) {
  for (const Scatterer& s : elements_) {
    require(std::isfinite(s.position) && s.position > 0.0 && s.position < 1.0,
            ErrorKind::invalid_parameter,
            "interior scatterers must lie strictly inside (0, 1)");
  }
  check_increasing(elements_);
}

CavitySystem CavitySystem::empty(Polarizability zeta_end) {
  return CavitySystem(zeta_end, {});
}

CavitySystem CavitySystem::membrane_in_middle(Polarizability zeta_end,
                                              Polarizability zeta_m,
                                              double displacement) {
  require(std::isfinite(displacement) && std::abs(displacement) < 0.5,
          ErrorKind::invalid_parameter, "displacement must satisfy |x| < 1/2");
  return CavitySystem(zeta_end, {Scatterer{0.5 + displacement, zeta_m}});
}

CavitySystem CavitySystem::mirrored() const {
  std::vector<Scatterer> flipped;
  flipped.reserve(elements_.size());
  for (auto it = elements_.rbegin(); it != elements_.rend(); ++it) {
    flipped.push_back(Scatterer{1.0 - it->position, it->zeta});
  }
  return CavitySystem(zeta_end_, std::move(flipped));
}

TransferMatrix2 scatter_matrix(Polarizability zeta) noexcept {
  const double z = zeta.value();
  return {Complex{1.0, z}, Complex{0.0, z}, Complex{0.0, -z},
          Complex{1.0, -z}};
}

TransferMatrix2 propagation_matrix(double k, double d) {
  check_wavenumber(k);
  require(std::isfinite(d) && d >= 0.0, ErrorKind::invalid_parameter,
          "propagation length must be finite and non-negative");
  const double phase = k * d;
  return {std::polar(1.0, phase), 0.0, 0.0, std::polar(1.0, -phase)};
}

TransferMatrix2 system_matrix(const CavitySystem& sys, double k) {
  check_wavenumber(k);
  const TransferMatrix2 end = scatter_matrix(sys.zeta_end());
  TransferMatrix2 m = end;
  double pos = 0.0;
  for (const Scatterer& s : sys.elements()) {
    m = scatter_matrix(s.zeta) * propagation_matrix(k, s.position - pos) * m;
    pos = s.position;
  }
  return end * propagation_matrix(k, 1.0 - pos) * m;
}

double transmission(const CavitySystem& sys, double k) {
  return 1.0 / std::norm(system_matrix(sys, k).m22);
}

double transmission_slope(const CavitySystem& sys, double k) {
  const Jet jet = system_jet(sys, k);
  const double n = std::norm(jet.value.m22);
  const double dn = 2.0 * std::real(std::conj(jet.value.m22) * jet.slope.m22);
  return -dn / (n * n);
}

Complex reflection_amplitude(const CavitySystem& sys, double k) {
  const TransferMatrix2 m = system_matrix(sys, k);
  return -m.m21 / m.m22;
}

TransferMatrix2 stack_matrix(std::span<const Scatterer> stack, double k) {
  check_wavenumber(k);
  check_increasing(stack);
  TransferMatrix2 m = TransferMatrix2::identity();
  for (std::size_t i = 0; i < stack.size(); ++i) {
    if (i > 0) {
      m = propagation_matrix(k, stack[i].position - stack[i - 1].position) * m;
    }
    m = scatter_matrix(stack[i].zeta) * m;
  }
  return m;
}

double effective_polarizability(std::span<const Scatterer> stack, double k) {
  require(!stack.empty(), ErrorKind::invalid_parameter,
          "stack needs at least one element");
  const TransferMatrix2 m = stack_matrix(stack, k);
  // |r/t| = |m21|; a vanishing t shows up as a non-finite matrix entry.
  const double value = std::abs(m.m21);
  if (!std::isfinite(value) || !std::isfinite(std::abs(m.m22))) {
    return std::numeric_limits<double>::infinity();
  }
  return value;
}

std::vector<Scatterer> uniform_stack(Polarizability zeta, int count,
                                     double spacing) {
  require(count >= 1, ErrorKind::invalid_parameter,
          "stack needs at least one element");
  require(std::isfinite(spacing) && spacing > 0.0,
          ErrorKind::invalid_parameter, "stack spacing must be positive");
  std::vector<Scatterer> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out.push_back({i * spacing, zeta});
  return out;
}

StackOptimum optimal_uniform_spacing(Polarizability zeta, int count, double k,
                                     int grid_points) {
  check_wavenumber(k);
  require(grid_points >= 2, ErrorKind::invalid_parameter,
          "spacing grid needs at least two points");
  // Round-trip phase 2kd is periodic, so spacings in (0, pi/k] cover all
  // distinct stacks.
  const double period = std::numbers::pi / k;
  StackOptimum best{period, -1.0};
  for (int i = 1; i <= grid_points; ++i) {
    const double d = period * i / grid_points;
    const auto stack = uniform_stack(zeta, count, d);
    const double z = effective_polarizability(stack, k);
    if (z > best.zeta_eff) best = {d, z};
  }
  return best;
}

}  // namespace coalesce
