#include <cmath>
#include <numbers>
#include <vector>

#include "coalesce/closed_form.hpp"
#include "coalesce/error.hpp"
#include "coalesce/experiments.hpp"
#include "coalesce/spectrum.hpp"
#include "coalesce/two_mode.hpp"
#include "doctest.h"
#include "support/approx.hpp"
#include "support/oracles.hpp"

using namespace coalesce;
using testing::Approx;
using std::numbers::pi;

namespace {

const Polarizability kZeta(-10.0);

CavitySystem centred(double zeta_m, double x = 0.0) {
  return CavitySystem::membrane_in_middle(kZeta, Polarizability(zeta_m), x);
}

int grid_maxima_count(const CavitySystem& sys, double lo, double hi) {
  // Dense oracle grid, independent of the library's own step choice.
  return static_cast<int>(
      oracle::grid_maxima([&](double k) { return transmission(sys, k); }, lo, hi, 600001).size());
}

}  // namespace

TEST_CASE("scan transmission") {
  const auto sys = centred(-50.0);
  const auto s = scan_transmission(sys, 5.8, 6.4, 2001);
  REQUIRE(s.size() == 2001);
  CHECK(s.front().k == 5.8);
  CHECK(s.back().k == 6.4);
  for (std::size_t i = 1; i < s.size(); ++i) CHECK(s[i].k > s[i - 1].k);
  for (const auto& p : s) {
    CHECK(p.T >= 0.0);
    CHECK(p.T <= 1.0 + 1e-12);
  }

  SUBCASE("thread count does not change the result") {
    const auto a = scan_transmission(sys, 5.8, 6.4, 20001, Parallelism{1});
    const auto b = scan_transmission(sys, 5.8, 6.4, 20001, Parallelism{4});
    REQUIRE(a.size() == b.size());
    bool identical = true;
    for (std::size_t i = 0; i < a.size(); ++i) identical &= a[i].k == b[i].k && a[i].T == b[i].T;
    CHECK(identical);
  }

  SUBCASE("near-perfect mirrors peak at n pi") {
    const auto perfect = CavitySystem::empty(Polarizability(-1e6));
    const auto grid = scan_transmission(perfect, 2.5, 3.5, 1001);
    const auto best = std::max_element(grid.begin(), grid.end(),
                                       [](auto& a, auto& b) { return a.T < b.T; });
    CHECK(std::abs(best->k - pi) <= 1e-3);
  }

  SUBCASE("maxima count either side of the threshold") {
    const double lo = 2 * pi - 0.5, hi = 2 * pi + 0.1;
    CHECK(grid_maxima_count(centred(-50.0), lo, hi) == 2);
    CHECK(grid_maxima_count(centred(-300.0), lo, hi) == 1);
    const auto above = locate_maxima(centred(-300.0), lo, hi);
    REQUIRE(above.size() == 1);
    CHECK(above[0].T < 1.0);
    const auto below = locate_maxima(centred(-50.0), lo, hi);
    REQUIRE(below.size() == 2);
    // Lossless and symmetric: both pair peaks reach full transmission.
    CHECK(below[0].T == Approx(1.0).epsilon(1e-9));
    CHECK(below[1].T == Approx(1.0).epsilon(1e-9));
  }

  CHECK_THROWS_AS(scan_transmission(sys, 6.4, 5.8, 10), Error);
  CHECK_THROWS_AS(scan_transmission(sys, 5.8, 6.4, 1), Error);
  CHECK_THROWS_AS(scan_transmission(sys, -1.0, 6.4, 10), Error);
}

TEST_CASE("find peaks") {
  SUBCASE("empty cavity") {
    const auto peaks = find_peaks(CavitySystem::empty(kZeta), 2.9, 3.2);
    REQUIRE(peaks.size() == 1);
    CHECK(peaks[0].k_peak == Approx(3.0419).epsilon(3e-5));
    CHECK(peaks[0].k_peak == Approx(bare_resonance(1, -10.0)).epsilon(1e-10));
    CHECK(peaks[0].T_peak == Approx(1.0).epsilon(1e-6));
    CHECK(peaks[0].hwhm == Approx(4.9752e-3).epsilon(0.01));
  }
  SUBCASE("pair below threshold") {
    const auto peaks = find_peaks(centred(-196.6), 6.1, 6.25);
    REQUIRE(peaks.size() == 2);
    CHECK(peaks[0].k_peak < peaks[1].k_peak);
    CHECK(peaks[1].k_peak - peaks[0].k_peak == Approx(2.12e-3).epsilon(0.05));
  }
  SUBCASE("single merged peak at the threshold") {
    const auto peaks = find_peaks(centred(coalescence_threshold(-10.0)), 6.1, 6.25);
    REQUIRE(peaks.size() == 1);
    CHECK(peaks[0].T_peak == Approx(1.0).epsilon(1e-3));
  }
  SUBCASE("no maximum is an empty result") {
    const auto sys = CavitySystem::membrane_in_middle(Polarizability(0.0), Polarizability(-3.0), 0.0);
    CHECK(locate_maxima(sys, 1.0, 2.0).empty());
  }
  SUBCASE("closed-form gap agrees with refined peaks") {
    for (double zm : {-150.0, -180.0, -196.6}) {
      const auto peaks = find_peaks(centred(zm), 6.1, 6.25);
      REQUIRE(peaks.size() == 2);
      CHECK(peaks[1].k_peak - peaks[0].k_peak ==
            Approx(peak_positions(-10.0, zm).pair_gap).epsilon(0.05));
    }
  }
  SUBCASE("option validation") {
    PeakSearchOptions coarse;
    coarse.grid_per_kappa = 5;
    CHECK_THROWS_AS(find_peaks(centred(-50.0), 6.0, 6.3, coarse), Error);
    PeakSearchOptions loose;
    loose.refine_tol = 1e-6;
    CHECK_THROWS_AS(find_peaks(centred(-50.0), 6.0, 6.3, loose), Error);
  }
}

TEST_CASE("peak half width") {
  SUBCASE("empty cavity half width shrinks with better mirrors") {
    double prev = INFINITY;
    for (double z : {-2.0, -5.0, -10.0, -30.0, -100.0}) {
      const auto sys = CavitySystem::empty(Polarizability(z));
      const double k0 = bare_resonance(1, z);
      const auto peaks = find_peaks(sys, k0 - 0.5, k0 + 0.5);
      REQUIRE(peaks.size() == 1);
      CHECK(peaks[0].hwhm < prev);
      prev = peaks[0].hwhm;
    }
  }
  SUBCASE("merged peak is broadened to 2 sqrt 2 kappa full width") {
    const auto sys = centred(coalescence_threshold(-10.0));
    const auto peaks = find_peaks(sys, 6.1, 6.25);
    REQUIRE(peaks.size() == 1);
    const double fwhm = 2.0 * peak_halfwidth(sys, peaks[0]);
    CHECK(fwhm == Approx(2.0 * std::sqrt(2.0) * bare_linewidth(-10.0)).epsilon(0.05));
  }
  SUBCASE("search range too short") {
    const auto sys = CavitySystem::empty(kZeta);
    const auto peaks = find_peaks(sys, 2.9, 3.2);
    REQUIRE(peaks.size() == 1);
    try {
      peak_halfwidth(sys, peaks[0], 1e-3);
      FAIL("expected edge_truncation");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::edge_truncation);
    }
  }
}

TEST_CASE("track branches") {
  const Bracket window{6.1, 6.25};
  SUBCASE("gap at rest") {
    const double xs[] = {0.0};
    const auto b = track_branches(kZeta, Polarizability(-196.6), xs, window);
    REQUIRE(b.size() == 1);
    CHECK(b[0].peak_count == 2);
    CHECK(b[0].k_upper - b[0].k_lower == Approx(2.12e-3).epsilon(0.05));
  }
  SUBCASE("continuity and linear asymptote") {
    const auto tm = two_mode_params(-10.0, -196.6);
    const auto xs = linspace(-0.005, 0.005, 101);
    const auto b = track_branches(kZeta, Polarizability(-196.6), xs, window);
    REQUIRE(b.size() == xs.size());
    const double dx = xs[1] - xs[0];
    for (std::size_t i = 1; i < b.size(); ++i) {
      CHECK(b[i].k_lower <= b[i].k_upper);
      CHECK(std::abs(b[i].k_upper - b[i - 1].k_upper) <= 1.5 * tm.g_m * dx);
      CHECK(std::abs(b[i].k_lower - b[i - 1].k_lower) <= 1.5 * tm.g_m * dx);
    }
    // Far from the crossing the gap approaches 2 g_m |x|.
    const double gap = b.back().k_upper - b.back().k_lower;
    CHECK(gap == Approx(2.0 * tm.g_m * xs.back()).epsilon(0.05));
    // Parity: +x and -x give the same pair.
    CHECK(b.front().k_lower == Approx(b.back().k_lower).epsilon(1e-10));
    CHECK(b.front().k_upper == Approx(b.back().k_upper).epsilon(1e-10));
  }
  SUBCASE("no reflector: branches one free spectral range apart") {
    const auto xs = linspace(-0.1, 0.1, 5);
    const auto b = track_branches(kZeta, Polarizability(0.0), xs, {2.5, 6.7});
    for (const auto& p : b) {
      CHECK(p.peak_count == 2);
      CHECK(p.k_upper - p.k_lower == Approx(pi).epsilon(1e-8));
    }
  }
  SUBCASE("window capturing more than one pair") {
    const double xs[] = {0.0};
    try {
      track_branches(kZeta, Polarizability(-50.0), xs, {5.0, 13.0});
      FAIL("expected pair_identification");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::pair_identification);
    }
  }
  SUBCASE("unsorted grid") {
    const double xs[] = {0.01, 0.0};
    CHECK_THROWS_AS(track_branches(kZeta, Polarizability(-50.0), xs, window), Error);
  }
}

TEST_CASE("track resonance") {
  const auto xs = linspace(-0.02, 0.02, 41);
  const auto t = track_resonance(kZeta, Polarizability(-5.0), xs, bare_resonance(2, -10.0));
  REQUIRE(t.size() == xs.size());
  CHECK(t[20].T == Approx(1.0).epsilon(1e-9));
  // The even mode is blind to the reflector at rest, but the neighbouring odd
  // mode still pulls the transmission peak slightly.
  CHECK(std::abs(t[20].k - bare_resonance(2, -10.0)) < 0.1 * bare_linewidth(-10.0));
  for (std::size_t i = 0; i < t.size(); ++i) CHECK(t[i].x == xs[i]);
  CHECK(t.front().T == Approx(t.back().T).epsilon(1e-9));
  CHECK(t.front().T < t[20].T);
}

TEST_CASE("track resonance on a coarse grid matches a fine one") {
  const auto coarse = linspace(-0.1, 0.1, 11);
  const auto fine = linspace(-0.1, 0.1, 201);
  const auto a = track_resonance(kZeta, Polarizability(-5.0), coarse, bare_resonance(2, -10.0));
  const auto b = track_resonance(kZeta, Polarizability(-5.0), fine, bare_resonance(2, -10.0));
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    CHECK(a[i].k == Approx(b[20 * i].k).epsilon(1e-9));
  }
}

TEST_CASE("merge point") {
  SUBCASE("zeta = -10") {
    const double merge = find_merge_point(kZeta, {-150.0, -260.0});
    CHECK(merge == Approx(coalescence_threshold(-10.0)).epsilon(0.05));
    // Order of the range ends does not matter.
    CHECK(find_merge_point(kZeta, {-260.0, -150.0}) == Approx(merge).epsilon(1e-6));
  }
  SUBCASE("zeta = -1") {
    const double merge = find_merge_point(Polarizability(-1.0), {-1.5, -5.0});
    CHECK(merge == Approx(-2.8284).epsilon(0.10));
  }
  SUBCASE("range entirely below the threshold") {
    try {
      find_merge_point(kZeta, {-100.0, -150.0});
      FAIL("expected not_bracketed");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::not_bracketed);
    }
  }
}
