#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "trapwalk/errors.hpp"
#include "trapwalk/regimes.hpp"

using namespace trapwalk;

namespace {

bool has_case(const std::vector<RegimeCase>& v, RegimeCase c) {
  return std::find(v.begin(), v.end(), c) != v.end();
}

}  // namespace

TEST_CASE("constants: d = 1 anchors") {
  auto dc = constants(1, 0.5);
  CHECK(dc.nu == doctest::Approx(std::log(2.0)).epsilon(1e-16));
  CHECK(dc.w_d == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(dc.ell_d == doctest::Approx(std::numbers::pi * std::numbers::pi / 8.0).epsilon(1e-13));
  CHECK(dc.R0 == doctest::Approx(0.72134752044448170).epsilon(1e-15));
  CHECK(dc.c1 == doctest::Approx(2.37094059034186383).epsilon(1e-12));
  CHECK(dc.c2 == doctest::Approx(2.52004414263019085).epsilon(1e-12));
  CHECK(dc.alpha == 0.5);
  CHECK(dc.alpha_prime == doctest::Approx(1.0 / 3.0).epsilon(1e-16));
  CHECK(dc.gamma1 == doctest::Approx(2.0 / 3.0).epsilon(1e-16));
  CHECK(dc.gamma2 == doctest::Approx(0.83994736659658211).epsilon(1e-15));
}

TEST_CASE("constants: d = 2, 3 eigenvalues via Bessel zeros") {
  CHECK(bessel_first_zero(0.0) == doctest::Approx(2.40482555769577277).epsilon(1e-12));
  auto d2 = constants(2, 0.5);
  CHECK(d2.ell_d == doctest::Approx(1.44579649073669613).epsilon(1e-11));
  CHECK(d2.w_d == doctest::Approx(std::numbers::pi).epsilon(1e-15));
  CHECK(d2.gamma1 == 0.5);
  CHECK(d2.gamma2 == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-14));

  // d = 3: j_{1/2,1} = pi, so ell_3 = pi^2/6 exactly
  CHECK(bessel_first_zero(0.5) == doctest::Approx(std::numbers::pi).epsilon(1e-12));
  auto d3 = constants(3, 0.5);
  CHECK(d3.ell_d == doctest::Approx(std::numbers::pi * std::numbers::pi / 6.0).epsilon(1e-11));
  CHECK(d3.w_d == doctest::Approx(4.0 * std::numbers::pi / 3.0).epsilon(1e-15));
}

TEST_CASE("constants: invariants across dimensions, parameter errors") {
  for (int d = 1; d <= 10; ++d) {
    auto dc = constants(d, 0.3);
    CHECK(std::fabs(1.0 / dc.alpha_prime - 1.0 / dc.alpha - 1.0) <= 1e-14);
    CHECK(dc.gamma2 / dc.gamma1 ==
          doctest::Approx(std::pow(2.0, double(d) / (d + 2.0))).epsilon(1e-14));
    CHECK(dc.gamma1 < dc.gamma2);
    CHECK(dc.c2 > 0.0);
    CHECK(dc.c1 > 0.0);
    CHECK(dc.ell_d > 0.0);
  }
  // nu and the derived radii move with p as they should
  auto lo = constants(1, 0.1), hi = constants(1, 0.9);
  CHECK(lo.nu < hi.nu);
  CHECK(lo.R0 > hi.R0);

  CHECK_THROWS_AS(constants(1, 0.0), ParameterError);
  CHECK_THROWS_AS(constants(1, 1.0), ParameterError);
  CHECK_THROWS_AS(constants(1, -0.2), ParameterError);
  CHECK_THROWS_AS(constants(0, 0.5), ParameterError);
  CHECK_THROWS_AS(constants(17, 0.5), ParameterError);
}

TEST_CASE("a_of_gamma: closed values and the gamma2 identity") {
  CHECK(a_of_gamma(1, 2.0 / 3.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(a_of_gamma(1, 0.5) == doctest::Approx(16.0 / 27.0 + 0.5).epsilon(1e-15));
  double g2 = constants(1, 0.5).gamma2;
  CHECK(a_of_gamma(1, g2) - g2 / 2.0 == doctest::Approx(0.62996052494743658).epsilon(1e-14));
  CHECK_THROWS_AS(a_of_gamma(1, 0.0), ParameterError);
  CHECK_THROWS_AS(a_of_gamma(1, -0.5), ParameterError);
}

TEST_CASE("a(gamma1) = 1 and the section-5.6 minimum, d = 1..10") {
  for (int d = 1; d <= 10; ++d) {
    auto dc = constants(d, 0.5);
    CHECK(std::fabs(a_of_gamma(d, dc.gamma1) - 1.0) <= 1e-12);

    // min over a dense grid of a(gamma) - gamma/2 against 2^{-2/(d+2)}
    const double step = 1e-4;
    double best = 1e300, best_gamma = 0.0;
    for (double g = step; g <= 2.0; g += step) {
      double v = a_of_gamma(d, g) - g / 2.0;
      if (v < best) {
        best = v;
        best_gamma = g;
      }
    }
    CHECK(std::fabs(best - std::pow(2.0, -2.0 / (d + 2.0))) <= 1e-6);
    CHECK(std::fabs(best_gamma - dc.gamma2) <= step);
  }
}

TEST_CASE("abar: sentinel, continuity, floor at 1") {
  CHECK(abar(1, 0.0) == 0.0);
  CHECK(abar(2, 0.25) == doctest::Approx(1.25).epsilon(1e-15));
  for (int d : {1, 2, 3}) {
    double g1 = constants(d, 0.5).gamma1;
    CHECK(abar(d, g1 - 1e-9) == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(abar(d, g1) == 1.0);
    for (double g = 0.01; g < 2.0; g += 0.01) {
      double v = abar(d, g);
      CHECK(v >= 1.0 - 1e-12);
      if (g >= g1)
        CHECK(v == 1.0);
      else
        CHECK(v > 1.0);
    }
  }
  CHECK_THROWS_AS(abar(1, -0.1), ParameterError);
}

TEST_CASE("classify: Table-1 predicate sets") {
  auto c8 = classify_gamma(2, 0.8);
  CHECK(c8.size() == 2);
  CHECK(has_case(c8, RegimeCase::Case5));
  CHECK(has_case(c8, RegimeCase::Case6));

  auto c6 = classify_gamma(2, 0.6);
  CHECK(c6.size() == 2);
  CHECK(has_case(c6, RegimeCase::Case4));
  CHECK(has_case(c6, RegimeCase::Case5));

  auto c3 = classify_gamma(2, 0.3);
  CHECK(c3.size() == 1);
  CHECK(has_case(c3, RegimeCase::Case3));

  // exact boundaries match no predicate
  CHECK(classify_gamma(2, 0.5).empty());

  auto poly = classify_growth(GrowthClass::PolynomialBelowT);
  CHECK(poly.size() == 1);
  CHECK(poly[0] == RegimeCase::Case1);
  auto mid = classify_growth(GrowthClass::BetweenTAndSubexponential);
  CHECK(mid.size() == 1);
  CHECK(mid[0] == RegimeCase::Case2);  // e.g. L(t) = t^2

  // Case6 implies Case5; Case3 and Case4 partition (0, gamma2) minus gamma1
  auto dc = constants(2, 0.5);
  for (double g = 0.01; g < 1.5; g += 0.01) {
    auto cs = classify_gamma(2, g);
    if (has_case(cs, RegimeCase::Case6)) CHECK(has_case(cs, RegimeCase::Case5));
    if (g < dc.gamma2 && std::fabs(g - dc.gamma1) > 1e-12)
      CHECK((has_case(cs, RegimeCase::Case3) ^ has_case(cs, RegimeCase::Case4)));
  }

  CHECK(std::string(regime_case_name(RegimeCase::Case4)) == "case4");
}

TEST_CASE("figure1_table: rows, sentinel, monotone shape") {
  std::vector<double> grid{0.0, 0.25, 0.5, 0.8};
  auto rows = figure1_table(2, grid);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].abar == 0.0);
  CHECK(std::isinf(rows[0].inv_abar));
  CHECK(rows[1].abar == doctest::Approx(1.25).epsilon(1e-15));
  CHECK(rows[1].inv_abar == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(rows[2].inv_abar == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(rows[3].inv_abar == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(rows[1].cases == classify_gamma(2, 0.25));

  std::vector<double> dense;
  for (double g = 0.02; g <= 1.2; g += 0.02) dense.push_back(g);
  auto curve = figure1_table(2, dense);
  double prev = 0.0;
  for (const auto& r : curve) {
    if (r.gamma < 0.5) {
      CHECK(r.inv_abar > prev);
      prev = r.inv_abar;
    } else {
      CHECK(r.inv_abar == doctest::Approx(1.0).epsilon(1e-15));
    }
  }

  CHECK_THROWS_AS(figure1_table(2, std::vector<double>{}), ParameterError);
  CHECK_THROWS_AS(figure1_table(2, std::vector<double>{-0.5}), ParameterError);
}

TEST_CASE("a1 tie-in at gamma2 and the percolation constant") {
  double g2 = constants(1, 0.5).gamma2;
  double a1 = std::pow(1.5 * g2, 3.0);
  CHECK(std::fabs(a1 - 2.0) <= 1e-12);

  CHECK(site_percolation_threshold(2) == 0.592746);
  CHECK_THROWS_AS(site_percolation_threshold(1), ParameterError);
  CHECK_THROWS_AS(site_percolation_threshold(3), ParameterError);
}
