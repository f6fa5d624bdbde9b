#include "trapwalk/regimes.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "trapwalk/errors.hpp"

namespace trapwalk {

namespace {

// J_order(x) stripped of its positive prefactor (x/2)^order/Gamma(order+1):
// sum_k c_k with c_0 = 1, c_{k+1} = c_k * (-(x/2)^2)/((k+1)(k+1+order)).
// Shares the positive zeros of J_order.
double bessel_series(double order, double x) {
  double h = 0.25 * x * x;
  double term = 1.0, sum = 1.0;
  for (int k = 0; k < 400; ++k) {
    term *= -h / (double(k + 1) * (double(k + 1) + order));
    sum += term;
    if (std::abs(term) < 1e-18 * (1.0 + std::abs(sum))) break;
  }
  return sum;
}

}  // namespace

double bessel_first_zero(double order) {
  if (order <= -1.0) throw ParameterError("bessel_first_zero: order must be > -1");
  double step = 0.05;
  double prev_x = step, prev_f = bessel_series(order, step);
  double lo = 0.0, hi = 0.0;
  for (double x = 2 * step; x < 40.0; x += step) {
    double f = bessel_series(order, x);
    if ((prev_f > 0.0) != (f > 0.0)) {
      lo = prev_x;
      hi = x;
      break;
    }
    prev_x = x;
    prev_f = f;
  }
  if (hi == 0.0) throw ConvergenceError("bessel_first_zero: no sign change located", 0.0);
  for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
    double mid = 0.5 * (lo + hi);
    double f = bessel_series(order, mid);
    if ((f > 0.0) == (prev_f > 0.0))
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

DomainConstants constants(int d, double p) {
  if (d < 1 || d > 16)
    throw ParameterError("constants: d must lie in [1, 16] (Bessel-series conditioning)");
  if (!(p > 0.0 && p < 1.0)) throw ParameterError("constants: p must lie in (0, 1)");
  DomainConstants k;
  k.d = d;
  k.p = p;
  k.nu = -std::log1p(-p);
  double dd = double(d);
  k.w_d = std::pow(std::numbers::pi, dd / 2.0) / std::tgamma(dd / 2.0 + 1.0);
  double j = bessel_first_zero(dd / 2.0 - 1.0);
  k.ell_d = j * j / (2.0 * dd);
  k.R0 = std::pow(dd / (k.w_d * k.nu), 1.0 / dd);
  k.c1 = k.ell_d / (k.R0 * k.R0);
  k.c2 = std::pow(k.w_d * k.nu, 2.0 / (dd + 2.0)) * ((dd + 2.0) / 2.0) *
         std::pow(2.0 * k.ell_d / dd, dd / (dd + 2.0));
  k.alpha = dd / 2.0;
  k.alpha_prime = dd / (dd + 2.0);
  k.gamma1 = 2.0 / (dd + 2.0);
  k.gamma2 = std::pow(2.0, dd / (dd + 2.0)) * k.gamma1;
  return k;
}

double a_of_gamma(int d, double gamma) {
  if (d < 1) throw DimensionError("a_of_gamma: d must be >= 1");
  if (!(gamma > 0.0)) throw ParameterError("a_of_gamma: gamma must be > 0");
  double dd = double(d);
  return (dd / (dd + 2.0)) * std::pow(((dd + 2.0) / 2.0) * gamma, -2.0 / dd) + gamma;
}

double abar(int d, double gamma) {
  if (d < 1) throw DimensionError("abar: d must be >= 1");
  if (gamma < 0.0) throw ParameterError("abar: gamma must be >= 0");
  if (gamma == 0.0) return 0.0;  // sentinel: no t^{d/(d+2)} decay at bounded L
  double gamma1 = 2.0 / (double(d) + 2.0);
  return gamma < gamma1 ? a_of_gamma(d, gamma) : 1.0;
}

std::vector<RegimeCase> classify_gamma(int d, double gamma) {
  if (d < 1) throw DimensionError("classify_gamma: d must be >= 1");
  if (!(gamma > 0.0)) throw ParameterError("classify_gamma: gamma must be > 0");
  double dd = double(d);
  double gamma1 = 2.0 / (dd + 2.0);
  double gamma2 = std::pow(2.0, dd / (dd + 2.0)) * gamma1;
  std::vector<RegimeCase> out;
  if (gamma < gamma1) out.push_back(RegimeCase::Case3);
  if (gamma > gamma1 && gamma < gamma2) out.push_back(RegimeCase::Case4);
  if (gamma > gamma1) out.push_back(RegimeCase::Case5);
  if (gamma > gamma2) out.push_back(RegimeCase::Case6);
  return out;
}

std::vector<RegimeCase> classify_growth(GrowthClass g) {
  switch (g) {
    case GrowthClass::PolynomialBelowT:
      return {RegimeCase::Case1};
    case GrowthClass::BetweenTAndSubexponential:
      return {RegimeCase::Case2};
  }
  throw ParameterError("classify_growth: unknown growth class");
}

const char* regime_case_name(RegimeCase c) {
  switch (c) {
    case RegimeCase::Case1: return "case1";
    case RegimeCase::Case2: return "case2";
    case RegimeCase::Case3: return "case3";
    case RegimeCase::Case4: return "case4";
    case RegimeCase::Case5: return "case5";
    case RegimeCase::Case6: return "case6";
  }
  return "?";
}

std::vector<Figure1Row> figure1_table(int d, std::span<const double> gamma_grid) {
  if (gamma_grid.empty()) throw ParameterError("figure1_table: empty gamma grid");
  std::vector<Figure1Row> rows;
  rows.reserve(gamma_grid.size());
  for (double g : gamma_grid) {
    if (g < 0.0) throw ParameterError("figure1_table: gamma must be >= 0");
    Figure1Row row;
    row.gamma = g;
    row.abar = abar(d, g);
    row.inv_abar = g == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / row.abar;
    if (g > 0.0) row.cases = classify_gamma(d, g);
    rows.push_back(std::move(row));
  }
  return rows;
}

double site_percolation_threshold(int d) {
  // Z^2 site threshold, standard simulation value from the percolation
  // literature; no closed form exists.
  if (d == 2) return 0.592746;
  throw ParameterError("site_percolation_threshold: tabulated for d = 2 only");
}

}  // namespace trapwalk
