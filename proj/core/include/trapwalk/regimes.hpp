#pragma once

#include <span>
#include <vector>

namespace trapwalk {

// Named constants for dimension d and obstacle density p.
struct DomainConstants {
  int d = 1;
  double p = 0.0;
  double nu = 0.0;     // |log(1-p)|
  double w_d = 0.0;    // volume of the unit ball in R^d
  double ell_d = 0.0;  // principal Dirichlet eigenvalue of -(1/2d)Laplace on the unit ball
  double R0 = 0.0;     // (d/(w_d nu))^{1/d}
  double c1 = 0.0;     // ell_d / R0^2
  double c2 = 0.0;     // (w_d nu)^{2/(d+2)} ((d+2)/2) (2 ell_d/d)^{d/(d+2)}
  double alpha = 0.0;        // d/2
  double alpha_prime = 0.0;  // d/(d+2);  1/alpha' - 1/alpha = 1
  double gamma1 = 0.0;       // 2/(d+2)
  double gamma2 = 0.0;       // 2^{d/(d+2)} * 2/(d+2)
};

// ell_d = j^2_{d/2-1,1}/(2d), the Bessel zero found by bisection to 1e-12.
// d is capped at 16: beyond that the alternating Bessel series loses the
// digits the bisection needs.
DomainConstants constants(int d, double p);

// First positive zero of J_order (power-series sign scan + bisection).
double bessel_first_zero(double order);

// a(gamma) = (d/(d+2)) (((d+2)/2) gamma)^{-2/d} + gamma, in units of c2.
double a_of_gamma(int d, double gamma);

// abar(0) = 0 (sentinel), a(gamma) on (0, gamma1), 1 for gamma >= gamma1.
double abar(int d, double gamma);

enum class RegimeCase { Case1 = 1, Case2, Case3, Case4, Case5, Case6 };

// Scale classes for the non-exponential regimes.
enum class GrowthClass {
  PolynomialBelowT,            // 1 << L(t) <= t
  BetweenTAndSubexponential,   // L(t) >= t, log L(t) << t^{d/(d+2)}
};

// Predicate set for the exponential scale L(t) = e^{(gamma/d) c2 t^{d/(d+2)}}:
// Case3 (gamma < gamma1), Case4 (gamma1 < gamma < gamma2), Case5
// (gamma > gamma1), Case6 (gamma > gamma2). The conditions overlap, so a
// gamma can match several cases; exact boundary values match none.
std::vector<RegimeCase> classify_gamma(int d, double gamma);
std::vector<RegimeCase> classify_growth(GrowthClass g);

const char* regime_case_name(RegimeCase c);

struct Figure1Row {
  double gamma = 0.0;
  double abar = 0.0;
  double inv_abar = 0.0;  // +infinity at gamma = 0
  std::vector<RegimeCase> cases;
};

std::vector<Figure1Row> figure1_table(int d, std::span<const double> gamma_grid);

// Literature value of the site-percolation threshold (not derived here);
// tabulated for d = 2 only, ParameterError otherwise.
double site_percolation_threshold(int d);

}  // namespace trapwalk
