#pragma once

#include <cstddef>
#include <vector>

#include "trapwalk/lattice.hpp"

namespace trapwalk {

// Principal Dirichlet eigenvalue of -(1/2)d^2/dx^2 on (0,1): pi^2/8 in the
// normalization of the discrete operator below.
inline constexpr double kEll1 = 1.23370055013616983;  // pi^2/8

// Dirichlet spectrum of -Delta_d = I - (1/2d)*(neighbor sum) on the interval
// {0,...,l-1}. Closed forms:
//   lambda_n = 1 - cos((n+1)pi/(l+1)),       n = 0..l-1
//   psi_n(x) = sqrt(2/(l+1)) sin((n+1)pi(x+1)/(l+1))
//   (psi_n, 1) = sqrt(2/(l+1)) cot((n+1)pi/(2(l+1))) for even n, 0 for odd n.
struct IntervalSpectrum {
  Coord length = 0;
  std::vector<double> eigenvalues;  // ascending, in (0, 2)
  std::vector<double> psi0_values;
  double psi0_mass = 0.0;            // (psi_0, 1)
  std::vector<double> psi_n_mass;    // (psi_n, 1), zero at odd n
};

double interval_eigenvalue(Coord l, Coord n);            // 2 sin^2((n+1)pi/(2(l+1)))
double interval_eigenvector(Coord l, Coord n, Coord x);  // psi_n(x), x in [0, l)
double interval_mass(Coord l, Coord n);                  // (psi_n, 1)
double interval_psi0_mass(Coord l);

IntervalSpectrum interval_spectrum(Coord l);  // EmptySpectrumError when l < 1

struct AsymptoticEnvelope {
  double central_value = 0.0;
  double relative_error_bound = 0.0;
  double lo = 0.0;  // central*(1 - bound)
  double hi = 0.0;  // central*(1 + bound)
  bool contains(double v) const noexcept { return lo <= v && v <= hi; }
};

// lambda_0 = (4 ell_1/(l+1)^2)(1 + o1),      |o1| <= pi^2/(12(1+l)^2)
AsymptoticEnvelope lambda0_envelope(Coord l);
// lambda_1 - lambda_0 = (12 ell_1/(l+1)^2)(1 + o2),  |o2| <= 10/(1+l)^2
AsymptoticEnvelope gap_envelope(Coord l);
// (psi_0, 1) = sqrt((l+1)/ell_1)(1 + o3),    |o3| <= 10/(1+l); the bound is
// vacuous below l = 10. The central value follows from the exact cot identity,
// sqrt(2/(l+1))*(2(l+1)/pi + O(1/l)).
AsymptoticEnvelope psi0_mass_envelope(Coord l);

// Full dense eigen-data of -Delta_d with Dirichlet condition outside `sites`.
// Eigenvectors are stored column-major (column n = psi_n over sites in the
// SiteSet's lexicographic order), sign fixed so the largest-magnitude entry is
// positive. SizeError above the dense cap.
struct DenseSpectrum {
  std::size_t n = 0;
  std::vector<double> eigenvalues;   // ascending
  std::vector<double> eigenvectors;  // n*n, column-major
  double value(std::size_t row, std::size_t col) const { return eigenvectors[col * n + row]; }
};

inline constexpr std::size_t kDenseCap = 512;

DenseSpectrum dense_spectrum(const SiteSet& sites);

// Smallest Dirichlet eigenvalue on an arbitrary finite site set: dense solve
// up to kDenseCap sites, conjugate-gradient inverse iteration (relative
// tolerance 1e-9) above it. EmptySpectrumError on an empty set via
// dense_spectrum; DomainError on empty input; SizeError above `cap`;
// ConvergenceError (carrying the residual) when iteration stalls.
double principal_eigenvalue(const SiteSet& sites, std::size_t cap = 100000);

}  // namespace trapwalk
