#include "trapwalk/spectral.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cmath>
#include <numbers>

#include "trapwalk/errors.hpp"
#include "trapwalk/stats.hpp"

namespace trapwalk {

namespace {

constexpr double kPi = std::numbers::pi;

void check_interval(Coord l, Coord n) {
  if (l < 1) throw EmptySpectrumError("interval spectrum: l must be >= 1");
  if (n < 0 || n >= l) throw ParameterError("interval spectrum: mode index out of range");
}

}  // namespace

double interval_eigenvalue(Coord l, Coord n) {
  check_interval(l, n);
  // 1 - cos(theta) = 2 sin^2(theta/2); the direct difference loses ~8 digits
  // at l ~ 1e4, the half-angle form none.
  double h = double(n + 1) * kPi / (2.0 * double(l + 1));
  double s = std::sin(h);
  return 2.0 * s * s;
}

double interval_eigenvector(Coord l, Coord n, Coord x) {
  check_interval(l, n);
  if (x < 0 || x >= l) throw ParameterError("interval_eigenvector: position out of range");
  double arg = double(n + 1) * kPi * double(x + 1) / double(l + 1);
  return std::sqrt(2.0 / double(l + 1)) * std::sin(arg);
}

double interval_mass(Coord l, Coord n) {
  check_interval(l, n);
  if (n % 2 == 1) return 0.0;  // odd modes are antisymmetric about the center
  double h = double(n + 1) * kPi / (2.0 * double(l + 1));
  return std::sqrt(2.0 / double(l + 1)) * (std::cos(h) / std::sin(h));
}

double interval_psi0_mass(Coord l) { return interval_mass(l, 0); }

IntervalSpectrum interval_spectrum(Coord l) {
  if (l < 1) throw EmptySpectrumError("interval_spectrum: l must be >= 1");
  IntervalSpectrum sp;
  sp.length = l;
  sp.eigenvalues.resize(std::size_t(l));
  sp.psi0_values.resize(std::size_t(l));
  sp.psi_n_mass.resize(std::size_t(l));
  for (Coord n = 0; n < l; ++n) {
    sp.eigenvalues[std::size_t(n)] = interval_eigenvalue(l, n);
    sp.psi_n_mass[std::size_t(n)] = interval_mass(l, n);
  }
  for (Coord x = 0; x < l; ++x) sp.psi0_values[std::size_t(x)] = interval_eigenvector(l, 0, x);
  sp.psi0_mass = sp.psi_n_mass[0];
  return sp;
}

namespace {

AsymptoticEnvelope make_envelope(double central, double bound) {
  AsymptoticEnvelope e;
  e.central_value = central;
  e.relative_error_bound = bound;
  // The interval only needs lo <= central(1-bound), hi >= central(1+bound);
  // widen by a hair of the central value so that exact values sitting within
  // rounding distance of the bound (lambda_0 at large l saturates it to
  // O(l^-4)) stay inside under double evaluation.
  e.lo = central * (1.0 - bound) - 8e-16 * std::fabs(central);
  e.hi = central * (1.0 + bound) + 8e-16 * std::fabs(central);
  return e;
}

}  // namespace

AsymptoticEnvelope lambda0_envelope(Coord l) {
  if (l < 1) throw ParameterError("lambda0_envelope: l must be >= 1");
  double L = double(l + 1);
  return make_envelope(4.0 * kEll1 / (L * L), kPi * kPi / (12.0 * L * L));
}

AsymptoticEnvelope gap_envelope(Coord l) {
  if (l < 1) throw ParameterError("gap_envelope: l must be >= 1");
  double L = double(l + 1);
  return make_envelope(12.0 * kEll1 / (L * L), 10.0 / (L * L));
}

AsymptoticEnvelope psi0_mass_envelope(Coord l) {
  if (l < 1) throw ParameterError("psi0_mass_envelope: l must be >= 1");
  double L = double(l + 1);
  return make_envelope(std::sqrt(L / kEll1), 10.0 / L);
}

// ---- Arbitrary finite site sets ----

namespace {

// -Delta_d restricted to `sites` with Dirichlet condition outside: identity
// minus (1/2d) x adjacency within the set.
Eigen::SparseMatrix<double> dirichlet_operator(const SiteSet& sites) {
  int dim = sites.dim();
  std::size_t n = sites.size();
  double w = -1.0 / (2.0 * double(dim));
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(n * (1 + 2 * std::size_t(dim)));
  std::vector<Coord> nb(static_cast<std::size_t>(dim));
  for (std::size_t i = 0; i < n; ++i) {
    trips.emplace_back(int(i), int(i), 1.0);
    auto pt = sites.site(i);
    for (int k = 0; k < dim; ++k) {
      for (int s = -1; s <= 1; s += 2) {
        std::copy(pt.begin(), pt.end(), nb.begin());
        nb[std::size_t(k)] += s;
        std::size_t j = sites.find(nb);
        if (j != SiteSet::npos) trips.emplace_back(int(i), int(j), w);
      }
    }
  }
  Eigen::SparseMatrix<double> A(static_cast<int>(n), static_cast<int>(n));
  A.setFromTriplets(trips.begin(), trips.end());
  return A;
}

}  // namespace

DenseSpectrum dense_spectrum(const SiteSet& sites) {
  std::size_t n = sites.size();
  if (n == 0) throw EmptySpectrumError("dense_spectrum: empty site set");
  if (n > kDenseCap) throw SizeError("dense_spectrum: site set exceeds the dense cap of 512");
  Eigen::MatrixXd A = Eigen::MatrixXd(dirichlet_operator(sites));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  if (es.info() != Eigen::Success)
    throw ConvergenceError("dense_spectrum: eigensolver failed", 0.0);
  DenseSpectrum sp;
  sp.n = n;
  sp.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + n);
  sp.eigenvectors.resize(n * n);
  for (std::size_t c = 0; c < n; ++c) {
    Eigen::VectorXd v = es.eigenvectors().col(int(c));
    std::size_t arg = 0;
    for (std::size_t r = 1; r < n; ++r)
      if (std::abs(v[int(r)]) > std::abs(v[int(arg)])) arg = r;
    if (v[int(arg)] < 0.0) v = -v;
    for (std::size_t r = 0; r < n; ++r) sp.eigenvectors[c * n + r] = v[int(r)];
  }
  return sp;
}

double principal_eigenvalue(const SiteSet& sites, std::size_t cap) {
  std::size_t n = sites.size();
  if (n == 0) throw DomainError("principal_eigenvalue: empty site set");
  if (n > cap) throw SizeError("principal_eigenvalue: site set exceeds the configured cap");
  if (n <= kDenseCap) return dense_spectrum(sites).eigenvalues[0];

  Eigen::SparseMatrix<double> A = dirichlet_operator(sites);
  // Inverse iteration; A is symmetric positive definite (spectrum in (0, 2])
  // so each solve is a plain conjugate gradient.
  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
  cg.setTolerance(1e-12);
  cg.compute(A);
  Eigen::VectorXd v = Eigen::VectorXd::Constant(int(n), 1.0 / std::sqrt(double(n)));
  double lambda = 0.0, residual = 0.0;
  constexpr int kMaxIter = 500;
  constexpr double kRelTol = 1e-9;
  for (int it = 0; it < kMaxIter; ++it) {
    Eigen::VectorXd w = cg.solve(v);
    if (cg.info() != Eigen::Success)
      throw ConvergenceError("principal_eigenvalue: inner CG solve failed", cg.error());
    w.normalize();
    Eigen::VectorXd Aw = A * w;
    lambda = w.dot(Aw);
    residual = (Aw - lambda * w).norm();
    v = w;
    if (residual <= kRelTol * lambda) return lambda;
  }
  throw ConvergenceError("principal_eigenvalue: inverse iteration did not reach tolerance",
                         residual);
}

}  // namespace trapwalk
