#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "trapwalk/environment.hpp"
#include "trapwalk/regimes.hpp"
#include "trapwalk/rng.hpp"

namespace trapwalk {

// d = 1 scaling data for the exponential regime L(t) = e^{nu [x]_-},
// x = (gamma c2/nu) t^{1/3}. [x]_- is the left limit of the integer part,
// ceil(x) - 1, which differs from floor(x) only at integers.
struct ScalingParams {
  double gamma = 0.0;
  double p = 0.0;
  double c = 0.0;   // gap-count constant: r = floor(c L p/(1-p))
  double nu = 0.0;
  double c2 = 0.0;  // c2(1, p)
  double a1 = 0.0;  // ((3/2) gamma)^3
  double s1 = 0.0;  // gamma c2 / (ell_1 nu)

  Coord bracket(double t) const;        // [x]_-; may be <= 0 for small t
  double L_of(double t) const;          // e^{nu bracket(t)}; needs bracket >= 1
  std::uint64_t n_of(double t) const;   // 2 floor(c L p/(1-p)) + 1
  double normalizer(double t) const;    // s1 t^{1/3} e^{-4 t ell_1/bracket^2}
  // Smallest t putting (gamma c2/nu) t^{1/3} at bracket_value + frac,
  // frac in (0, 1); handy for choosing experiment times.
  double time_at(Coord bracket_value, double frac) const;
};

ScalingParams scaling_params(double gamma, double p, double c);

// Leading form of the gap term X_k and its relative-error envelope:
//   leading = ((l+1)/ell_1) e^{-4 t ell_1/(l+1)^2}
// (the asymptotics the exact interval sum actually satisfies), with
//   envelope = e^{4 t ell_1 b1/(l+1)^2} (1 + b4) - 1,
//   b1 = pi^2/(12(1+l)^2),
//   b4 = 200/(1+l) + 500 e^{-2 pi^2 t/(l+1)^2 (1 - 10/(1+l)^2)}.
// The exact interval sum lies within leading*(1 +/- envelope) whenever the
// envelope is below 1.
struct XkTerm {
  double leading = 0.0;
  double envelope = 0.0;
};

XkTerm xk_term(Coord l, double t);

// One sandwich trial: exact flank sums over origin-indexed gaps versus the
// exact middle sum over Lambda_L. The inequality holds almost surely only
// eventually in t, so this reports and never asserts.
struct SandwichReport {
  Coord box_radius = 0;   // floor(L(t))
  Coord bracket = 0;
  std::int64_t m = 0;     // lower flank: gaps k in [-m, m], m = floor((1-eps) L p)
  std::int64_t M = 0;     // upper flank: gaps k in [-M, M], M = ceil((1+eps) L p)
  double lower = 0.0;
  double middle = 0.0;
  double upper = 0.0;
  double lower_leading = 0.0;  // same flanks from xk_term leading values
  double upper_leading = 0.0;
  bool pass = false;           // lower <= middle <= upper
};

SandwichReport sandwich_check(const Environment& env, double t, double gamma, double eps,
                              double c = 1.0);

// Levy spectral tail -L(x) = (2cp/(1-p)) e^{-nu floor((a1/nu) ln x)} for
// x > 0 (0 for x <= 0): right-continuous, nonincreasing, vanishing at
// infinity. Atoms sit at z_j = e^{nu j/a1}, j in Z, with masses
// m_j = (2cp^2/(1-p)^2)(1-p)^j.
double levy_tail(double x, double gamma, double p, double c);

struct LevyAtom {
  double x = 0.0;     // z_j
  double mass = 0.0;  // m_j
};

struct LevyTriple {
  double beta = 0.0;
  double sigma2 = 0.0;  // 0 for every law in this family
  std::vector<LevyAtom> atoms;  // ascending in x, j in [j_min, j_max]
  std::int64_t j_min = 0;
  std::int64_t j_max = 0;
  double truncation_error = 0.0;  // bound on the neglected CF integrand mass
};

// Atom list truncated so the neglected contribution to the CF exponent is
// below tol for |u| <= u_max. DivergenceError when a1 >= 2 (the x^2-integral
// near 0 fails exactly there).
LevyTriple levy_atoms(double gamma, double p, double c, double u_max, double tol);

enum class BetaKind { Beta1, Beta2 };

// Centering constants. The shipped value is the measure integral
//   beta1 = int x/(1+x^2) dL      (finite iff a1 < 1),
//   beta2 = -int x^3/(1+x^2) dL   (finite iff 1 < a1 < 3; the case-(ii)
//           compensator making exp{int (e^{iux}-1-iux) dL} mean-centered),
// evaluated over the atoms. `series` reports the printed closed series
// (2p/(1-p)) sum_k (1-p)^k/((1-p)^{k/a1}+(1-p)^{-k/a1}) (Beta1 form; NaN when
// its tails diverge) and `discrepancy` the difference, which vanishes at
// c p = 1-p.
struct BetaValue {
  double value = 0.0;
  double series = 0.0;
  double discrepancy = 0.0;
};

BetaValue beta(double gamma, double p, double c, BetaKind which, double tol);

// phi(u) = exp{i beta u - sigma^2 u^2/2 + sum_j (e^{iu z_j} - 1 - iu z_j/(1+z_j^2)) m_j}
std::complex<double> char_fn(double u, const LevyTriple& triple);

// Normalized gap-sum experiment: one draw is
//   (sum over n(t) iid geometric gaps of S(l, t) - [centered] n(t) E S)/normalizer,
// with S the exact interval survival sum, gaps drawn by the stratified
// histogram, and the expectation an exact geometric-law summation.
struct NormalizedDraw {
  double value = 0.0;
  std::uint64_t tail_count = 0;  // gaps whose single-gap value exceeds tail_threshold
};

class NormalizedSumSampler {
 public:
  // override_n forces the gap count (0 keeps n(t)); TimeTooSmallError when
  // bracket(t) < 1.
  NormalizedSumSampler(double gamma, double p, double c, double t, bool centered,
                       double tail_threshold = 1.0, std::uint64_t override_n = 0);

  NormalizedDraw draw(SplitMix64& rng);

  const ScalingParams& params() const noexcept { return params_; }
  double t() const noexcept { return t_; }
  std::uint64_t gap_count() const noexcept { return n_; }
  double normalizer() const noexcept { return normalizer_; }
  double gap_value(Coord l);            // S(l, t)/normalizer
  double mean_gap_sum() const noexcept { return mean_sum_; }  // n(t) E S/normalizer
  Coord tail_l_star() const noexcept { return l_star_; }

 private:
  double interval_sum(Coord l);

  ScalingParams params_;
  double t_ = 0.0;
  bool centered_ = false;
  std::uint64_t n_ = 0;
  double normalizer_ = 0.0;
  double mean_sum_ = 0.0;
  double tail_threshold_ = 1.0;
  Coord l_star_ = 0;  // smallest l with S(l,t)/normalizer > tail_threshold
  std::vector<double> table_;  // memoized S(l, t)
};

double normalized_sum_sample(double gamma, double p, double c, double t, bool centered,
                             SplitMix64& rng);

// Closed-form limit of n(t) E[Y^k; Y <= tau]:
//   2c (p/(1-p))^2 (1-p)^{((a1-k)/a1) floor((a1/nu) ln tau)} / (1 - (1-p)^{k/a1 - 1}),
// requiring k > a1 for the geometric factor to converge. The exponent sign
// makes the value grow with tau (more gaps pass the cut), which the finite-t
// evaluator confirms numerically.
double truncated_moment_limit(int k, double tau, double gamma, double p, double c);

// Exact finite-t counterpart n(t) E[Y^k; Y <= tau] by geometric summation.
double truncated_moment_finite_t(int k, double tau, double gamma, double p, double c, double t);

std::vector<std::complex<double>> empirical_cf(std::span<const double> samples,
                                               std::span<const double> u_grid);

}  // namespace trapwalk
