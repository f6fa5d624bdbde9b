#pragma once

#include <span>
#include <vector>

#include "trapwalk/environment.hpp"
#include "trapwalk/spectral.hpp"

namespace trapwalk {

enum class SurvivalMode { Exact, Bounded, Series };

// A survival probability with an explicit bracket: the true quantity lies in
// [value - error, value + error]. Exact values carry error = 0; bounded ones
// are stored as bracket midpoint +/- half-width; series values carry the tail
// tolerance.
struct SurvivalValue {
  double value = 0.0;
  double error = 0.0;
  SurvivalMode mode = SurvivalMode::Exact;
  double t = 0.0;
  std::vector<Coord> x;  // starting site; empty for spatial averages

  double lower() const noexcept { return value - error; }
  double upper() const noexcept { return value + error; }
};

// Chernoff rate J(x) = x asinh(x) - sqrt(1 + x^2) + 1, x >= 0.
double J(double x);

// Truncation-gap bound: 0 <= p - p_tilde_a <= k1 e^{-k2 t} with
// k1 = 2d e^{asinh(ad)} (the constant the Chernoff optimization yields;
// the looser printed variants differ, the bound is what matters) and
// k2 = J(ad)/d.
struct TruncationBound {
  double a = 0.0;
  int d = 1;
  double t = 0.0;
  double k1 = 0.0;
  double k2 = 0.0;
  double bound = 0.0;  // k1 * exp(-k2 * t)
};

TruncationBound truncation_gap_bound(double a, int dim, double t);

// Exact quenched survival in d = 1 from the spectrum of the gap containing x:
// p(x,t,w) = sum_n e^{-t lambda_n} (psi_n, 1) psi_n(x - left). Obstacle sites
// give exact 0; sites in a box-truncated gap give the bracket
// [interval-killed value, 1].
SurvivalValue quenched_survival_1d(const GapStructure& gaps, Coord x, double t);

// sum_{x in I} p(x,t,w) for an interval of length l:
// sum_n e^{-t lambda_n} (psi_n, 1)^2, exactly l at t = 0 by completeness.
double interval_sum_survival(Coord l, double t);

// Exact truncated survival p_tilde_U(x,t,w) via the dense spectrum of
// U \cap G^c(w). SizeError when that set exceeds the dense cap (use Monte
// Carlo instead).
SurvivalValue truncated_survival(const Environment& env, std::span<const Coord> x, double t,
                                 const SiteSet& U);

// Averaged survival p^L = (1/|Lambda_L|) sum_{y in Lambda_L} p(y,t,w).
// d = 1: exact gap-by-gap evaluation; d >= 2: per-component dense spectra
// (SizeError above the cap). Components cut by the box edge contribute
// brackets, making the result mode Bounded.
SurvivalValue averaged_survival(const Environment& env, double t, Coord L);

// d = 1 annealed survival <p(0,t)> as an exact series over the origin's gap:
//   sum_{l>=1} p^2 (1-p)^l * interval_sum_survival(l, t),
// truncated when the geometric remainder bound (1-p)^{N+1}((N+1)p + (1-p))
// falls below tail_tol.
SurvivalValue annealed_exact_1d(double density, double t, double tail_tol);

// Local spectral bracket at scale a: `upper` bounds p(x,t,w) pointwise
// (truncation bound + (2at+1)^{d/2} e^{-lambda_0 t}); `lower` bounds the local
// average (1/|U|) sum_{z in U} p(z,t,w) over U = Lambda(x, at).
struct LocalSurvivalBounds {
  double lower = 0.0;
  double upper = 0.0;
  double lambda0 = 0.0;  // principal eigenvalue of the free part of the ball
};

LocalSurvivalBounds survival_bounds(const Environment& env, std::span<const Coord> x, double t,
                                    double a);

}  // namespace trapwalk
