#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "trapwalk/environment.hpp"
#include "trapwalk/rng.hpp"

namespace trapwalk {

// One continuous-time walk of total jump rate 1 up to time t.
struct WalkSample {
  int dim = 1;
  double t = 0.0;
  std::uint64_t sausage_size = 1;  // |W(t)|, starting site included
  std::uint64_t jumps = 0;
  double max_displacement = 0.0;          // running sup-norm maximum
  std::vector<std::uint8_t> exit_flags;   // per requested radius: reached it by time t
};

WalkSample simulate_walk(int dim, double t, std::span<const double> radii, SplitMix64& rng);

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t n = 0;
  std::uint64_t seed = 0;
};

// Estimates are reproducible functions of (seed, n, params): sample i uses the
// substream derive_seed(seed, {tag, i}) and blocks are reduced in fixed order,
// so results are identical for any thread count.

// mean of e^{-nu |W(t)|}, nu = |log(1 - density)|  (annealed survival).
McEstimate annealed_mc(int dim, double density, double t, std::uint64_t n, std::uint64_t seed);

// Covariance of the survival field at x and y via two independent walks:
// mean of e^{-nu(|W_x|+|W_y|)} (e^{nu |W_x cap W_y|} - 1).
// A finite truncation_radius stops each walk's sausage at its first exit of
// the sup-norm ball of that radius around its start (so sites farther than
// 2*radius apart give exactly 0).
McEstimate correlation_mc(int dim, double density, std::span<const Coord> x,
                          std::span<const Coord> y, double t, std::uint64_t n,
                          std::uint64_t seed,
                          double truncation_radius = std::numeric_limits<double>::infinity());

// Direct killed-walk estimate of the quenched survival p(x,t,w). Walks
// leaving the box are censored, not killed: `estimate.mean` counts them dead
// (= lower), and [lower, upper] brackets the unclipped probability.
struct KilledWalkEstimate {
  McEstimate estimate;
  double censored_fraction = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

KilledWalkEstimate killed_walk_mc(const Environment& env, std::span<const Coord> x, double t,
                                  std::uint64_t n, std::uint64_t seed);

// Empirical P(sup-norm displacement >= floor(a*t) by time t).
McEstimate exit_time_tail_mc(double a, int dim, double t, std::uint64_t n, std::uint64_t seed);

}  // namespace trapwalk
