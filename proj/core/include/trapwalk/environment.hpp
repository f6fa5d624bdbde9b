#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "trapwalk/lattice.hpp"
#include "trapwalk/rng.hpp"

namespace trapwalk {

// Bernoulli obstacle configuration on the box [-radius, radius]^dim.
// Occupancy is a pure function of (seed, site coordinates), independent of
// radius, so enlarging the box extends the same environment.
struct Environment {
  int dim = 1;
  Coord radius = 0;
  double density = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::uint8_t> occupancy;  // row-major lexicographic from (-R,...,-R)

  std::size_t site_count() const noexcept { return occupancy.size(); }
  Coord side() const noexcept { return 2 * radius + 1; }

  bool in_box(std::span<const Coord> pt) const noexcept;
  std::size_t index_of(std::span<const Coord> pt) const;  // DomainError outside
  void coords_of(std::size_t index, std::span<Coord> out) const;
  bool occupied(std::span<const Coord> pt) const { return occupancy[index_of(pt)] != 0; }
  bool occupied_1d(Coord x) const { return occupancy[std::size_t(x + radius)] != 0; }
};

// Counter-based occupancy predicate; usable without materializing a box.
bool site_is_obstacle(std::uint64_t seed, double density, std::span<const Coord> pt);

Environment sample_environment(int dim, Coord radius, double density, std::uint64_t seed);

// Explicit occupancy (tests, file parsing). density/seed are recorded as given.
Environment environment_from_occupancy(int dim, Coord radius, double density,
                                       std::uint64_t seed,
                                       std::vector<std::uint8_t> occupancy);

// Text format: one header line "dim radius density seed", then one line of
// hex-encoded occupancy (site i is bit 3 - i%4 of hex digit i/4), newline-
// terminated. Round-trips exactly.
void write_environment(std::ostream& os, const Environment& env);
Environment read_environment(std::istream& is);

struct GapInterval {
  Coord left = 0;
  Coord right = 0;  // inclusive; length = right - left + 1 >= 1
  bool left_truncated = false;   // run touches the left box edge
  bool right_truncated = false;  // run touches the right box edge
  Coord length() const noexcept { return right - left + 1; }
  bool truncated() const noexcept { return left_truncated || right_truncated; }
};

// One-dimensional gap decomposition: obstacle positions y_m in increasing
// order and the maximal obstacle-free runs between them.
struct GapStructure {
  Coord radius = 0;
  std::vector<Coord> obstacle_positions;  // ascending
  std::vector<GapInterval> intervals;     // ascending, positive length only
  std::optional<std::size_t> origin_gap_index;  // interval containing 0

  // Index into obstacle_positions of y_0, the smallest obstacle >= 0.
  std::optional<std::size_t> y0_index;

  // Interior gap lengths l_m = y_{m+1} - y_m - 1 >= 0 (zero lengths included).
  std::vector<Coord> interior_gap_lengths() const;

  // Interval of the interior gap with origin-anchored index k (sites strictly
  // between y_{k-1} and y_k); length may be zero. DomainError when the pair of
  // obstacles is not inside the box.
  GapInterval origin_indexed_gap(std::int64_t k) const;
};

GapStructure gap_structure(const Environment& env);  // DimensionError unless dim == 1

// n i.i.d. gap lengths, P(l = k) = density (1-density)^k.
std::vector<Coord> sample_gap_lengths(std::size_t n, double density, SplitMix64& rng);

enum class BinomialMode { Auto, ForceExact };

// One Binomial(n, q) draw. Branches: exact inversion from the mode when
// n*q <= 1e6 and n <= 1e9; Poisson approximation when n*q <= 10 and n > 1e9;
// otherwise normal with continuity correction. ForceExact requires the exact
// branch to be admissible.
std::uint64_t sample_binomial(std::uint64_t n, double q, SplitMix64& rng,
                              BinomialMode mode = BinomialMode::Auto);

struct GapHistogram {
  std::int64_t l_min = 0;
  std::uint64_t total = 0;      // n
  std::uint64_t below_min = 0;  // aggregate count of lengths < l_min
  std::map<Coord, std::uint64_t> counts;  // per length >= l_min

  std::uint64_t at_or_above(Coord l) const;
};

// Histogram of n i.i.d. geometric gap lengths without materializing them:
// lengths are visited in increasing order and the memoryless property makes
// each stratum count a conditional binomial draw, so the result is an exact
// multinomial sample and the counts always partition n.
GapHistogram stratified_gap_histogram(std::uint64_t n, double density, std::int64_t l_min,
                                      SplitMix64& rng, BinomialMode mode = BinomialMode::Auto);

struct FreeComponent {
  SiteSet sites;
  bool touches_boundary = false;
  bool site_was_obstacle = false;  // marker for the empty result
};

// Nearest-neighbor free component of `site` inside the box.
FreeComponent free_component(const Environment& env, std::span<const Coord> site);

}  // namespace trapwalk
