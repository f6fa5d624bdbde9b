#include "trapwalk/environment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "trapwalk/stats.hpp"

namespace trapwalk {

// ---- SiteSet ----

SiteSet::SiteSet(int dim, std::vector<Coord> flat_coords) : dim_(dim), flat_(std::move(flat_coords)) {
  if (dim < 1) throw DimensionError("SiteSet: dim must be >= 1");
  if (flat_.size() % static_cast<std::size_t>(dim) != 0)
    throw ParameterError("SiteSet: flat coordinate array not a multiple of dim");
  std::size_t n = flat_.size() / dim;
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  auto less = [&](std::size_t a, std::size_t b) {
    const Coord* pa = flat_.data() + a * dim_;
    const Coord* pb = flat_.data() + b * dim_;
    return std::lexicographical_compare(pa, pa + dim_, pb, pb + dim_);
  };
  std::sort(order.begin(), order.end(), less);
  std::vector<Coord> sorted(flat_.size());
  for (std::size_t i = 0; i < n; ++i)
    std::copy_n(flat_.data() + order[i] * dim_, dim_, sorted.data() + i * dim_);
  // Reject duplicates rather than silently merging.
  for (std::size_t i = 1; i < n; ++i) {
    if (std::equal(sorted.data() + (i - 1) * dim_, sorted.data() + i * dim_,
                   sorted.data() + i * dim_))
      throw ParameterError("SiteSet: duplicate site");
  }
  flat_ = std::move(sorted);
}

std::size_t SiteSet::find(std::span<const Coord> pt) const {
  if (pt.size() != static_cast<std::size_t>(dim_)) throw DimensionError("SiteSet::find: dim mismatch");
  std::size_t lo = 0, hi = size();
  while (lo < hi) {
    std::size_t mid = lo + (hi - lo) / 2;
    const Coord* pm = flat_.data() + mid * dim_;
    if (std::lexicographical_compare(pm, pm + dim_, pt.data(), pt.data() + dim_))
      lo = mid + 1;
    else
      hi = mid;
  }
  if (lo < size()) {
    const Coord* pl = flat_.data() + lo * dim_;
    if (std::equal(pl, pl + dim_, pt.data())) return lo;
  }
  return npos;
}

// ---- Environment ----

namespace {

constexpr std::size_t kMaxSites = std::size_t(1) << 28;

void validate_box(int dim, Coord radius, double density) {
  if (dim < 1) throw DimensionError("environment: dim must be >= 1");
  if (radius < 0) throw ParameterError("environment: radius must be >= 0");
  if (!(density >= 0.0 && density < 1.0))
    throw ParameterError("environment: density must lie in [0, 1)");
}

std::size_t checked_site_count(int dim, Coord radius) {
  std::size_t side = std::size_t(2 * radius + 1);
  std::size_t total = 1;
  for (int k = 0; k < dim; ++k) {
    if (total > kMaxSites / side)
      throw SizeError("environment: box exceeds the site cap 2^28");
    total *= side;
  }
  return total;
}

}  // namespace

bool Environment::in_box(std::span<const Coord> pt) const noexcept {
  if (pt.size() != static_cast<std::size_t>(dim)) return false;
  for (Coord c : pt)
    if (c < -radius || c > radius) return false;
  return true;
}

std::size_t Environment::index_of(std::span<const Coord> pt) const {
  if (pt.size() != static_cast<std::size_t>(dim)) throw DimensionError("index_of: dim mismatch");
  if (!in_box(pt)) throw DomainError("index_of: site outside the box");
  std::size_t idx = 0;
  std::size_t s = std::size_t(side());
  for (int k = 0; k < dim; ++k) idx = idx * s + std::size_t(pt[k] + radius);
  return idx;
}

void Environment::coords_of(std::size_t index, std::span<Coord> out) const {
  std::size_t s = std::size_t(side());
  for (int k = dim - 1; k >= 0; --k) {
    out[k] = Coord(index % s) - radius;
    index /= s;
  }
}

bool site_is_obstacle(std::uint64_t seed, double density, std::span<const Coord> pt) {
  std::uint64_t h = seed;
  for (Coord c : pt) h = hash_key(h, static_cast<std::uint64_t>(c));
  double u = double(mix64(h + kGolden) >> 11) * 0x1.0p-53;
  return u < density;
}

Environment sample_environment(int dim, Coord radius, double density, std::uint64_t seed) {
  validate_box(dim, radius, density);
  std::size_t total = checked_site_count(dim, radius);
  Environment env;
  env.dim = dim;
  env.radius = radius;
  env.density = density;
  env.seed = seed;
  env.occupancy.resize(total);
  std::vector<Coord> pt(dim, -radius);
  for (std::size_t i = 0; i < total; ++i) {
    env.occupancy[i] = site_is_obstacle(seed, density, pt) ? 1 : 0;
    for (int k = dim - 1; k >= 0; --k) {
      if (++pt[k] <= radius) break;
      pt[k] = -radius;
    }
  }
  return env;
}

Environment environment_from_occupancy(int dim, Coord radius, double density,
                                       std::uint64_t seed,
                                       std::vector<std::uint8_t> occupancy) {
  validate_box(dim, radius, density);
  std::size_t total = checked_site_count(dim, radius);
  if (occupancy.size() != total)
    throw ParameterError("environment_from_occupancy: occupancy size does not match the box");
  Environment env;
  env.dim = dim;
  env.radius = radius;
  env.density = density;
  env.seed = seed;
  env.occupancy = std::move(occupancy);
  return env;
}

void write_environment(std::ostream& os, const Environment& env) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", env.density);
  os << env.dim << ' ' << env.radius << ' ' << buf << ' ' << env.seed << '\n';
  std::string hex;
  std::size_t digits = (env.occupancy.size() + 3) / 4;
  hex.reserve(digits);
  static const char* kHex = "0123456789abcdef";
  for (std::size_t d = 0; d < digits; ++d) {
    unsigned v = 0;
    for (unsigned j = 0; j < 4; ++j) {
      std::size_t i = 4 * d + j;
      if (i < env.occupancy.size() && env.occupancy[i]) v |= (8u >> j);
    }
    hex.push_back(kHex[v]);
  }
  os << hex << '\n';
}

Environment read_environment(std::istream& is) {
  std::string header;
  // tolerate leading '#' comment lines so tool output headers round-trip
  do {
    if (!std::getline(is, header)) throw ParameterError("read_environment: missing header line");
  } while (!header.empty() && header[0] == '#');
  std::istringstream hs(header);
  int dim;
  Coord radius;
  double density;
  std::uint64_t seed;
  if (!(hs >> dim >> radius >> density >> seed))
    throw ParameterError("read_environment: malformed header, expected 'dim radius density seed'");
  std::string rest;
  if (hs >> rest) throw ParameterError("read_environment: trailing tokens in header");
  validate_box(dim, radius, density);
  std::size_t total = checked_site_count(dim, radius);
  std::string hex;
  if (!std::getline(is, hex)) throw ParameterError("read_environment: missing occupancy line");
  std::size_t digits = (total + 3) / 4;
  if (hex.size() != digits)
    throw ParameterError("read_environment: occupancy length does not match the box");
  std::vector<std::uint8_t> occ(total);
  for (std::size_t d = 0; d < digits; ++d) {
    char c = hex[d];
    unsigned v;
    if (c >= '0' && c <= '9') v = unsigned(c - '0');
    else if (c >= 'a' && c <= 'f') v = unsigned(c - 'a') + 10;
    else if (c >= 'A' && c <= 'F') v = unsigned(c - 'A') + 10;
    else throw ParameterError("read_environment: non-hex character in occupancy");
    for (unsigned j = 0; j < 4; ++j) {
      std::size_t i = 4 * d + j;
      if (i < total) occ[i] = (v & (8u >> j)) ? 1 : 0;
      else if (v & (8u >> j)) throw ParameterError("read_environment: nonzero padding bits");
    }
  }
  return environment_from_occupancy(dim, radius, density, seed, std::move(occ));
}

// ---- Gap structure (1-D) ----

GapStructure gap_structure(const Environment& env) {
  if (env.dim != 1) throw DimensionError("gap_structure: defined for dim == 1 only");
  GapStructure g;
  g.radius = env.radius;
  Coord R = env.radius;
  for (Coord x = -R; x <= R; ++x) {
    if (env.occupied_1d(x)) g.obstacle_positions.push_back(x);
  }
  Coord run_start = -R;
  bool in_run = false;
  for (Coord x = -R; x <= R + 1; ++x) {
    bool occ = x <= R ? env.occupied_1d(x) : true;
    if (!occ && !in_run) {
      run_start = x;
      in_run = true;
    } else if (occ && in_run) {
      GapInterval iv;
      iv.left = run_start;
      iv.right = x - 1;
      iv.left_truncated = (run_start == -R);
      iv.right_truncated = (x == R + 1);
      if (iv.left <= 0 && 0 <= iv.right) g.origin_gap_index = g.intervals.size();
      g.intervals.push_back(iv);
      in_run = false;
    }
  }
  for (std::size_t i = 0; i < g.obstacle_positions.size(); ++i) {
    if (g.obstacle_positions[i] >= 0) {
      g.y0_index = i;
      break;
    }
  }
  return g;
}

std::vector<Coord> GapStructure::interior_gap_lengths() const {
  std::vector<Coord> out;
  if (obstacle_positions.size() < 2) return out;
  out.reserve(obstacle_positions.size() - 1);
  for (std::size_t i = 1; i < obstacle_positions.size(); ++i)
    out.push_back(obstacle_positions[i] - obstacle_positions[i - 1] - 1);
  return out;
}

GapInterval GapStructure::origin_indexed_gap(std::int64_t k) const {
  if (!y0_index) throw DomainError("origin_indexed_gap: no obstacle at or right of the origin");
  std::int64_t i_right = std::int64_t(*y0_index) + k;
  std::int64_t i_left = i_right - 1;
  if (i_left < 0 || i_right >= std::int64_t(obstacle_positions.size()))
    throw DomainError("origin_indexed_gap: gap index outside the boxed obstacle range");
  GapInterval iv;
  iv.left = obstacle_positions[std::size_t(i_left)] + 1;
  iv.right = obstacle_positions[std::size_t(i_right)] - 1;
  return iv;
}

// ---- Gap sampling ----

std::vector<Coord> sample_gap_lengths(std::size_t n, double density, SplitMix64& rng) {
  if (!(density > 0.0 && density < 1.0))
    throw ParameterError("sample_gap_lengths: density must lie in (0, 1)");
  double log1mp = std::log1p(-density);
  std::vector<Coord> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = geometric_draw(rng, log1mp);
  return out;
}

namespace {

constexpr double kExactMeanCap = 1e6;
constexpr double kExactNCap = 1e9;
constexpr double kPoissonMeanCap = 10.0;

std::uint64_t binomial_exact_from_mode(std::uint64_t n, double q, SplitMix64& rng) {
  double u = rng.uniform01();
  std::uint64_t m = std::uint64_t(std::min(double(n), std::floor((double(n) + 1.0) * q)));
  double pm = std::exp(binomial_log_pmf(n, m, q));
  if (u < pm) return m;
  // Invert u against the enumeration m, m+1, m-1, m+2, m-2, ...; pmf terms
  // follow by recurrence from the mode, so each step is O(1).
  double acc = pm, up_term = pm, down_term = pm;
  std::uint64_t up = m, down = m;
  for (;;) {
    bool progressed = false;
    if (up < n) {
      up_term *= (double(n - up) / double(up + 1)) * (q / (1.0 - q));
      ++up;
      acc += up_term;
      progressed = true;
      if (u < acc) return up;
    }
    if (down > 0) {
      down_term *= (double(down) / double(n - down + 1)) * ((1.0 - q) / q);
      --down;
      acc += down_term;
      progressed = true;
      if (u < acc) return down;
    }
    // Exhausted support, or both tails underflowed: residual mass < 1 ulp.
    if (!progressed || (up_term == 0.0 && down_term == 0.0)) return m;
  }
}

std::uint64_t poisson_inversion(double lambda, SplitMix64& rng) {
  double u = rng.uniform01();
  double term = std::exp(-lambda);
  double acc = term;
  std::uint64_t k = 0;
  while (acc <= u && k < 400) {
    ++k;
    term *= lambda / double(k);
    acc += term;
  }
  return k;
}

double normal_draw(SplitMix64& rng) {
  double u1 = rng.uniform01();
  double u2 = rng.uniform01();
  return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace

std::uint64_t sample_binomial(std::uint64_t n, double q, SplitMix64& rng, BinomialMode mode) {
  if (!(q >= 0.0 && q <= 1.0)) throw ParameterError("sample_binomial: q must lie in [0, 1]");
  if (q == 0.0 || n == 0) return 0;
  if (q == 1.0) return n;
  double mean = double(n) * q;
  bool exact_ok = mean <= kExactMeanCap && double(n) <= kExactNCap;
  if (mode == BinomialMode::ForceExact && !exact_ok)
    throw ParameterError("sample_binomial: exact branch inadmissible at this n*q");
  if (exact_ok || mode == BinomialMode::ForceExact)
    return binomial_exact_from_mode(n, q, rng);
  if (mean <= kPoissonMeanCap) return std::min<std::uint64_t>(n, poisson_inversion(mean, rng));
  double sd = std::sqrt(mean * (1.0 - q));
  double v = std::floor(mean + sd * normal_draw(rng) + 0.5);
  if (v < 0.0) return 0;
  if (v > double(n)) return n;
  return std::uint64_t(v);
}

std::uint64_t GapHistogram::at_or_above(Coord l) const {
  std::uint64_t s = 0;
  for (auto it = counts.lower_bound(l); it != counts.end(); ++it) s += it->second;
  return s;
}

GapHistogram stratified_gap_histogram(std::uint64_t n, double density, std::int64_t l_min,
                                      SplitMix64& rng, BinomialMode mode) {
  if (n == 0 || n > (std::uint64_t(1) << 63))
    throw ParameterError("stratified_gap_histogram: n must lie in [1, 2^63]");
  if (!(density > 0.0 && density < 1.0))
    throw ParameterError("stratified_gap_histogram: density must lie in (0, 1)");
  if (l_min < 0) throw ParameterError("stratified_gap_histogram: l_min must be >= 0");
  GapHistogram h;
  h.l_min = l_min;
  h.total = n;
  // P(l >= l_min) = (1-p)^l_min; by memorylessness P(l = k | l >= k) = p.
  double q_tail = std::exp(double(l_min) * std::log1p(-density));
  std::uint64_t remaining = sample_binomial(n, q_tail, rng, mode);
  h.below_min = n - remaining;
  Coord l = l_min;
  while (remaining > 0) {
    std::uint64_t c = sample_binomial(remaining, density, rng, mode);
    h.counts[l] = c;
    remaining -= c;
    ++l;
  }
  return h;
}

// ---- Free component ----

FreeComponent free_component(const Environment& env, std::span<const Coord> site) {
  if (!env.in_box(site)) throw DomainError("free_component: site outside the box");
  FreeComponent out;
  std::size_t start = env.index_of(site);
  if (env.occupancy[start]) {
    out.site_was_obstacle = true;
    out.sites = SiteSet(env.dim, {});
    return out;
  }
  std::vector<std::uint8_t> seen(env.site_count(), 0);
  std::vector<std::size_t> stack{start};
  seen[start] = 1;
  std::vector<std::size_t> members;
  std::vector<Coord> pt(env.dim), nb(env.dim);
  while (!stack.empty()) {
    std::size_t idx = stack.back();
    stack.pop_back();
    members.push_back(idx);
    env.coords_of(idx, pt);
    for (int k = 0; k < env.dim; ++k) {
      if (pt[k] == -env.radius || pt[k] == env.radius) out.touches_boundary = true;
    }
    for (int k = 0; k < env.dim; ++k) {
      for (int s = -1; s <= 1; s += 2) {
        std::copy(pt.begin(), pt.end(), nb.begin());
        nb[k] += s;
        if (!env.in_box(nb)) continue;
        std::size_t j = env.index_of(nb);
        if (seen[j] || env.occupancy[j]) continue;
        seen[j] = 1;
        stack.push_back(j);
      }
    }
  }
  std::vector<Coord> flat;
  flat.reserve(members.size() * std::size_t(env.dim));
  for (std::size_t idx : members) {
    env.coords_of(idx, pt);
    flat.insert(flat.end(), pt.begin(), pt.end());
  }
  out.sites = SiteSet(env.dim, std::move(flat));
  return out;
}

}  // namespace trapwalk
