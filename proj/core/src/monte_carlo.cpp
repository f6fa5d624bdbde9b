#include "trapwalk/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <thread>

#include "trapwalk/errors.hpp"
#include "trapwalk/stats.hpp"

namespace trapwalk {

namespace {

// Substream tags, one per estimator family.
constexpr std::uint64_t kTagAnnealed = 0xA1;
constexpr std::uint64_t kTagCorrelation = 0xC0;
constexpr std::uint64_t kTagExit = 0xE0;

// Open-addressing set of packed site keys (21 signed bits per coordinate,
// dim <= 3); preallocated by the expected sausage size.
class PackedSet {
 public:
  explicit PackedSet(std::size_t expect) {
    std::size_t cap = 16;
    while (cap < 2 * expect + 2) cap <<= 1;
    slots_.assign(cap, kEmpty);
    mask_ = cap - 1;
  }

  bool insert(std::uint64_t key) {
    if (10 * (size_ + 1) >= 7 * (mask_ + 1)) grow();
    std::size_t i = mix64(key) & mask_;
    while (slots_[i] != kEmpty) {
      if (slots_[i] == key) return false;
      i = (i + 1) & mask_;
    }
    slots_[i] = key;
    ++size_;
    return true;
  }

  bool contains(std::uint64_t key) const {
    std::size_t i = mix64(key) & mask_;
    while (slots_[i] != kEmpty) {
      if (slots_[i] == key) return true;
      i = (i + 1) & mask_;
    }
    return false;
  }

  std::size_t size() const { return size_; }

 private:
  static constexpr std::uint64_t kEmpty = ~std::uint64_t(0);

  void grow() {
    std::vector<std::uint64_t> old = std::move(slots_);
    slots_.assign(2 * (mask_ + 1), kEmpty);
    mask_ = slots_.size() - 1;
    size_ = 0;
    for (std::uint64_t k : old)
      if (k != kEmpty) insert(k);
  }

  std::vector<std::uint64_t> slots_;
  std::size_t mask_ = 0;
  std::size_t size_ = 0;
};

constexpr Coord kPackRange = Coord(1) << 20;

std::uint64_t pack_site(std::span<const Coord> pos) {
  std::uint64_t key = 0;
  for (Coord c : pos) {
    if (c <= -kPackRange || c >= kPackRange)
      throw SizeError("walk displacement exceeds the packed-coordinate range");
    key = (key << 21) | std::uint64_t(c + kPackRange);
  }
  return key;
}

std::size_t expected_sausage(double t) {
  return std::size_t(4.0 * (t + 4.0 * std::sqrt(t) + 2.0));
}

// Deterministic block-wise map-reduce: sample i -> value, blocks of fixed
// size merged in index order, so the estimate is thread-count independent.
template <class F>
RunningMoments mc_reduce(std::uint64_t n, F&& value_of) {
  constexpr std::uint64_t kBlock = 4096;
  std::uint64_t nblocks = (n + kBlock - 1) / kBlock;
  std::vector<RunningMoments> blocks(nblocks);
  auto run_range = [&](std::uint64_t b_lo, std::uint64_t b_hi) {
    for (std::uint64_t b = b_lo; b < b_hi; ++b) {
      std::uint64_t end = std::min(n, (b + 1) * kBlock);
      for (std::uint64_t i = b * kBlock; i < end; ++i) blocks[b].add(value_of(i));
    }
  };
  unsigned hw = std::thread::hardware_concurrency();
  std::uint64_t nthreads = std::min<std::uint64_t>(hw ? hw : 1, nblocks);
  if (nthreads <= 1) {
    run_range(0, nblocks);
  } else {
    std::vector<std::thread> pool;
    std::uint64_t per = (nblocks + nthreads - 1) / nthreads;
    for (std::uint64_t th = 0; th < nthreads; ++th) {
      std::uint64_t lo = th * per, hi = std::min(nblocks, lo + per);
      if (lo < hi) pool.emplace_back(run_range, lo, hi);
    }
    for (auto& th : pool) th.join();
  }
  RunningMoments total;
  for (const auto& b : blocks) total.merge(b);
  return total;
}

McEstimate to_estimate(const RunningMoments& m, std::uint64_t seed) {
  McEstimate e;
  e.mean = m.mean();
  e.std_error = m.std_error();
  e.n = m.count();
  e.seed = seed;
  return e;
}

}  // namespace

WalkSample simulate_walk(int dim, double t, std::span<const double> radii, SplitMix64& rng) {
  if (dim < 1) throw DimensionError("simulate_walk: dim must be >= 1");
  if (t < 0.0) throw ParameterError("simulate_walk: t must be >= 0");
  WalkSample w;
  w.dim = dim;
  w.t = t;
  std::vector<Coord> pos(std::size_t(dim), 0);
  Coord lo = 0, hi = 0;  // d = 1: the sausage is just the range
  PackedSet set(dim > 1 && dim <= 3 ? expected_sausage(t) : 0);
  std::set<std::vector<Coord>> big;  // dim > 3 fallback
  if (dim > 1 && dim <= 3) set.insert(pack_site(pos));
  if (dim > 3) big.insert(pos);
  Coord maxdisp = 0;
  double time = 0.0;
  for (;;) {
    time += rng.exponential();
    if (time > t) break;
    std::uint64_t r = rng.below(2 * std::uint64_t(dim));
    std::size_t axis = std::size_t(r >> 1);
    pos[axis] += (r & 1) ? 1 : -1;
    ++w.jumps;
    maxdisp = std::max(maxdisp, std::abs(pos[axis]));
    if (dim == 1) {
      lo = std::min(lo, pos[0]);
      hi = std::max(hi, pos[0]);
    } else if (dim <= 3) {
      set.insert(pack_site(pos));
    } else {
      big.insert(pos);
    }
  }
  w.sausage_size = dim == 1 ? std::uint64_t(hi - lo + 1)
                            : (dim <= 3 ? set.size() : big.size());
  w.max_displacement = double(maxdisp);
  w.exit_flags.resize(radii.size());
  for (std::size_t j = 0; j < radii.size(); ++j)
    w.exit_flags[j] = double(maxdisp) >= radii[j] ? 1 : 0;
  return w;
}

McEstimate annealed_mc(int dim, double density, double t, std::uint64_t n, std::uint64_t seed) {
  if (!(density > 0.0 && density < 1.0))
    throw ParameterError("annealed_mc: density must lie in (0, 1)");
  if (n == 0) throw ParameterError("annealed_mc: n must be >= 1");
  double nu = -std::log1p(-density);
  auto value_of = [&](std::uint64_t i) {
    SplitMix64 rng(derive_seed(seed, {kTagAnnealed, i}));
    WalkSample w = simulate_walk(dim, t, {}, rng);
    return std::exp(-nu * double(w.sausage_size));
  };
  return to_estimate(mc_reduce(n, value_of), seed);
}

namespace {

// Sausage of a walk stopped at its first exit of the sup-norm ball of radius
// `stop` around the origin; d = 1 keeps only the range.
struct StoppedSausage {
  Coord lo = 0, hi = 0;
  std::vector<std::uint64_t> keys;  // packed, dims 2..3
  std::vector<std::vector<Coord>> raw;

  std::uint64_t size(int dim) const {
    if (dim == 1) return std::uint64_t(hi - lo + 1);
    return dim <= 3 ? keys.size() : raw.size();
  }
};

StoppedSausage stopped_walk(int dim, double t, double stop, SplitMix64& rng) {
  StoppedSausage s;
  std::vector<Coord> pos(std::size_t(dim), 0);
  PackedSet set(dim > 1 && dim <= 3 ? expected_sausage(std::min(t, 4.0 * stop * stop + 16.0)) : 0);
  std::set<std::vector<Coord>> big;
  if (dim > 1 && dim <= 3) {
    set.insert(pack_site(pos));
    s.keys.push_back(pack_site(pos));
  }
  if (dim > 3) big.insert(pos), s.raw.push_back(pos);
  double time = 0.0;
  Coord maxdisp = 0;
  for (;;) {
    time += rng.exponential();
    if (time > t) break;
    std::uint64_t r = rng.below(2 * std::uint64_t(dim));
    std::size_t axis = std::size_t(r >> 1);
    pos[axis] += (r & 1) ? 1 : -1;
    maxdisp = std::max(maxdisp, std::abs(pos[axis]));
    if (double(maxdisp) > stop) break;  // stopped: site beyond the ball not visited
    if (dim == 1) {
      s.lo = std::min(s.lo, pos[0]);
      s.hi = std::max(s.hi, pos[0]);
    } else if (dim <= 3) {
      if (set.insert(pack_site(pos))) s.keys.push_back(pack_site(pos));
    } else {
      if (big.insert(pos).second) s.raw.push_back(pos);
    }
  }
  return s;
}

}  // namespace

McEstimate correlation_mc(int dim, double density, std::span<const Coord> x,
                          std::span<const Coord> y, double t, std::uint64_t n,
                          std::uint64_t seed, double truncation_radius) {
  if (!(density > 0.0 && density < 1.0))
    throw ParameterError("correlation_mc: density must lie in (0, 1)");
  if (x.size() != std::size_t(dim) || y.size() != std::size_t(dim))
    throw DimensionError("correlation_mc: x/y dimension mismatch");
  if (n == 0) throw ParameterError("correlation_mc: n must be >= 1");
  double nu = -std::log1p(-density);
  auto value_of = [&](std::uint64_t i) {
    SplitMix64 rng(derive_seed(seed, {kTagCorrelation, i}));
    StoppedSausage wx = stopped_walk(dim, t, truncation_radius, rng);
    StoppedSausage wy = stopped_walk(dim, t, truncation_radius, rng);
    std::uint64_t inter = 0;
    if (dim == 1) {
      Coord a = std::max(wx.lo + x[0], wy.lo + y[0]);
      Coord b = std::min(wx.hi + x[0], wy.hi + y[0]);
      inter = b >= a ? std::uint64_t(b - a + 1) : 0;
    } else if (dim <= 3) {
      // shift both sausages into absolute coordinates and probe the larger
      PackedSet abs_y(wy.keys.size());
      std::vector<Coord> pt(static_cast<std::size_t>(dim));
      for (std::uint64_t k : wy.keys) {
        for (int c = dim - 1; c >= 0; --c) {
          pt[std::size_t(c)] = Coord((k >> (21 * (dim - 1 - c))) & ((1u << 21) - 1)) - kPackRange;
        }
        for (int c = 0; c < dim; ++c) pt[std::size_t(c)] += y[std::size_t(c)];
        abs_y.insert(pack_site(pt));
      }
      for (std::uint64_t k : wx.keys) {
        for (int c = dim - 1; c >= 0; --c) {
          pt[std::size_t(c)] = Coord((k >> (21 * (dim - 1 - c))) & ((1u << 21) - 1)) - kPackRange;
        }
        for (int c = 0; c < dim; ++c) pt[std::size_t(c)] += x[std::size_t(c)];
        if (abs_y.contains(pack_site(pt))) ++inter;
      }
    } else {
      std::set<std::vector<Coord>> abs_y;
      std::vector<Coord> pt(static_cast<std::size_t>(dim));
      for (const auto& s : wy.raw) {
        for (int c = 0; c < dim; ++c) pt[std::size_t(c)] = s[std::size_t(c)] + y[std::size_t(c)];
        abs_y.insert(pt);
      }
      for (const auto& s : wx.raw) {
        for (int c = 0; c < dim; ++c) pt[std::size_t(c)] = s[std::size_t(c)] + x[std::size_t(c)];
        if (abs_y.count(pt)) ++inter;
      }
    }
    double total = double(wx.size(dim) + wy.size(dim));
    return std::exp(-nu * total) * std::expm1(nu * double(inter));
  };
  return to_estimate(mc_reduce(n, value_of), seed);
}

KilledWalkEstimate killed_walk_mc(const Environment& env, std::span<const Coord> x, double t,
                                  std::uint64_t n, std::uint64_t seed) {
  if (!env.in_box(x)) throw DomainError("killed_walk_mc: x outside the box");
  if (t < 0.0) throw ParameterError("killed_walk_mc: t must be >= 0");
  if (n == 0) throw ParameterError("killed_walk_mc: n must be >= 1");
  constexpr std::uint64_t kTag = 0xCA11ED;
  KilledWalkEstimate out;
  if (env.occupied(x)) {  // killed instantly, no sampling noise
    out.estimate = {0.0, 0.0, n, seed};
    return out;
  }
  std::uint64_t censored = 0;  // written once, after the reduction
  std::vector<std::uint8_t> censored_flag(n, 0);
  auto value_of = [&](std::uint64_t i) {
    SplitMix64 rng(derive_seed(seed, {kTag, i}));
    std::vector<Coord> pos(x.begin(), x.end());
    double time = 0.0;
    for (;;) {
      time += rng.exponential();
      if (time > t) return 1.0;  // survived
      std::uint64_t r = rng.below(2 * std::uint64_t(env.dim));
      std::size_t axis = std::size_t(r >> 1);
      pos[axis] += (r & 1) ? 1 : -1;
      if (!env.in_box(pos)) {
        censored_flag[i] = 1;
        return 0.0;  // censored counts dead in the primary estimate
      }
      if (env.occupied(pos)) return 0.0;
    }
  };
  out.estimate = to_estimate(mc_reduce(n, value_of), seed);
  for (std::uint64_t i = 0; i < n; ++i) censored += censored_flag[i];
  out.censored_fraction = double(censored) / double(n);
  out.lower = out.estimate.mean;
  out.upper = out.estimate.mean + out.censored_fraction;
  return out;
}

McEstimate exit_time_tail_mc(double a, int dim, double t, std::uint64_t n, std::uint64_t seed) {
  if (a <= 0.0) throw ParameterError("exit_time_tail_mc: a must be > 0");
  if (dim < 1) throw DimensionError("exit_time_tail_mc: dim must be >= 1");
  if (t < 0.0) throw ParameterError("exit_time_tail_mc: t must be >= 0");
  if (n == 0) throw ParameterError("exit_time_tail_mc: n must be >= 1");
  Coord threshold = Coord(std::floor(a * t));
  auto value_of = [&](std::uint64_t i) {
    SplitMix64 rng(derive_seed(seed, {kTagExit, i}));
    if (threshold <= 0) return 1.0;
    std::vector<Coord> pos(std::size_t(dim), 0);
    double time = 0.0;
    for (;;) {
      time += rng.exponential();
      if (time > t) return 0.0;
      std::uint64_t r = rng.below(2 * std::uint64_t(dim));
      std::size_t axis = std::size_t(r >> 1);
      pos[axis] += (r & 1) ? 1 : -1;
      if (std::abs(pos[axis]) >= threshold) return 1.0;
    }
  };
  return to_estimate(mc_reduce(n, value_of), seed);
}

}  // namespace trapwalk
