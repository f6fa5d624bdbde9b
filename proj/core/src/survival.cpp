#include "trapwalk/survival.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "trapwalk/errors.hpp"
#include "trapwalk/stats.hpp"

namespace trapwalk {

namespace {

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

SurvivalValue exact_value(double v, double t, std::vector<Coord> x) {
  SurvivalValue s;
  s.value = clamp01(v);
  s.error = 0.0;
  s.mode = SurvivalMode::Exact;
  s.t = t;
  s.x = std::move(x);
  return s;
}

SurvivalValue bracket_value(double lo, double hi, double t, std::vector<Coord> x) {
  SurvivalValue s;
  lo = clamp01(lo);
  hi = clamp01(hi);
  s.value = 0.5 * (lo + hi);
  s.error = 0.5 * (hi - lo);
  s.mode = SurvivalMode::Bounded;
  s.t = t;
  s.x = std::move(x);
  return s;
}

// p(x,t) inside an interval of length l at offset x0 in [0, l).
double interval_site_survival(Coord l, Coord x0, double t) {
  KahanSum acc;
  for (Coord n = 0; n < l; n += 2) {  // odd modes carry zero mass
    acc.add(std::exp(-t * interval_eigenvalue(l, n)) * interval_mass(l, n) *
            interval_eigenvector(l, n, x0));
  }
  return clamp01(acc.value());
}

}  // namespace

double J(double x) {
  if (x < 0.0) throw ParameterError("J: argument must be >= 0");
  return x * std::asinh(x) - std::sqrt(1.0 + x * x) + 1.0;
}

TruncationBound truncation_gap_bound(double a, int dim, double t) {
  if (a <= 0.0) throw ParameterError("truncation_gap_bound: a must be > 0");
  if (dim < 1) throw DimensionError("truncation_gap_bound: dim must be >= 1");
  if (t < 0.0) throw ParameterError("truncation_gap_bound: t must be >= 0");
  TruncationBound b;
  b.a = a;
  b.d = dim;
  b.t = t;
  double ad = a * double(dim);
  b.k1 = 2.0 * double(dim) * std::exp(std::asinh(ad));
  b.k2 = J(ad) / double(dim);
  b.bound = b.k1 * std::exp(-b.k2 * t);
  return b;
}

SurvivalValue quenched_survival_1d(const GapStructure& gaps, Coord x, double t) {
  if (t < 0.0) throw ParameterError("quenched_survival_1d: t must be >= 0");
  if (x < -gaps.radius || x > gaps.radius)
    throw DomainError("quenched_survival_1d: x outside the box");
  if (std::binary_search(gaps.obstacle_positions.begin(), gaps.obstacle_positions.end(), x))
    return exact_value(0.0, t, {x});
  // Locate the gap containing x.
  auto it = std::upper_bound(gaps.intervals.begin(), gaps.intervals.end(), x,
                             [](Coord v, const GapInterval& iv) { return v < iv.left; });
  if (it == gaps.intervals.begin()) throw DomainError("quenched_survival_1d: no gap contains x");
  const GapInterval& iv = *(it - 1);
  if (x > iv.right) throw DomainError("quenched_survival_1d: no gap contains x");
  if (t == 0.0) return exact_value(1.0, t, {x});
  double killed = interval_site_survival(iv.length(), x - iv.left, t);
  if (iv.truncated()) return bracket_value(killed, 1.0, t, {x});
  return exact_value(killed, t, {x});
}

double interval_sum_survival(Coord l, double t) {
  if (l < 1) throw ParameterError("interval_sum_survival: l must be >= 1");
  if (t < 0.0) throw ParameterError("interval_sum_survival: t must be >= 0");
  if (t == 0.0) return double(l);  // completeness: sum_n (psi_n,1)^2 = l
  KahanSum acc;
  for (Coord n = 0; n < l; n += 2) {
    double m = interval_mass(l, n);
    acc.add(std::exp(-t * interval_eigenvalue(l, n)) * m * m);
  }
  return acc.value();
}

SurvivalValue truncated_survival(const Environment& env, std::span<const Coord> x, double t,
                                 const SiteSet& U) {
  if (t < 0.0) throw ParameterError("truncated_survival: t must be >= 0");
  if (!env.in_box(x)) throw DomainError("truncated_survival: x outside the box");
  if (!U.contains(x)) throw DomainError("truncated_survival: x not in U");
  if (env.occupied(x)) return exact_value(0.0, t, {x.begin(), x.end()});
  std::vector<Coord> free_flat;
  free_flat.reserve(U.flat().size());
  for (std::size_t i = 0; i < U.size(); ++i) {
    auto pt = U.site(i);
    if (!env.in_box(pt)) throw DomainError("truncated_survival: U leaves the box");
    if (!env.occupied(pt)) free_flat.insert(free_flat.end(), pt.begin(), pt.end());
  }
  SiteSet F(env.dim, std::move(free_flat));
  if (F.size() > kDenseCap)
    throw SizeError("truncated_survival: free part of U exceeds the dense cap; use Monte Carlo");
  DenseSpectrum sp = dense_spectrum(F);
  std::size_t xi = F.find(x);
  KahanSum acc;
  for (std::size_t n = 0; n < sp.n; ++n) {
    KahanSum overlap;
    for (std::size_t r = 0; r < sp.n; ++r) overlap.add(sp.value(r, n));
    acc.add(std::exp(-t * sp.eigenvalues[n]) * overlap.value() * sp.value(xi, n));
  }
  return exact_value(acc.value(), t, {x.begin(), x.end()});
}

namespace {

// sum over x in [x_lo, x_hi] (coordinates relative to the gap, in [0, l)) of
// exact interval survival, plus the count of sites for the bracket's top.
double interval_partial_sum(Coord l, Coord x_lo, Coord x_hi, double t) {
  KahanSum total;
  for (Coord n = 0; n < l; n += 2) {
    double mass = interval_mass(l, n);
    KahanSum inner;
    for (Coord x = x_lo; x <= x_hi; ++x) inner.add(interval_eigenvector(l, n, x));
    total.add(std::exp(-t * interval_eigenvalue(l, n)) * mass * inner.value());
  }
  return total.value();
}

SurvivalValue averaged_survival_1d(const Environment& env, double t, Coord L) {
  GapStructure gaps = gap_structure(env);
  KahanSum lower;
  double slack = 0.0;  // extra mass when truncated-gap sites are counted as 1
  for (const GapInterval& iv : gaps.intervals) {
    Coord lo = std::max(iv.left, -L);
    Coord hi = std::min(iv.right, L);
    if (lo > hi) continue;
    double part;
    if (lo == iv.left && hi == iv.right)
      part = interval_sum_survival(iv.length(), t);
    else
      part = interval_partial_sum(iv.length(), lo - iv.left, hi - iv.left, t);
    lower.add(part);
    if (iv.truncated()) slack += double(hi - lo + 1) - part;
  }
  double sites = double(2 * L + 1);
  if (slack == 0.0) return exact_value(lower.value() / sites, t, {});
  return bracket_value(lower.value() / sites, (lower.value() + slack) / sites, t, {});
}

SurvivalValue averaged_survival_general(const Environment& env, double t, Coord L) {
  std::vector<std::uint8_t> seen(env.site_count(), 0);
  KahanSum lower;
  double slack = 0.0;
  std::vector<Coord> pt(env.dim);
  // Iterate Lambda_L sites; expand each unvisited free one to its component.
  std::vector<Coord> cursor(env.dim, -L);
  for (;;) {
    std::size_t idx = env.index_of(cursor);
    if (!seen[idx] && !env.occupancy[idx]) {
      FreeComponent comp = free_component(env, cursor);
      const SiteSet& C = comp.sites;
      if (C.size() > kDenseCap)
        throw SizeError("averaged_survival: component exceeds the dense cap; use Monte Carlo");
      DenseSpectrum sp = dense_spectrum(C);
      // overlap of each eigenvector with 1_C and with 1_{C cap Lambda_L}
      std::vector<std::uint8_t> in_L(C.size());
      double clipped = 0.0;
      for (std::size_t i = 0; i < C.size(); ++i) {
        auto s = C.site(i);
        seen[env.index_of(s)] = 1;
        bool inside = true;
        for (Coord c : s)
          if (c < -L || c > L) inside = false;
        in_L[i] = inside ? 1 : 0;
        if (inside) clipped += 1.0;
      }
      KahanSum part;
      for (std::size_t n = 0; n < sp.n; ++n) {
        KahanSum full, clip;
        for (std::size_t r = 0; r < sp.n; ++r) {
          full.add(sp.value(r, n));
          if (in_L[r]) clip.add(sp.value(r, n));
        }
        part.add(std::exp(-t * sp.eigenvalues[n]) * full.value() * clip.value());
      }
      lower.add(part.value());
      if (comp.touches_boundary) slack += clipped - part.value();
    }
    int k = env.dim - 1;
    for (; k >= 0; --k) {
      if (++cursor[std::size_t(k)] <= L) break;
      cursor[std::size_t(k)] = -L;
    }
    if (k < 0) break;
  }
  double sites = std::pow(double(2 * L + 1), env.dim);
  if (slack == 0.0) return exact_value(lower.value() / sites, t, {});
  return bracket_value(lower.value() / sites, (lower.value() + slack) / sites, t, {});
}

}  // namespace

SurvivalValue averaged_survival(const Environment& env, double t, Coord L) {
  if (t < 0.0) throw ParameterError("averaged_survival: t must be >= 0");
  if (L < 0 || L > env.radius)
    throw DomainError("averaged_survival: L must lie in [0, env.radius]");
  return env.dim == 1 ? averaged_survival_1d(env, t, L) : averaged_survival_general(env, t, L);
}

SurvivalValue annealed_exact_1d(double density, double t, double tail_tol) {
  if (!(density > 0.0 && density < 1.0))
    throw ParameterError("annealed_exact_1d: density must lie in (0, 1)");
  if (t < 0.0) throw ParameterError("annealed_exact_1d: t must be >= 0");
  if (!(tail_tol > 0.0)) throw ParameterError("annealed_exact_1d: tail_tol must be > 0");
  double p = density, q = 1.0 - density;
  double logq = std::log1p(-density);
  KahanSum acc;
  constexpr Coord kMaxShell = 200000;
  for (Coord l = 1; l <= kMaxShell; ++l) {
    acc.add(p * p * std::exp(double(l) * logq) * interval_sum_survival(l, t));
    // remainder over shells > l: sum_{m>l} p^2 q^m * m <= q^{l+1}((l+1)p + q)
    double rem = std::exp(double(l + 1) * logq) * (double(l + 1) * p + q);
    if (rem < tail_tol) break;
  }
  SurvivalValue s;
  s.value = clamp01(acc.value());
  s.error = tail_tol;
  s.mode = SurvivalMode::Series;
  s.t = t;
  s.x = {0};
  return s;
}

LocalSurvivalBounds survival_bounds(const Environment& env, std::span<const Coord> x, double t,
                                    double a) {
  if (a <= 0.0) throw ParameterError("survival_bounds: a must be > 0");
  if (t < 0.0) throw ParameterError("survival_bounds: t must be >= 0");
  if (!env.in_box(x)) throw DomainError("survival_bounds: x outside the box");
  Coord r = Coord(std::floor(a * t));
  for (Coord c : x)
    if (std::abs(c) + r > env.radius)
      throw DomainError("survival_bounds: ball Lambda(x, at) leaves the box");
  // Collect the free part of the ball.
  std::vector<Coord> flat;
  std::vector<Coord> cursor(x.begin(), x.end());
  for (Coord& c : cursor) c -= r;
  std::size_t ball = 1;
  for (int k = 0; k < env.dim; ++k) ball *= std::size_t(2 * r + 1);
  for (std::size_t i = 0; i < ball; ++i) {
    if (!env.occupied(cursor)) flat.insert(flat.end(), cursor.begin(), cursor.end());
    for (int k = env.dim - 1; k >= 0; --k) {
      if (++cursor[std::size_t(k)] <= x[std::size_t(k)] + r) break;
      cursor[std::size_t(k)] = x[std::size_t(k)] - r;
    }
  }
  LocalSurvivalBounds out;
  TruncationBound tb = truncation_gap_bound(a, env.dim, t);
  if (flat.empty()) {
    out.lambda0 = std::numeric_limits<double>::infinity();
    out.upper = tb.bound;
    out.lower = 0.0;
    return out;
  }
  SiteSet F(env.dim, std::move(flat));
  out.lambda0 = principal_eigenvalue(F);
  out.upper =
      tb.bound + std::pow(2.0 * a * t + 1.0, double(env.dim) / 2.0) * std::exp(-out.lambda0 * t);
  out.lower = std::exp(-out.lambda0 * t) / double(ball);
  return out;
}

}  // namespace trapwalk
