#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "trapwalk/environment.hpp"
#include "trapwalk/errors.hpp"
#include "trapwalk/rng.hpp"
#include "trapwalk/spectral.hpp"
#include "trapwalk/survival.hpp"

using namespace trapwalk;

namespace {

SiteSet box_sites_1d(Coord lo, Coord hi) {
  std::vector<Coord> flat;
  for (Coord x = lo; x <= hi; ++x) flat.push_back(x);
  return SiteSet(1, std::move(flat));
}

}  // namespace

TEST_CASE("quenched_survival_1d: closed-form examples") {
  // single free site between obstacles: kill rate 1
  auto g1 = gap_structure(environment_from_occupancy(1, 1, 0.5, 0, {1, 0, 1}));
  for (double t : {0.5, 2.0, 7.0}) {
    auto s = quenched_survival_1d(g1, 0, t);
    CHECK(s.mode == SurvivalMode::Exact);
    CHECK(s.error == 0.0);
    CHECK(s.value == doctest::Approx(std::exp(-t)).epsilon(1e-14));
  }

  // length-2 gap: only the lambda_0 = 1/2 mode carries mass
  auto g2 = gap_structure(environment_from_occupancy(1, 2, 0.5, 0, {1, 0, 0, 1, 1}));
  for (Coord x : {-1, 0}) {
    auto s = quenched_survival_1d(g2, x, 1.0);
    CHECK(s.value == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
  }

  CHECK(quenched_survival_1d(g2, 0, 0.0).value == 1.0);
  auto blocked = quenched_survival_1d(g2, 1, 3.0);
  CHECK(blocked.value == 0.0);
  CHECK(blocked.mode == SurvivalMode::Exact);

  // box-truncated gap reports the bracket [interval-killed value, 1]
  auto gb = gap_structure(environment_from_occupancy(1, 2, 0.5, 0, {0, 0, 1, 0, 0}));
  auto b = quenched_survival_1d(gb, -2, 3.0);
  CHECK(b.mode == SurvivalMode::Bounded);
  CHECK(b.lower() == doctest::Approx(std::exp(-1.5)).epsilon(1e-12));
  CHECK(b.upper() == 1.0);

  CHECK_THROWS_AS(quenched_survival_1d(g2, 9, 1.0), DomainError);
  CHECK_THROWS_AS(quenched_survival_1d(g2, 0, -1.0), ParameterError);
}

TEST_CASE("interval_sum_survival: examples, completeness, sandwich") {
  for (double t : {0.2, 1.0, 4.0})
    CHECK(interval_sum_survival(1, t) == doctest::Approx(std::exp(-t)).epsilon(1e-14));
  CHECK(interval_sum_survival(2, 1.0) == doctest::Approx(2.0 * std::exp(-0.5)).epsilon(1e-14));
  for (Coord l : {1, 2, 3, 10, 100}) CHECK(interval_sum_survival(l, 0.0) == double(l));

  // sandwich: e^{-t l0} A <= sum <= e^{-t l0}(A + e^{-t(l1-l0)}(l - A))
  std::vector<Coord> lengths = {1, 2, 3, 4, 5, 7, 11, 16, 23, 30, 100, 500};
  for (Coord l : lengths) {
    double A = interval_psi0_mass(l);
    A *= A;
    for (double t : {0.1, 1.0, 10.0, 100.0}) {
      double sum = interval_sum_survival(l, t);
      double head = std::exp(-t * interval_eigenvalue(l, 0));
      CHECK(sum >= head * A * (1.0 - 1e-12));
      if (l > 1) {
        double gap = interval_eigenvalue(l, 1) - interval_eigenvalue(l, 0);
        CHECK(sum <= head * (A + std::exp(-t * gap) * (double(l) - A)) * (1.0 + 1e-12));
      } else {
        CHECK(sum == doctest::Approx(head * A).epsilon(1e-13));
      }
    }
  }
  CHECK_THROWS_AS(interval_sum_survival(0, 1.0), ParameterError);
}

TEST_CASE("truncated_survival: exactness and errors") {
  auto env = sample_environment(1, 60, 0.5, 12345);
  auto gaps = gap_structure(env);

  // single free site
  Coord lone = 0;
  bool found = false;
  for (const auto& iv : gaps.intervals) {
    if (iv.length() == 1 && !iv.truncated()) {
      lone = iv.left;
      found = true;
      break;
    }
  }
  REQUIRE(found);
  std::vector<Coord> xl{lone};
  auto solo = truncated_survival(env, xl, 2.0, box_sites_1d(lone, lone));
  CHECK(solo.value == doctest::Approx(std::exp(-2.0)).epsilon(1e-13));

  // U containing the whole gap reproduces the quenched value
  for (Coord x : {-7, 0, 13, 31}) {
    std::vector<Coord> pt{x};
    if (env.occupied(pt)) {
      CHECK(truncated_survival(env, pt, 2.0, box_sites_1d(x - 1, x + 1)).value == 0.0);
      continue;
    }
    auto q = quenched_survival_1d(gaps, x, 2.0);
    if (q.mode != SurvivalMode::Exact) continue;
    auto tr = truncated_survival(env, pt, 2.0, box_sites_1d(-60, 60));
    CHECK(tr.value == doctest::Approx(q.value).epsilon(1e-12));
  }

  // cap and domain errors
  auto wide = sample_environment(1, 400, 0.0, 1);
  std::vector<Coord> origin{0};
  CHECK_THROWS_AS(truncated_survival(wide, origin, 1.0, box_sites_1d(-400, 400)), SizeError);
  CHECK_THROWS_AS(truncated_survival(env, origin, 1.0, box_sites_1d(5, 9)), DomainError);
  std::vector<Coord> outside{99};
  CHECK_THROWS_AS(truncated_survival(env, outside, 1.0, box_sites_1d(90, 100)), DomainError);
}

TEST_CASE("averaged_survival: examples and sitewise consistency") {
  // all-free box: the truncated gap turns the value into a bracket reaching 1
  auto open = sample_environment(1, 10, 0.0, 3);
  auto b = averaged_survival(open, 2.0, 5);
  CHECK(b.mode == SurvivalMode::Bounded);
  CHECK(b.upper() == 1.0);
  CHECK(b.lower() >= 0.0);

  // alternating obstacles: every free site sits in a length-1 gap
  auto alt = environment_from_occupancy(1, 2, 0.5, 0, {1, 0, 1, 0, 1});
  auto a = averaged_survival(alt, 3.0, 2);
  CHECK(a.mode == SurvivalMode::Exact);
  CHECK(a.value == doctest::Approx(2.0 / 5.0 * std::exp(-3.0)).epsilon(1e-14));

  // averaged == mean of sitewise quenched (value and half-width both)
  auto env = sample_environment(1, 200, 0.5, 777);
  auto gaps = gap_structure(env);
  for (double t : {0.5, 3.0}) {
    for (Coord L : {150L, 200L}) {
      auto avg = averaged_survival(env, t, L);
      double mv = 0.0, me = 0.0;
      for (Coord x = -L; x <= L; ++x) {
        auto s = quenched_survival_1d(gaps, x, t);
        mv += s.value;
        me += s.error;
      }
      mv /= double(2 * L + 1);
      me /= double(2 * L + 1);
      CHECK(avg.value == doctest::Approx(mv).epsilon(1e-12));
      CHECK(avg.error == doctest::Approx(me).epsilon(1e-12).scale(1e-15));
    }
  }

  // 2-D path agrees with per-site truncated evaluation on a small box
  auto env2 = sample_environment(2, 4, 0.4, 9);
  auto avg2 = averaged_survival(env2, 1.5, 3);
  SiteSet all = [&] {
    std::vector<Coord> flat;
    for (Coord i = -4; i <= 4; ++i)
      for (Coord j = -4; j <= 4; ++j) {
        flat.push_back(i);
        flat.push_back(j);
      }
    return SiteSet(2, std::move(flat));
  }();
  double mean2 = 0.0;
  bool any_boundary = false;
  for (Coord i = -3; i <= 3; ++i)
    for (Coord j = -3; j <= 3; ++j) {
      std::vector<Coord> pt{i, j};
      if (env2.occupied(pt)) continue;
      auto comp = free_component(env2, pt);
      any_boundary = any_boundary || comp.touches_boundary;
      mean2 += truncated_survival(env2, pt, 1.5, all).value;
    }
  mean2 /= 49.0;
  if (any_boundary) {
    CHECK(avg2.lower() <= mean2 * (1.0 + 1e-9));
    CHECK(avg2.upper() >= mean2 * (1.0 - 1e-9));
  } else {
    CHECK(avg2.value == doctest::Approx(mean2).epsilon(1e-11));
  }

  CHECK_THROWS_AS(averaged_survival(env, 1.0, 300), DomainError);
  CHECK_THROWS_AS(averaged_survival(env, -1.0, 10), ParameterError);
}

TEST_CASE("annealed_exact_1d: anchors and series control") {
  for (double p : {0.3, 0.5, 0.9}) {
    auto s = annealed_exact_1d(p, 0.0, 1e-12);
    CHECK(s.mode == SurvivalMode::Series);
    CHECK(s.error == 1e-12);
    CHECK(std::fabs(s.value - (1.0 - p)) <= 2e-12);
  }

  // reported tail tolerance really bounds the truncation: rerun at tol/10
  for (double p : {0.3, 0.5}) {
    for (double t : {1.0, 10.0}) {
      auto coarse = annealed_exact_1d(p, t, 1e-8);
      auto fine = annealed_exact_1d(p, t, 1e-9);
      CHECK(std::fabs(coarse.value - fine.value) <= coarse.error);
      CHECK(coarse.value >= 0.0);
      CHECK(coarse.value <= 1.0);
    }
  }

  // -log<p>/t^{1/3} climbs toward c2 (trend; the limit sits far beyond desk t)
  const double c2 = 2.52004414263019085;
  double prev = 0.0;
  for (double t : {1e2, 1e3, 1e4}) {
    auto s = annealed_exact_1d(0.5, t, 1e-14);
    double slope = -std::log(s.value) / std::cbrt(t);
    CHECK(slope > prev);
    CHECK(slope < c2);
    prev = slope;
  }

  CHECK_THROWS_AS(annealed_exact_1d(0.5, 1.0, 0.0), ParameterError);
  CHECK_THROWS_AS(annealed_exact_1d(0.5, 1.0, -1e-9), ParameterError);
  CHECK_THROWS_AS(annealed_exact_1d(0.0, 1.0, 1e-9), ParameterError);
  CHECK_THROWS_AS(annealed_exact_1d(1.0, 1.0, 1e-9), ParameterError);
}

TEST_CASE("J and truncation_gap_bound") {
  CHECK(J(0.0) == 0.0);
  CHECK(J(1.0) == doctest::Approx(0.46716002464644798).epsilon(1e-15));
  double prev = -1.0;
  for (double x : {0.0, 0.25, 0.5, 1.0, 2.0, 4.0}) {
    double j = J(x);
    CHECK(j >= 0.0);
    CHECK(j > prev);
    prev = j;
  }
  CHECK_THROWS_AS(J(-0.5), ParameterError);

  for (double a : {0.5, 1.0, 2.0}) {
    for (int d : {1, 2, 3}) {
      auto b10 = truncation_gap_bound(a, d, 10.0);
      auto b20 = truncation_gap_bound(a, d, 20.0);
      double ad = a * d;
      CHECK(b10.k1 == doctest::Approx(2.0 * d * std::exp(std::asinh(ad))).epsilon(1e-14));
      CHECK(b10.k2 == doctest::Approx(J(ad) / d).epsilon(1e-14));
      CHECK(b10.bound == doctest::Approx(b10.k1 * std::exp(-b10.k2 * 10.0)).epsilon(1e-14));
      CHECK(b20.bound < b10.bound);
      CHECK(b20.bound >= 0.0);
    }
  }
  CHECK_THROWS_AS(truncation_gap_bound(0.0, 1, 1.0), ParameterError);
  CHECK_THROWS_AS(truncation_gap_bound(1.0, 0, 1.0), DimensionError);
}

TEST_CASE("survival_bounds bracket exact values on seeded triples") {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 25 && checked < 100; ++seed) {
    auto env = sample_environment(1, 600, 0.5, derive_seed(31, {seed}));
    auto gaps = gap_structure(env);
    for (Coord x : {-17L, 0L, 23L}) {
      for (double t : {5.0, 20.0}) {
        const double a = 0.5;
        std::vector<Coord> pt{x};
        auto lb = survival_bounds(env, pt, t, a);
        auto q = quenched_survival_1d(gaps, x, t);
        REQUIRE(q.mode == SurvivalMode::Exact);  // deep interior at this radius
        CHECK(q.value <= lb.upper + 1e-12);

        // lower-bound side against the exact local average
        Coord r = Coord(std::floor(a * t));
        double avg = 0.0;
        for (Coord z = x - r; z <= x + r; ++z) avg += quenched_survival_1d(gaps, z, t).value;
        avg /= double(2 * r + 1);
        CHECK(avg >= lb.lower - 1e-12);
        ++checked;
      }
    }
  }
  CHECK(checked >= 100);

  // t = 0: upper >= 1 trivially
  auto env = sample_environment(1, 50, 0.5, 2);
  std::vector<Coord> origin{0};
  CHECK(survival_bounds(env, origin, 0.0, 1.0).upper >= 1.0);

  std::vector<Coord> edge{48};
  CHECK_THROWS_AS(survival_bounds(env, edge, 10.0, 1.0), DomainError);
  CHECK_THROWS_AS(survival_bounds(env, origin, 10.0, -1.0), ParameterError);
}

TEST_CASE("monotonicity and the truncation gap bound") {
  auto env = sample_environment(1, 300, 0.5, 4711);
  auto gaps = gap_structure(env);

  // p(x,t,w) nonincreasing in t
  for (Coord x : {-40L, 0L, 11L}) {
    double prev = 2.0;
    for (double t : {0.0, 0.5, 1.0, 2.0, 5.0, 15.0}) {
      double v = quenched_survival_1d(gaps, x, t).value;
      CHECK(v <= prev + 1e-15);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      prev = v;
    }
  }

  // p_tilde_U nondecreasing in U, and always below the quenched value
  for (Coord x : {0L, -40L}) {
    std::vector<Coord> pt{x};
    if (env.occupied(pt)) continue;
    double t = 4.0;
    double q = quenched_survival_1d(gaps, x, t).value;
    double prev_v = -1.0;
    for (Coord r : {1L, 3L, 8L, 20L, 60L}) {
      double v = truncated_survival(env, pt, t, box_sites_1d(x - r, x + r)).value;
      CHECK(v >= prev_v - 1e-13);
      CHECK(v <= q + 1e-12);
      prev_v = v;
    }
  }

  // 0 <= p - p_tilde_a <= truncation bound, with U the ball of radius at
  for (double a : {0.5, 1.0, 2.0}) {
    for (double t : {4.0, 10.0, 25.0}) {
      Coord r = Coord(std::floor(a * t));
      std::vector<Coord> pt{0};
      double q = quenched_survival_1d(gaps, 0, t).value;
      double trunc = truncated_survival(env, pt, t, box_sites_1d(-r, r)).value;
      double gap = q - trunc;
      CHECK(gap >= -1e-12);
      CHECK(gap <= truncation_gap_bound(a, 1, t).bound + 1e-12);
    }
  }
}
