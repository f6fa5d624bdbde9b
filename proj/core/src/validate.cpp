#include "trapwalk/validate.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "trapwalk/environment.hpp"
#include "trapwalk/errors.hpp"
#include "trapwalk/limitlaw.hpp"
#include "trapwalk/montecarlo.hpp"
#include "trapwalk/regimes.hpp"
#include "trapwalk/spectral.hpp"
#include "trapwalk/stats.hpp"
#include "trapwalk/survival.hpp"

namespace trapwalk {

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct Ctx {
  CheckResult res;
  bool failed = false;

  void expect(bool ok, const std::string& what) {
    if (!ok && !failed) {
      failed = true;
      res.detail = what;
    }
  }
  void expect_near(double got, double want, double tol, const std::string& what) {
    expect(std::isfinite(got) && std::fabs(got - want) <= tol,
           what + ": got " + fmt(got) + ", want " + fmt(want) + " +/- " + fmt(tol));
  }
  CheckResult finish(const std::string& ok_detail) {
    res.pass = !failed;
    if (!failed) res.detail = ok_detail;
    return res;
  }
};

SiteSet interval_sites(Coord l, Coord offset = 0) {
  std::vector<Coord> flat;
  flat.reserve(std::size_t(l));
  for (Coord x = 0; x < l; ++x) flat.push_back(offset + x);
  return SiteSet(1, std::move(flat));
}

CheckResult check_spectral_closed_forms(std::uint64_t) {
  Ctx c;
  c.res.name = "spectral-closed-forms";
  for (Coord l : {1, 2, 3, 5, 8, 13, 21, 34}) {
    DenseSpectrum dense = dense_spectrum(interval_sites(l));
    for (Coord n = 0; n < l && !c.failed; ++n) {
      c.expect_near(dense.eigenvalues[std::size_t(n)], interval_eigenvalue(l, n), 1e-12,
                    "eigenvalue l=" + std::to_string(l) + " n=" + std::to_string(n));
      KahanSum mass;
      for (Coord x = 0; x < l; ++x) mass.add(dense.value(std::size_t(x), std::size_t(n)));
      c.expect_near(std::fabs(mass.value()), std::fabs(interval_mass(l, n)), 1e-10,
                    "mass l=" + std::to_string(l) + " n=" + std::to_string(n));
    }
    if (c.failed) break;
  }
  return c.finish("dense solver matches closed forms through l=34");
}

CheckResult check_spectral_envelopes(std::uint64_t) {
  Ctx c;
  c.res.name = "spectral-envelopes";
  for (double lg = 1.0; lg <= 4.0 + 1e-9; lg += 0.125) {
    Coord l = Coord(std::llround(std::pow(10.0, lg)));
    double lam0 = interval_eigenvalue(l, 0);
    double gap = interval_eigenvalue(l, 1) - lam0;
    double mass0 = interval_psi0_mass(l);
    c.expect(lambda0_envelope(l).contains(lam0), "lambda0 outside envelope at l=" + std::to_string(l));
    c.expect(gap_envelope(l).contains(gap), "gap outside envelope at l=" + std::to_string(l));
    c.expect(psi0_mass_envelope(l).contains(mass0),
             "psi0 mass outside envelope at l=" + std::to_string(l));
    if (c.failed) break;
  }
  return c.finish("asymptotic envelopes hold on the log grid l in [10, 1e4]");
}

CheckResult check_survival_identities(std::uint64_t) {
  Ctx c;
  c.res.name = "survival-identities";
  for (double p : {0.2, 0.5, 0.8})
    c.expect_near(annealed_exact_1d(p, 0.0, 1e-12).value, 1.0 - p, 1e-12,
                  "annealed at t=0, p=" + fmt(p));
  for (Coord l : {1, 7, 40}) c.expect_near(interval_sum_survival(l, 0.0), double(l), 0.0,
                                           "completeness at l=" + std::to_string(l));
  for (Coord l = 1; l < 30; ++l)
    c.expect(interval_sum_survival(l + 1, 2.5) > interval_sum_survival(l, 2.5),
             "S(l, t) not increasing in l at l=" + std::to_string(l));
  for (double t = 0.5; t < 8.0; t *= 2.0)
    c.expect(interval_sum_survival(12, 2.0 * t) < interval_sum_survival(12, t),
             "S(l, t) not decreasing in t at t=" + fmt(t));
  return c.finish("t=0 laws, completeness, and monotonicity hold");
}

CheckResult check_quenched_vs_dense(std::uint64_t seed) {
  Ctx c;
  c.res.name = "survival-quenched-vs-dense";
  Environment env = sample_environment(1, 30, 0.4, derive_seed(seed, {1}));
  GapStructure gaps = gap_structure(env);
  std::vector<Coord> box;
  for (Coord x = -env.radius; x <= env.radius; ++x) box.push_back(x);
  SiteSet whole(1, std::move(box));
  int tested = 0;
  for (Coord x = -20; x <= 20 && !c.failed; x += 5) {
    SurvivalValue closed = quenched_survival_1d(gaps, x, 3.0);
    if (closed.mode != SurvivalMode::Exact) continue;  // gap clipped by the box
    Coord pt[1] = {x};
    double dense = truncated_survival(env, pt, 3.0, whole).value;
    c.expect_near(dense, closed.value, 1e-10, "x=" + std::to_string(x));
    ++tested;
  }
  c.expect(tested >= 3, "too few interior gaps; reseed");
  return c.finish("gap closed form matches the dense Dirichlet route at " +
                  std::to_string(tested) + " sites");
}

CheckResult check_annealed_mc(std::uint64_t seed) {
  Ctx c;
  c.res.name = "mc-annealed";
  double t = 4.0;
  SurvivalValue exact = annealed_exact_1d(0.5, t, 1e-18);
  McEstimate mc = annealed_mc(1, 0.5, t, 200000, derive_seed(seed, {2}));
  double sigma = std::max(mc.std_error, 1e-12);
  c.expect(std::fabs(mc.mean - exact.value) <= 4.0 * sigma,
           "annealed MC off by " + fmt((mc.mean - exact.value) / sigma) + " sigma");
  return c.finish("sausage MC within 4 sigma of the exact series (z = " +
                  fmt((mc.mean - exact.value) / sigma) + ")");
}

CheckResult check_killed_mc(std::uint64_t seed) {
  Ctx c;
  c.res.name = "mc-killed-vs-quenched";
  Environment env = sample_environment(1, 60, 0.3, derive_seed(seed, {3}));
  GapStructure gaps = gap_structure(env);
  Coord x = 0;
  while (env.occupied_1d(x)) ++x;
  double t = 6.0;
  SurvivalValue closed = quenched_survival_1d(gaps, x, t);
  Coord pt[1] = {x};
  KilledWalkEstimate killed = killed_walk_mc(env, pt, t, 100000, derive_seed(seed, {4}));
  double sigma = std::max(killed.estimate.std_error, 1e-12);
  c.expect(closed.value >= killed.lower - 4.0 * sigma &&
               closed.value <= killed.upper + 4.0 * sigma,
           "closed form outside the censored MC bracket: closed=" + fmt(closed.value) +
               " bracket=[" + fmt(killed.lower) + ", " + fmt(killed.upper) + "] sigma=" +
               fmt(sigma));
  return c.finish("killed-walk MC brackets the gap closed form at x=" + std::to_string(x));
}

CheckResult check_env_roundtrip(std::uint64_t seed) {
  Ctx c;
  c.res.name = "env-roundtrip";
  Environment env = sample_environment(2, 7, 0.35, derive_seed(seed, {5}));
  std::stringstream ss;
  write_environment(ss, env);
  Environment back = read_environment(ss);
  c.expect(back.dim == env.dim && back.radius == env.radius && back.seed == env.seed &&
               back.density == env.density && back.occupancy == env.occupancy,
           "file round trip changed the environment");

  Environment line = sample_environment(1, 50, 0.5, derive_seed(seed, {6}));
  GapStructure gaps = gap_structure(line);
  std::size_t covered = gaps.obstacle_positions.size();
  for (const GapInterval& g : gaps.intervals) covered += std::size_t(g.length());
  c.expect(covered == line.site_count(), "gap decomposition does not partition the box");
  for (Coord y : gaps.obstacle_positions)
    c.expect(line.occupied_1d(y), "listed obstacle is free at y=" + std::to_string(y));
  return c.finish("write/read round trip and gap partition are exact");
}

CheckResult check_binomial_exact(std::uint64_t seed) {
  Ctx c;
  c.res.name = "env-binomial-exact";
  SplitMix64 rng(derive_seed(seed, {7}));
  const std::uint64_t n = 40, draws = 20000;
  const double q = 0.3;
  std::vector<double> observed(n + 1, 0.0);
  for (std::uint64_t i = 0; i < draws; ++i)
    observed[sample_binomial(n, q, rng, BinomialMode::ForceExact)] += 1.0;
  std::vector<double> expected(n + 1, 0.0);
  for (std::uint64_t k = 0; k <= n; ++k)
    expected[k] = double(draws) * std::exp(binomial_log_pmf(n, k, q));
  // Merge thin tails so every chi-square cell has expectation >= 5.
  std::vector<double> obs_m, exp_m;
  double ob = 0.0, eb = 0.0;
  for (std::size_t k = 0; k <= n; ++k) {
    ob += observed[k];
    eb += expected[k];
    if (eb >= 5.0) {
      obs_m.push_back(ob);
      exp_m.push_back(eb);
      ob = eb = 0.0;
    }
  }
  if (eb > 0.0 && !exp_m.empty()) {
    obs_m.back() += ob;
    exp_m.back() += eb;
  }
  double pval = chi_square_gof_pvalue(obs_m, exp_m);
  c.expect(pval > 1e-6, "exact-branch GoF p-value " + fmt(pval));
  return c.finish("from-the-mode inversion matches the binomial pmf (p = " + fmt(pval) + ")");
}

CheckResult check_histogram_vs_direct(std::uint64_t seed) {
  Ctx c;
  c.res.name = "env-histogram-vs-direct";
  const std::uint64_t n = 50000;
  const double p = 0.45;
  SplitMix64 r1(derive_seed(seed, {8}));
  SplitMix64 r2(derive_seed(seed, {9}));
  GapHistogram hist = stratified_gap_histogram(n, p, 0, r1);
  std::uint64_t total = hist.below_min;
  for (const auto& [l, count] : hist.counts) total += count;
  c.expect(total == n, "histogram counts do not partition n");
  std::vector<Coord> direct = sample_gap_lengths(n, p, r2);
  Coord lmax = 0;
  for (Coord l : direct) lmax = std::max(lmax, l);
  for (const auto& [l, count] : hist.counts)
    if (count > 0) lmax = std::max(lmax, l);
  std::vector<std::uint64_t> a(std::size_t(lmax) + 1, 0), b(std::size_t(lmax) + 1, 0);
  for (const auto& [l, count] : hist.counts) a[std::size_t(l)] = count;
  for (Coord l : direct) b[std::size_t(l)] += 1;
  double pval = chi_square_two_sample_pvalue(a, b);
  c.expect(pval > 1e-6, "stratified vs direct two-sample p-value " + fmt(pval));
  return c.finish("stratified histogram is distributed as direct sampling (p = " + fmt(pval) +
                  ")");
}

CheckResult check_phase_identities(std::uint64_t) {
  Ctx c;
  c.res.name = "regimes-phase-identities";
  for (int d = 1; d <= 10; ++d) {
    DomainConstants k = constants(d, 0.5);
    c.expect_near(a_of_gamma(d, k.gamma1), 1.0, 1e-12, "a(gamma1) at d=" + std::to_string(d));
    double mn = a_of_gamma(d, k.gamma2) - 0.5 * k.gamma2;
    c.expect_near(mn, std::pow(2.0, -2.0 / (double(d) + 2.0)), 1e-12,
                  "min of a - gamma/2 at d=" + std::to_string(d));
  }
  DomainConstants k1 = constants(1, 0.37);
  c.expect_near(k1.c2 * k1.c2 * k1.c2, 27.0 * kEll1 * k1.nu * k1.nu, 1e-10 * k1.c2 * k1.c2 * k1.c2,
                "c2^3 = 27 ell_1 nu^2 at d=1");
  c.expect_near(constants(2, 0.5).gamma1, 0.5, 1e-15, "gamma1 at d=2");
  c.expect_near(constants(2, 0.5).gamma2, std::numbers::sqrt2 / 2.0, 1e-15, "gamma2 at d=2");
  ScalingParams sp = scaling_params(2.0 / 3.0, 0.5, 1.0);
  c.expect_near(sp.a1, 1.0, 1e-12, "a1 at gamma1(1)");
  c.expect_near(scaling_params(constants(1, 0.5).gamma2, 0.5, 1.0).a1, 2.0, 1e-12,
                "a1 at gamma2(1)");
  return c.finish("phase identities hold for d in [1, 10]");
}

CheckResult check_levy_tail(std::uint64_t) {
  Ctx c;
  c.res.name = "limitlaw-levy-tail";
  const double gamma = 0.5, p = 0.5, cc = 1.0;
  double a1 = scaling_params(gamma, p, cc).a1;
  // Piecewise-constant: flat on [z_j, z_{j+1}), dropping by exactly (1-p)
  // across each atom, with the atom mass closing the telescoping difference.
  // Sample just off the atoms; exactly at z_j the floor sits on a representation
  // boundary.
  LevyTriple triple = levy_atoms(gamma, p, cc, 4.0, 1e-12);
  for (std::size_t i = 0; i + 1 < triple.atoms.size() && !c.failed; ++i) {
    double z = triple.atoms[i].x;
    double left = levy_tail(z * (1.0 - 1e-9), gamma, p, cc);
    double right = levy_tail(z * (1.0 + 1e-9), gamma, p, cc);
    c.expect_near(right / left, 1.0 - p, 1e-9, "jump ratio at atom " + std::to_string(i));
    c.expect_near(left - right, triple.atoms[i].mass, 1e-9 * left,
                  "atom mass vs tail drop at atom " + std::to_string(i));
    double mid = levy_tail(std::sqrt(z * triple.atoms[i + 1].x), gamma, p, cc);
    c.expect_near(mid, right, 0.0, "tail not flat after atom " + std::to_string(i));
  }
  // x^2 atom weights below the origin shrink geometrically toward j -> -inf
  // with ratio (1-p)^{2/a1 - 1}.
  double want_ratio = std::pow(1.0 - p, 2.0 / a1 - 1.0);
  if (triple.atoms.size() >= 3 && !c.failed) {
    double w0 = triple.atoms[0].x * triple.atoms[0].x * triple.atoms[0].mass;
    double w1 = triple.atoms[1].x * triple.atoms[1].x * triple.atoms[1].mass;
    c.expect_near(w0 / w1, want_ratio, 1e-9, "x^2 weight ratio at the lower tail");
  }
  return c.finish("tail is right-continuous geometric with matching atom masses");
}

CheckResult check_moment_consistency(std::uint64_t) {
  Ctx c;
  c.res.name = "limitlaw-moment-consistency";
  const double gamma = 0.4, p = 0.5, cc = 1.0;
  ScalingParams sp = scaling_params(gamma, p, cc);
  double t = sp.time_at(8, 0.5);
  NormalizedSumSampler sampler(gamma, p, cc, t, false);
  double inf = std::numeric_limits<double>::infinity();
  double m1 = truncated_moment_finite_t(1, inf, gamma, p, cc, t);
  c.expect_near(m1, sampler.mean_gap_sum(), 1e-10 * std::fabs(m1) + 1e-300,
                "k=1, tau=inf moment vs sampler mean");
  double lim = truncated_moment_limit(1, 1.0, gamma, p, cc);
  c.expect(std::isfinite(lim) && lim > 0.0, "limit moment not positive/finite");
  bool threw = false;
  try {
    (void)truncated_moment_limit(1, 1.0, 0.9, p, cc);  // a1(0.9) > 1 = k
  } catch (const DivergenceError&) {
    threw = true;
  }
  c.expect(threw, "k <= a1 must raise DivergenceError");
  return c.finish("finite-t moments agree with the sampler mean at t = " + fmt(t));
}

CheckResult check_cf_bounds(std::uint64_t) {
  Ctx c;
  c.res.name = "limitlaw-cf-bounds";
  LevyTriple triple = levy_atoms(0.5, 0.5, 1.0, 6.0, 1e-10);
  c.expect_near(std::abs(char_fn(0.0, triple)), 1.0, 1e-12, "phi(0)");
  for (double u : {0.3, 1.0, 2.5, 6.0}) {
    double mod = std::abs(char_fn(u, triple));
    c.expect(mod <= 1.0 + 1e-12, "|phi| > 1 at u=" + fmt(u));
    c.expect(std::abs(char_fn(-u, triple) - std::conj(char_fn(u, triple))) <= 1e-12,
             "phi(-u) != conj(phi(u)) at u=" + fmt(u));
  }
  c.expect(triple.truncation_error <= 1e-10, "declared truncation error above tolerance");
  return c.finish("characteristic function is unimodular-bounded and Hermitian");
}

}  // namespace

const std::vector<ValidationCheck>& validation_checks() {
  static const std::vector<ValidationCheck> checks = {
      {"spectral-closed-forms", check_spectral_closed_forms},
      {"spectral-envelopes", check_spectral_envelopes},
      {"survival-identities", check_survival_identities},
      {"survival-quenched-vs-dense", check_quenched_vs_dense},
      {"mc-annealed", check_annealed_mc},
      {"mc-killed-vs-quenched", check_killed_mc},
      {"env-roundtrip", check_env_roundtrip},
      {"env-binomial-exact", check_binomial_exact},
      {"env-histogram-vs-direct", check_histogram_vs_direct},
      {"regimes-phase-identities", check_phase_identities},
      {"limitlaw-levy-tail", check_levy_tail},
      {"limitlaw-moment-consistency", check_moment_consistency},
      {"limitlaw-cf-bounds", check_cf_bounds},
  };
  return checks;
}

std::vector<CheckResult> run_validation(const std::string& filter, std::uint64_t seed) {
  std::vector<CheckResult> out;
  for (const ValidationCheck& check : validation_checks()) {
    if (!filter.empty() && check.name.find(filter) == std::string::npos) continue;
    auto t0 = std::chrono::steady_clock::now();
    CheckResult res;
    try {
      res = check.run(seed);
    } catch (const std::exception& e) {
      res.name = check.name;
      res.pass = false;
      res.detail = std::string("exception: ") + e.what();
    }
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(std::move(res));
  }
  return out;
}

}  // namespace trapwalk
