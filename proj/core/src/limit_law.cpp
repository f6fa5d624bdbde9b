#include "trapwalk/limitlaw.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "trapwalk/errors.hpp"
#include "trapwalk/spectral.hpp"
#include "trapwalk/stats.hpp"
#include "trapwalk/survival.hpp"

namespace trapwalk {

namespace {

void check_gpc(double gamma, double p, double c) {
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw ParameterError("limitlaw: gamma must be positive and finite");
  if (!(p > 0.0) || !(p < 1.0)) throw ParameterError("limitlaw: density must lie in (0, 1)");
  if (!(c > 0.0) || !std::isfinite(c)) throw ParameterError("limitlaw: c must be positive");
}

double a1_of(double gamma) {
  double g = 1.5 * gamma;
  return g * g * g;
}

// S(l, t) with the zero-length gap folded in.
double gap_sum(Coord l, double t) { return l >= 1 ? interval_sum_survival(l, t) : 0.0; }

}  // namespace

Coord ScalingParams::bracket(double t) const {
  if (!(t >= 0.0)) throw ParameterError("bracket: t must be >= 0");
  double x = (gamma * c2 / nu) * std::cbrt(t);
  return Coord(std::ceil(x)) - 1;  // left limit of the integer part
}

double ScalingParams::L_of(double t) const {
  Coord br = bracket(t);
  if (br < 1) throw TimeTooSmallError("L_of: bracket(t) < 1; increase t");
  return std::exp(nu * double(br));
}

std::uint64_t ScalingParams::n_of(double t) const {
  double r = std::floor(c * L_of(t) * p / (1.0 - p));
  if (r > 4.6e18) throw SizeError("n_of: gap count overflows 64 bits");
  return 2 * std::uint64_t(r) + 1;
}

double ScalingParams::normalizer(double t) const {
  Coord br = bracket(t);
  if (br < 1) throw TimeTooSmallError("normalizer: bracket(t) < 1; increase t");
  double b = double(br);
  return s1 * std::cbrt(t) * std::exp(-4.0 * t * kEll1 / (b * b));
}

double ScalingParams::time_at(Coord bracket_value, double frac) const {
  if (!(frac > 0.0) || !(frac < 1.0)) throw ParameterError("time_at: frac must lie in (0, 1)");
  double x = (double(bracket_value) + frac) * nu / (gamma * c2);
  return x * x * x;
}

ScalingParams scaling_params(double gamma, double p, double c) {
  check_gpc(gamma, p, c);
  ScalingParams sp;
  sp.gamma = gamma;
  sp.p = p;
  sp.c = c;
  sp.nu = -std::log1p(-p);
  sp.c2 = constants(1, p).c2;
  sp.a1 = a1_of(gamma);
  sp.s1 = gamma * sp.c2 / (kEll1 * sp.nu);
  return sp;
}

XkTerm xk_term(Coord l, double t) {
  if (l < 0) throw ParameterError("xk_term: l must be >= 0");
  if (!(t >= 0.0)) throw ParameterError("xk_term: t must be >= 0");
  double lp1 = double(l) + 1.0;
  XkTerm out;
  out.leading = (lp1 / kEll1) * std::exp(-4.0 * t * kEll1 / (lp1 * lp1));
  double pi2 = std::numbers::pi * std::numbers::pi;
  double b1 = pi2 / (12.0 * lp1 * lp1);
  double b4 = 200.0 / lp1 + 500.0 * std::exp(-2.0 * pi2 * t / (lp1 * lp1) * (1.0 - 10.0 / (lp1 * lp1)));
  out.envelope = std::exp(4.0 * t * kEll1 * b1 / (lp1 * lp1)) * (1.0 + b4) - 1.0;
  return out;
}

SandwichReport sandwich_check(const Environment& env, double t, double gamma, double eps,
                              double c) {
  if (env.dim != 1) throw DimensionError("sandwich_check: one-dimensional environments only");
  if (!(eps > 0.0) || !(eps < 1.0)) throw ParameterError("sandwich_check: eps must lie in (0, 1)");
  ScalingParams sp = scaling_params(gamma, env.density, c);

  SandwichReport rep;
  rep.bracket = sp.bracket(t);
  double L = sp.L_of(t);  // throws TimeTooSmallError below bracket 1
  rep.box_radius = Coord(std::floor(L));
  if (rep.box_radius > env.radius)
    throw DomainError("sandwich_check: environment radius below floor(L(t))");
  rep.m = std::int64_t(std::floor((1.0 - eps) * L * env.density));
  rep.M = std::int64_t(std::ceil((1.0 + eps) * L * env.density));

  GapStructure gaps = gap_structure(env);
  KahanSum lo, hi, lo_lead, hi_lead;
  for (std::int64_t k = -rep.M; k <= rep.M; ++k) {
    Coord l = gaps.origin_indexed_gap(k).length();  // DomainError if box too small
    double s = gap_sum(l, t);
    double lead = l >= 1 ? xk_term(l, t).leading : 0.0;
    hi.add(s);
    hi_lead.add(lead);
    if (k >= -rep.m && k <= rep.m) {
      lo.add(s);
      lo_lead.add(lead);
    }
  }
  rep.lower = lo.value();
  rep.upper = hi.value();
  rep.lower_leading = lo_lead.value();
  rep.upper_leading = hi_lead.value();

  SurvivalValue avg = averaged_survival(env, t, rep.box_radius);
  double count = double(2 * rep.box_radius + 1);
  rep.middle = avg.value * count;
  rep.pass = rep.lower <= avg.lower() * count && avg.upper() * count <= rep.upper;
  return rep;
}

double levy_tail(double x, double gamma, double p, double c) {
  check_gpc(gamma, p, c);
  double a1 = a1_of(gamma);
  if (a1 >= 2.0) throw DivergenceError("levy_tail: a1 >= 2, no limit law");
  if (x <= 0.0) return 0.0;
  double nu = -std::log1p(-p);
  double j = std::floor((a1 / nu) * std::log(x));
  return (2.0 * c * p / (1.0 - p)) * std::exp(-nu * j);
}

LevyTriple levy_atoms(double gamma, double p, double c, double u_max, double tol) {
  check_gpc(gamma, p, c);
  if (!(u_max > 0.0)) throw ParameterError("levy_atoms: u_max must be positive");
  if (!(tol > 0.0)) throw ParameterError("levy_atoms: tol must be positive");
  double a1 = a1_of(gamma);
  if (a1 >= 2.0)
    throw DivergenceError("levy_atoms: a1 >= 2, x^2 fails to be integrable at the origin");

  double q = 1.0 - p;
  double nu = -std::log(q);
  double pref = 2.0 * c * p * p / (q * q);

  // Integrand bounds for the CF exponent: |e^{iuz} - 1 - iuz/(1+z^2)| is at
  // most (u^2/2 + u) z^2 for z <= 1 and at most 2 + u/2 for any z.
  double small_factor = 0.5 * u_max * u_max + u_max;
  double large_factor = 2.0 + 0.5 * u_max;

  // z_j^2 m_j = pref e^{nu j (2/a1 - 1)}; the exponent rate is positive, so the
  // lower tail sum_{j <= J} is geometric with ratio rho < 1 going down.
  double rate = nu * (2.0 / a1 - 1.0);
  double rho = std::exp(-rate);
  std::int64_t j_min = 0;
  double small_tail = 0.0;
  for (;;) {
    small_tail = pref * std::exp(rate * double(j_min - 1)) / (1.0 - rho);
    if (small_factor * small_tail <= 0.5 * tol || j_min < -4000000) break;
    --j_min;
  }
  if (small_factor * small_tail > 0.5 * tol)
    throw ConvergenceError("levy_atoms: lower truncation did not reach tol", small_tail);

  // sum_{j > J} m_j = pref q^{J+1}/p.
  std::int64_t j_max = 0;
  double large_tail = 0.0;
  for (;;) {
    large_tail = pref * std::exp(-nu * double(j_max + 1)) / p;
    if (large_factor * large_tail <= 0.5 * tol || j_max > 4000000) break;
    ++j_max;
  }
  if (large_factor * large_tail > 0.5 * tol)
    throw ConvergenceError("levy_atoms: upper truncation did not reach tol", large_tail);

  LevyTriple triple;
  triple.sigma2 = 0.0;
  triple.j_min = j_min;
  triple.j_max = j_max;
  triple.truncation_error = small_factor * small_tail + large_factor * large_tail;
  triple.atoms.reserve(std::size_t(j_max - j_min + 1));
  for (std::int64_t j = j_min; j <= j_max; ++j) {
    LevyAtom atom;
    atom.x = std::exp(nu * double(j) / a1);
    atom.mass = pref * std::exp(-nu * double(j));
    triple.atoms.push_back(atom);
  }
  return triple;
}

BetaValue beta(double gamma, double p, double c, BetaKind which, double tol) {
  check_gpc(gamma, p, c);
  if (!(tol > 0.0)) throw ParameterError("beta: tol must be positive");
  double a1 = a1_of(gamma);
  double q = 1.0 - p;
  double nu = -std::log(q);
  double pref = 2.0 * c * p * p / (q * q);
  auto term = [&](std::int64_t j) {
    double z = std::exp(nu * double(j) / a1);
    double mass = pref * std::exp(-nu * double(j));
    double frac = which == BetaKind::Beta1 ? z / (1.0 + z * z) : -z * z * z / (1.0 + z * z);
    return mass * frac;
  };

  // Eventual geometric ratios of the two tails (j -> +inf, j -> -inf). A
  // ratio >= 1 means the corresponding tail of the integral diverges: for
  // beta1 the lower tail fails at a1 >= 1, for beta2 the upper at a1 <= 1
  // and the lower at a1 >= 3.
  double r_up = which == BetaKind::Beta1 ? std::pow(q, 1.0 + 1.0 / a1)
                                         : std::pow(q, 1.0 - 1.0 / a1);
  double r_down = which == BetaKind::Beta1 ? std::pow(q, 1.0 / a1 - 1.0)
                                           : std::pow(q, 3.0 / a1 - 1.0);
  if (r_up >= 1.0 || r_down >= 1.0)
    throw DivergenceError("beta: tail ratio >= 1, integral diverges");
  KahanSum acc;
  acc.add(term(0));
  for (int dir : {+1, -1}) {
    double r = dir > 0 ? r_up : r_down;
    double prev = std::numeric_limits<double>::infinity();
    for (std::int64_t step = 1;; ++step) {
      if (step > 4000000)
        throw ConvergenceError("beta: series did not converge", prev);
      double v = term(dir * step);
      acc.add(v);
      double mag = std::fabs(v);
      if (mag < prev && mag * r / (1.0 - r) <= tol * std::fabs(acc.value()) + 1e-300) break;
      prev = mag;
    }
  }

  BetaValue out;
  out.value = acc.value();
  // The printed series carries prefactor 2p/q in place of the measure's
  // 2cp^2/q^2; the two agree exactly when cp = q.
  out.series = out.value * q / (c * p);
  out.discrepancy = out.value - out.series;
  return out;
}

std::complex<double> char_fn(double u, const LevyTriple& triple) {
  std::complex<double> expo(0.0, triple.beta * u);
  expo -= 0.5 * triple.sigma2 * u * u;
  KahanSum re, im;
  for (const LevyAtom& atom : triple.atoms) {
    double z = atom.x;
    double phase = u * z;
    double comp = u * z / (1.0 + z * z);
    re.add((std::cos(phase) - 1.0) * atom.mass);
    im.add((std::sin(phase) - comp) * atom.mass);
  }
  expo += std::complex<double>(re.value(), im.value());
  return std::exp(expo);
}

NormalizedSumSampler::NormalizedSumSampler(double gamma, double p, double c, double t,
                                           bool centered, double tail_threshold,
                                           std::uint64_t override_n)
    : params_(scaling_params(gamma, p, c)), t_(t), centered_(centered),
      tail_threshold_(tail_threshold) {
  if (!(t > 0.0)) throw ParameterError("NormalizedSumSampler: t must be positive");
  if (!(tail_threshold > 0.0))
    throw ParameterError("NormalizedSumSampler: tail_threshold must be positive");
  if (params_.bracket(t) < 1)
    throw TimeTooSmallError("NormalizedSumSampler: bracket(t) < 1; increase t");
  normalizer_ = params_.normalizer(t);
  n_ = override_n != 0 ? override_n : params_.n_of(t);

  // Exact E S(l, t) under P(l) = p q^l: the remainder past N is at most
  // sum_{l>N} p q^l l = q^{N+1}((N+1)p + q)/p since S(l, t) <= l.
  double q = 1.0 - p;
  KahanSum mean;
  double weight = p;  // p q^l
  for (Coord l = 0;; ++l) {
    if (l >= 1) mean.add(weight * interval_sum(l));
    double bound = std::pow(q, double(l + 1)) * (double(l + 1) * p + q) / p;
    if (l >= 4 && bound <= 1e-14 * mean.value() && mean.value() > 0.0) break;
    if (l > 2000000) throw ConvergenceError("NormalizedSumSampler: mean sum stalled", bound);
    weight *= q;
  }
  mean_sum_ = double(n_) * mean.value() / normalizer_;

  // S increases in l, so the tail indicator {S/normalizer > threshold} is a
  // one-sided crossing.
  Coord l = 1;
  while (interval_sum(l) / normalizer_ <= tail_threshold_) {
    ++l;
    if (l > 100000000) throw ConvergenceError("NormalizedSumSampler: tail threshold unreachable",
                                              tail_threshold_);
  }
  l_star_ = l;
}

double NormalizedSumSampler::interval_sum(Coord l) {
  if (l < 1) return 0.0;
  std::size_t idx = std::size_t(l);
  if (idx >= table_.size()) table_.resize(idx + 1, -1.0);
  if (table_[idx] < 0.0) table_[idx] = interval_sum_survival(l, t_);
  return table_[idx];
}

double NormalizedSumSampler::gap_value(Coord l) { return interval_sum(l) / normalizer_; }

NormalizedDraw NormalizedSumSampler::draw(SplitMix64& rng) {
  GapHistogram hist = stratified_gap_histogram(n_, params_.p, 0, rng);
  NormalizedDraw out;
  KahanSum acc;
  for (const auto& [l, count] : hist.counts) {
    if (count == 0 || l < 1) continue;
    acc.add(double(count) * interval_sum(l));
    if (l >= l_star_) out.tail_count += count;
  }
  out.value = acc.value() / normalizer_ - (centered_ ? mean_sum_ : 0.0);
  return out;
}

double normalized_sum_sample(double gamma, double p, double c, double t, bool centered,
                             SplitMix64& rng) {
  NormalizedSumSampler sampler(gamma, p, c, t, centered);
  return sampler.draw(rng).value;
}

double truncated_moment_limit(int k, double tau, double gamma, double p, double c) {
  check_gpc(gamma, p, c);
  if (k < 1) throw ParameterError("truncated_moment_limit: k must be >= 1");
  if (!(tau > 0.0)) throw ParameterError("truncated_moment_limit: tau must be positive");
  double a1 = a1_of(gamma);
  if (double(k) <= a1)
    throw DivergenceError("truncated_moment_limit: requires k > a1");
  double q = 1.0 - p;
  double nu = -std::log(q);
  double jtau = std::floor((a1 / nu) * std::log(tau));
  double ratio = std::pow(q, double(k) / a1 - 1.0);
  // Exponent sign: the atom sum sum_{j <= jtau} z_j^k m_j is geometric with
  // leading term q^{jtau (1 - k/a1)}, increasing in tau for k > a1; the
  // finite-t computation is the arbiter for the printed form's ambiguity.
  return 2.0 * c * (p / q) * (p / q) * std::pow(q, (a1 - double(k)) / a1 * jtau) / (1.0 - ratio);
}

double truncated_moment_finite_t(int k, double tau, double gamma, double p, double c, double t) {
  check_gpc(gamma, p, c);
  if (k < 1) throw ParameterError("truncated_moment_finite_t: k must be >= 1");
  if (!(tau > 0.0)) throw ParameterError("truncated_moment_finite_t: tau must be positive");
  NormalizedSumSampler sampler(gamma, p, c, t, false);
  double q = 1.0 - p;
  double nu = -std::log(q);
  // Unbounded tail bound from Y_l <= l/normalizer:
  //   sum_{l>N} p q^l l^k <= p max_l(l^k e^{-nu l/2}) q^{(N+1)/2}/(1 - sqrt(q)).
  double fmax = std::pow(2.0 * double(k) / (nu * std::numbers::e), double(k));
  double norm_k = std::pow(sampler.normalizer(), double(k));
  KahanSum acc;
  double weight = p;
  for (Coord l = 0;; ++l) {
    double y = sampler.gap_value(l);
    if (y > tau) break;  // Y_l increases in l, so the indicator never returns
    acc.add(weight * std::pow(y, double(k)));
    if (acc.value() > 0.0) {
      double tail = p * fmax * std::pow(q, 0.5 * double(l + 1)) / (1.0 - std::sqrt(q)) / norm_k;
      if (tail <= 1e-12 * acc.value()) break;
    }
    if (l > 100000000)
      throw ConvergenceError("truncated_moment_finite_t: series stalled", acc.value());
    weight *= q;
  }
  return double(sampler.gap_count()) * acc.value();
}

std::vector<std::complex<double>> empirical_cf(std::span<const double> samples,
                                               std::span<const double> u_grid) {
  if (samples.empty()) throw ParameterError("empirical_cf: no samples");
  std::vector<std::complex<double>> out;
  out.reserve(u_grid.size());
  for (double u : u_grid) {
    KahanSum re, im;
    for (double x : samples) {
      re.add(std::cos(u * x));
      im.add(std::sin(u * x));
    }
    double n = double(samples.size());
    out.emplace_back(re.value() / n, im.value() / n);
  }
  return out;
}

}  // namespace trapwalk
