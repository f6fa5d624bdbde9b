#include "trapwalk/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "trapwalk/errors.hpp"

namespace trapwalk {

void RunningMoments::merge(const RunningMoments& o) noexcept {
  if (o.n_ == 0) return;
  if (n_ == 0) {
    *this = o;
    return;
  }
  std::uint64_t n = n_ + o.n_;
  double d = o.mean_ - mean_;
  double mean = mean_ + d * double(o.n_) / double(n);
  m2_ += o.m2_ + d * d * double(n_) * double(o.n_) / double(n);
  mean_ = mean;
  n_ = n;
}

double RunningMoments::std_error() const noexcept {
  return n_ > 1 ? std::sqrt(variance() / double(n_)) : 0.0;
}

namespace {

// Lower incomplete gamma by series, for x < a+1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 10000; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper incomplete gamma by continued fraction, for x >= a+1.
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    double an = -double(i) * (double(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gamma_p(double a, double x) {
  if (a <= 0.0 || x < 0.0) throw ParameterError("gamma_p: need a > 0, x >= 0");
  if (x == 0.0) return 0.0;
  return x < a + 1.0 ? gamma_p_series(a, x) : 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
  if (a <= 0.0 || x < 0.0) throw ParameterError("gamma_q: need a > 0, x >= 0");
  if (x == 0.0) return 1.0;
  return x < a + 1.0 ? 1.0 - gamma_p_series(a, x) : gamma_q_cf(a, x);
}

double chi_square_sf(double x, double k) {
  if (x <= 0.0) return 1.0;
  return gamma_q(0.5 * k, 0.5 * x);
}

double chi_square_gof_pvalue(std::span<const double> observed,
                             std::span<const double> expected,
                             int dof_override) {
  if (observed.size() != expected.size() || observed.empty())
    throw ParameterError("chi_square_gof_pvalue: size mismatch");
  double stat = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (expected[i] <= 0.0) throw ParameterError("chi_square_gof_pvalue: nonpositive expected count");
    double d = observed[i] - expected[i];
    stat += d * d / expected[i];
  }
  double dof = dof_override >= 0 ? double(dof_override) : double(observed.size() - 1);
  return chi_square_sf(stat, dof);
}

double chi_square_two_sample_pvalue(std::span<const std::uint64_t> a,
                                    std::span<const std::uint64_t> b) {
  if (a.size() != b.size() || a.empty())
    throw ParameterError("chi_square_two_sample_pvalue: size mismatch");
  double na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    na += double(a[i]);
    nb += double(b[i]);
  }
  if (na == 0.0 || nb == 0.0) throw ParameterError("chi_square_two_sample_pvalue: empty sample");
  double total = na + nb;
  double stat = 0.0;
  int used = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double col = double(a[i]) + double(b[i]);
    if (col == 0.0) continue;
    ++used;
    double ea = col * na / total;
    double eb = col * nb / total;
    double da = double(a[i]) - ea;
    double db = double(b[i]) - eb;
    stat += da * da / ea + db * db / eb;
  }
  if (used < 2) return 1.0;
  return chi_square_sf(stat, double(used - 1));
}

double binomial_log_pmf(std::uint64_t n, std::uint64_t k, double q) {
  if (k > n) return -std::numeric_limits<double>::infinity();
  if (q <= 0.0) return k == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  if (q >= 1.0) return k == n ? 0.0 : -std::numeric_limits<double>::infinity();
  double dn = double(n), dk = double(k);
  return std::lgamma(dn + 1.0) - std::lgamma(dk + 1.0) - std::lgamma(dn - dk + 1.0) +
         dk * std::log(q) + (dn - dk) * std::log1p(-q);
}

double binomial_upper_tail(std::uint64_t n, std::uint64_t k, double q) {
  if (k == 0) return 1.0;
  if (k > n) return 0.0;
  // Sum the shorter side in plain double; terms are generated by the pmf
  // recurrence from the boundary of the summed range.
  KahanSum acc;
  if (double(k) > double(n) * q) {
    double logp = binomial_log_pmf(n, k, q);
    double term = std::exp(logp);
    acc.add(term);
    for (std::uint64_t j = k; j < n; ++j) {
      term *= (double(n - j) / double(j + 1)) * (q / (1.0 - q));
      acc.add(term);
      if (term < acc.value() * 1e-18) break;
    }
    return std::min(1.0, acc.value());
  }
  // Lower tail P(X <= k-1), complement.
  double logp = binomial_log_pmf(n, k - 1, q);
  double term = std::exp(logp);
  acc.add(term);
  for (std::uint64_t j = k - 1; j > 0; --j) {
    term *= (double(j) / double(n - j + 1)) * ((1.0 - q) / q);
    acc.add(term);
    if (term < acc.value() * 1e-18) break;
  }
  return std::max(0.0, 1.0 - acc.value());
}

}  // namespace trapwalk
