#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace trapwalk {

// Compensated (Kahan) accumulator; add order fixed by the caller.
class KahanSum {
 public:
  void add(double x) noexcept {
    double y = x - c_;
    double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const noexcept { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

// Streaming mean/variance (Welford).
class RunningMoments {
 public:
  void add(double x) noexcept {
    ++n_;
    double d = x - mean_;
    mean_ += d / double(n_);
    m2_ += d * (x - mean_);
  }
  void merge(const RunningMoments& o) noexcept;
  std::uint64_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  double variance() const noexcept { return n_ > 1 ? m2_ / double(n_ - 1) : 0.0; }
  double std_error() const noexcept;

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

// Regularized incomplete gamma functions P(a,x), Q(a,x) = 1 - P(a,x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Survival function of the chi-square law with k degrees of freedom.
double chi_square_sf(double x, double k);

// Pearson goodness-of-fit p-value: observed counts vs expected counts.
// Degrees of freedom = #bins - 1 unless overridden.
double chi_square_gof_pvalue(std::span<const double> observed,
                             std::span<const double> expected,
                             int dof_override = -1);

// Two-sample chi-square homogeneity p-value over aligned count vectors.
double chi_square_two_sample_pvalue(std::span<const std::uint64_t> a,
                                    std::span<const std::uint64_t> b);

// log C(n,k) q^k (1-q)^(n-k), safe for large n.
double binomial_log_pmf(std::uint64_t n, std::uint64_t k, double q);

// Exact upper tail P(X >= k), X ~ Binomial(n, q), by direct summation.
double binomial_upper_tail(std::uint64_t n, std::uint64_t k, double q);

}  // namespace trapwalk
