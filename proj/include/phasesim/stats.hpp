#pragma once

#include <cstddef>
#include <vector>

namespace phasesim::stats {

/// Lower regularized incomplete gamma P(a, x).
double gamma_p(double a, double x);

/// Upper regularized incomplete gamma Q(a, x) = 1 - P(a, x).
double gamma_q(double a, double x);

/// Survival function of the chi-square distribution with dof degrees of freedom.
double chi2_sf(double statistic, double dof);

/// Upper quantile: smallest x with chi2_sf(x, dof) <= alpha.
double chi2_critical(double alpha, double dof);

/// Complementary Kolmogorov distribution Q_KS(t) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 t^2).
double kolmogorov_q(double t);

struct Chi2Result {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

/// Pearson chi-square GOF of observed counts against expected counts.
/// dof = bins - 1 - extra_constraints. Expected totals should match observed totals.
Chi2Result chi2_gof(const std::vector<double>& observed, const std::vector<double>& expected,
                    int extra_constraints = 0);

struct KsResult {
  double statistic = 0.0;  // sup |F_n - F|
  double p_value = 1.0;
  std::size_t n = 0;
};

/// One-sample KS test of samples against the uniform distribution on [lo, hi].
KsResult ks_uniform_test(std::vector<double> samples, double lo, double hi);

/// Equal-width histogram counts; samples outside [lo, hi) are ignored.
std::vector<long> histogram_counts(const std::vector<double>& samples, double lo, double hi,
                                   int bins);

}  // namespace phasesim::stats
