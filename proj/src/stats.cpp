#include "phasesim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace phasesim::stats {

namespace {

// Series expansion of P(a, x), good for x < a + 1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Lentz continued fraction for Q(a, x), good for x >= a + 1.
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_p(double a, double x) {
  if (a <= 0.0) throw std::invalid_argument("gamma_p: a must be positive");
  if (x < 0.0) throw std::invalid_argument("gamma_p: x must be non-negative");
  if (x == 0.0) return 0.0;
  return x < a + 1.0 ? gamma_p_series(a, x) : 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
  if (a <= 0.0) throw std::invalid_argument("gamma_q: a must be positive");
  if (x < 0.0) throw std::invalid_argument("gamma_q: x must be non-negative");
  if (x == 0.0) return 1.0;
  return x < a + 1.0 ? 1.0 - gamma_p_series(a, x) : gamma_q_cf(a, x);
}

double chi2_sf(double statistic, double dof) {
  if (dof <= 0.0) return 1.0;
  if (statistic <= 0.0) return 1.0;
  return gamma_q(0.5 * dof, 0.5 * statistic);
}

double chi2_critical(double alpha, double dof) {
  double lo = 0.0;
  double hi = dof + 10.0 * std::sqrt(2.0 * dof) + 10.0;
  while (chi2_sf(hi, dof) > alpha) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (chi2_sf(mid, dof) > alpha) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double kolmogorov_q(double t) {
  if (t <= 0.0) return 1.0;
  double sum = 0.0;
  for (int j = 1; j <= 200; ++j) {
    const double term = std::exp(-2.0 * j * j * t * t);
    sum += (j % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

Chi2Result chi2_gof(const std::vector<double>& observed, const std::vector<double>& expected,
                    int extra_constraints) {
  if (observed.size() != expected.size()) {
    throw std::invalid_argument("chi2_gof: observed/expected size mismatch");
  }
  Chi2Result result;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (expected[i] <= 0.0) {
      throw std::invalid_argument("chi2_gof: non-positive expected count");
    }
    const double diff = observed[i] - expected[i];
    result.statistic += diff * diff / expected[i];
  }
  result.dof = static_cast<int>(observed.size()) - 1 - extra_constraints;
  result.p_value = result.dof > 0 ? chi2_sf(result.statistic, result.dof) : 1.0;
  return result;
}

KsResult ks_uniform_test(std::vector<double> samples, double lo, double hi) {
  if (samples.empty()) throw std::invalid_argument("ks_uniform_test: no samples");
  if (hi <= lo) throw std::invalid_argument("ks_uniform_test: empty interval");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double cdf = std::clamp((samples[i] - lo) / (hi - lo), 0.0, 1.0);
    d = std::max(d, std::fabs(cdf - static_cast<double>(i) / n));
    d = std::max(d, std::fabs(static_cast<double>(i + 1) / n - cdf));
  }
  KsResult result;
  result.statistic = d;
  result.n = samples.size();
  const double rootn = std::sqrt(n);
  result.p_value = kolmogorov_q((rootn + 0.12 + 0.11 / rootn) * d);
  return result;
}

std::vector<long> histogram_counts(const std::vector<double>& samples, double lo, double hi,
                                   int bins) {
  if (bins <= 0) throw std::invalid_argument("histogram_counts: bins must be positive");
  if (hi <= lo) throw std::invalid_argument("histogram_counts: empty range");
  std::vector<long> counts(static_cast<std::size_t>(bins), 0);
  const double scale = bins / (hi - lo);
  for (double x : samples) {
    if (x < lo || x >= hi) continue;
    auto idx = static_cast<std::size_t>((x - lo) * scale);
    if (idx >= counts.size()) idx = counts.size() - 1;
    ++counts[idx];
  }
  return counts;
}

}  // namespace phasesim::stats
