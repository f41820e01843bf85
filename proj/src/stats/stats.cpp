#include "continuum/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace continuum::stats {

namespace {

constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;

// Modified Lentz evaluation of the incomplete beta continued fraction.
double beta_continued_fraction(double a, double b, double x) {
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  const int max_iter = 20000 + static_cast<int>(10.0 * std::sqrt(std::max(a, b)));
  for (int m = 1; m <= max_iter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  return h;
}

double log_beta_prefix(double a, double b, double x) {
  return std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
}

double t_pdf(double x, double df) {
  const double logc = std::lgamma((df + 1.0) / 2.0) - std::lgamma(df / 2.0) - 0.5 * std::log(df * M_PI);
  return std::exp(logc - (df + 1.0) / 2.0 * std::log1p(x * x / df));
}

// Acklam's rational approximation, good to about 1e-9; used as a starting point.
double normal_quantile(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                 1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                 6.680131188771972e+01,  -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                 -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                 3.754408661907416e+00};
  const double plow = 0.02425;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - plow) return -normal_quantile(1.0 - p);
  const double q = p - 0.5, r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

// P(|T| > |x|), computed without cancellation.
double two_sided_tail(double x, double df) {
  if (x == 0.0) return 1.0;
  return incomplete_beta(df / 2.0, 0.5, df / (df + x * x));
}

double mean_of(std::span<const double> s) { return std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size()); }

double variance_of(std::span<const double> s, double mean) {
  double acc = 0.0;
  for (double v : s) acc += (v - mean) * (v - mean);
  return acc / static_cast<double>(s.size() - 1);
}

}  // namespace

InsufficientSamples::InsufficientSamples(std::size_t n, std::size_t required)
    : std::invalid_argument("InsufficientSamples: " + std::to_string(n) + " samples, need at least " +
                            std::to_string(required)) {}

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0) || !(x >= 0.0 && x <= 1.0)) throw DomainError("incomplete_beta: argument out of domain");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return std::exp(log_beta_prefix(a, b, x)) * beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - std::exp(log_beta_prefix(a, b, x)) * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double t_cdf(double x, double df) {
  if (!(df > 0.0) || std::isnan(x)) throw DomainError("t_cdf: df must be > 0");
  if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
  const double half_tail = 0.5 * two_sided_tail(x, df);
  return x < 0.0 ? half_tail : 1.0 - half_tail;
}

double t_quantile(double prob, double df) {
  if (!(prob > 0.0 && prob < 1.0) || !(df > 0.0)) throw DomainError("t_quantile: need 0 < prob < 1 and df > 0");
  if (prob == 0.5) return 0.0;
  // Solve on the smaller tail so the target keeps full relative precision.
  const bool upper = prob > 0.5;
  const double tail = upper ? 1.0 - prob : prob;

  // Cornish-Fisher start from the normal quantile.
  const double z = -normal_quantile(tail);
  const double z2 = z * z;
  double x = z + (z2 * z + z) / (4.0 * df) + ((5.0 * z2 + 16.0) * z2 * z + 3.0 * z) / (96.0 * df * df);
  if (!std::isfinite(x) || x <= 0.0) x = z;

  // Bracket [lo, hi] on the upper tail: f(x) = P(T > x) - tail, decreasing in x.
  double lo = 0.0, hi = std::max(1.0, 2.0 * x);
  while (0.5 * two_sided_tail(hi, df) > tail) hi *= 2.0;
  for (int iter = 0; iter < 200; ++iter) {
    const double f = 0.5 * two_sided_tail(x, df) - tail;
    if (f > 0.0) lo = x; else hi = x;
    const double step = f / t_pdf(x, df);  // dP(T > x)/dx = -pdf
    double next = x + step;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-15 * std::max(1.0, std::abs(x))) {
      x = next;
      break;
    }
    x = next;
  }
  return upper ? x : -x;
}

SummaryStatistics summarize(std::span<const double> samples, std::string metric_id) {
  if (samples.size() < 2) throw InsufficientSamples(samples.size(), 2);
  SummaryStatistics s;
  s.metric_id = std::move(metric_id);
  s.n = samples.size();
  s.mean = mean_of(samples);
  s.sample_std = std::sqrt(variance_of(samples, s.mean));
  s.ci95_halfwidth = t_quantile(0.975, static_cast<double>(s.n - 1)) * s.sample_std / std::sqrt(static_cast<double>(s.n));
  return s;
}

SummaryStatistics describe(std::span<const double> samples, std::string metric_id) {
  if (samples.empty()) throw InsufficientSamples(0, 1);
  SummaryStatistics s;
  s.metric_id = std::move(metric_id);
  s.n = samples.size();
  s.mean = mean_of(samples);
  return s;
}

TTestResult welch_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2) throw InsufficientSamples(a.size(), 2);
  if (b.size() < 2) throw InsufficientSamples(b.size(), 2);
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  const double ma = mean_of(a), mb = mean_of(b);
  const double va = variance_of(a, ma) / na, vb = variance_of(b, mb) / nb;
  TTestResult r;
  if (va + vb == 0.0) {
    r.degenerate = true;
    r.degrees_of_freedom = na + nb - 2.0;
    if (ma == mb) {
      r.t_statistic = 0.0;
      r.p_value = 1.0;
    } else {
      r.t_statistic = ma > mb ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
      r.p_value = 0.0;
    }
    r.significant = r.p_value < 0.05;
    return r;
  }
  r.t_statistic = (ma - mb) / std::sqrt(va + vb);
  r.degrees_of_freedom = (va + vb) * (va + vb) / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
  r.p_value = two_sided_tail(r.t_statistic, r.degrees_of_freedom);
  r.significant = r.p_value < 0.05;
  return r;
}

}  // namespace continuum::stats
