#pragma once

#include <span>
#include <stdexcept>
#include <string>

namespace continuum::stats {

class InsufficientSamples : public std::invalid_argument {
 public:
  InsufficientSamples(std::size_t n, std::size_t required);
};

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct SummaryStatistics {
  std::string metric_id;
  std::size_t n = 0;
  double mean = 0.0;
  double sample_std = 0.0;     // n - 1 denominator
  double ci95_halfwidth = 0.0;
};

struct TTestResult {
  double t_statistic = 0.0;
  double degrees_of_freedom = 0.0;  // Welch-Satterthwaite
  double p_value = 1.0;             // two-sided
  bool significant = false;         // p < 0.05
  bool degenerate = false;          // both variances zero; p fixed by convention
};

// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);

double t_cdf(double x, double df);
double t_quantile(double prob, double df);

// Requires n >= 2.
SummaryStatistics summarize(std::span<const double> samples, std::string metric_id = {});

// Mean only; std and half-width stay zero. Used for single-run sweeps.
SummaryStatistics describe(std::span<const double> samples, std::string metric_id = {});

TTestResult welch_t_test(std::span<const double> a, std::span<const double> b);

}  // namespace continuum::stats
