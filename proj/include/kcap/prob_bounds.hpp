#pragma once

// Tail bounds for sums of independent indicators and the occupancy estimates
// used in the convergence analysis, with exact and Monte Carlo checkers.
// Logarithms are natural throughout.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace kcap {

/// P(X > (1 + delta) mu) <= exp(-mu delta^2 / (2 + delta)).
double chernoff_upper(double mu, double delta);
/// P(X < (1 - delta) mu) <= exp(-mu delta^2 / 2).
double chernoff_lower(double mu, double delta);

/// D(a || p) for a, p in (0,1).
double kl_bernoulli(double a, double p);

/// exp(-k D(M/k || p)), an upper bound on P(X > M) for X ~ Bin(k, p), M > kp.
double binomial_tail_kl(std::size_t k, double p, double m);

/// exp(((t2 - ceil mu)^2 - (t1 - floor mu)^2) / (2 t2)), a lower bound on
/// P(X >= t1) / P(X >= t2) for a Poisson-binomial X with mean mu.
double pb_ratio_bound(double mu, std::int64_t t1, std::int64_t t2);

/// ln n / ln(ln n / (n r^d)), the typical maximum degree of a hard-threshold
/// geometric graph. Requires n r^d < ln n.
double max_degree_estimate(std::size_t n, double r, std::size_t d);

/// (ln n / ln g)(1 + 0.9 ln ln g / ln g) with g = n ln n / m.
double balls_bins_max_load(std::size_t m, std::size_t n);

/// (ln k / ln ln k)(1 + ln ln ln k / (4 ln ln k)), k >= 16.
double c0_lower_bound(std::size_t k);

/// Exact distribution of a sum of independent indicators, O(k^2).
std::vector<double> poisson_binomial_pmf(std::span<const double> probs);
/// P(X >= t) from a pmf.
double tail_at_least(std::span<const double> pmf, std::int64_t t);

/// Sum of independent Bernoulli(p_i) indicators.
struct TailSampler {
  std::vector<double> probs;

  static TailSampler binomial(std::size_t k, double p) { return {std::vector<double>(k, p)}; }
  double mean() const;
};

/// Histogram of `trials` Monte Carlo draws of the sampler.
std::vector<std::uint64_t> sample_histogram(const TailSampler& sampler, std::size_t trials, std::uint64_t seed);

struct BoundReport {
  double bound_value = 0.0;
  double empirical_value = 0.0;
  double standard_error = 0.0;
  std::size_t trials = 0;
  bool pass = false;  // empirical <= bound + 3 standard errors
};

/// Monte Carlo estimate of P(X > threshold) against an upper bound.
BoundReport empirical_tail_check(const TailSampler& sampler, double threshold, double bound, std::size_t trials,
                                 std::uint64_t seed = 1);
/// Same check against an existing histogram.
BoundReport tail_check_from_histogram(std::span<const std::uint64_t> histogram, double threshold, double bound);

/// One row of the `bounds` validation table.
struct ValidationRow {
  std::string bound;
  std::string parameters;
  double analytic = 0.0;
  double empirical = 0.0;
  bool pass = false;
};

/// Checks every bound against exact or simulated values.
std::vector<ValidationRow> validation_table(std::uint64_t seed = 1, std::size_t trials = 1000000);
/// bound,parameters,analytic,empirical,verdict
void write_validation_csv(std::ostream& out, const std::vector<ValidationRow>& rows);

/// Largest degree of the hard-threshold geometric graph on n uniform points
/// in [0,1]^d, edges between points at distance <= r.
std::size_t geometric_max_degree(std::size_t n, double r, std::size_t d, std::uint64_t seed);

}  // namespace kcap
