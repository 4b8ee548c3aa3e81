#include "kcap/prob_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

#include "kcap/error.hpp"
#include "kcap/random_graph.hpp"
#include "kcap/rng.hpp"
#include "kcap/trace_io.hpp"

namespace kcap {

double chernoff_upper(double mu, double delta) {
  require(mu > 0.0 && delta >= 0.0, "chernoff_upper: need mu > 0 and delta >= 0");
  return std::exp(-mu * delta * delta / (2.0 + delta));
}

double chernoff_lower(double mu, double delta) {
  require(mu > 0.0 && delta >= 0.0, "chernoff_lower: need mu > 0 and delta >= 0");
  return std::exp(-mu * delta * delta / 2.0);
}

namespace {

// a log(a/p) + (1-a) log((1-a)/(1-p)) with 0 log 0 = 0; a in [0,1].
double kl_unchecked(double a, double p) {
  double d = 0.0;
  if (a > 0.0) d += a * std::log(a / p);
  if (a < 1.0) d += (1.0 - a) * std::log((1.0 - a) / (1.0 - p));
  return std::max(0.0, d);
}

}  // namespace

double kl_bernoulli(double a, double p) {
  require(a > 0.0 && a < 1.0 && p > 0.0 && p < 1.0, "kl_bernoulli: arguments must lie in (0,1)");
  return kl_unchecked(a, p);
}

double binomial_tail_kl(std::size_t k, double p, double m) {
  require(k >= 1, "binomial_tail_kl: k must be at least 1");
  require(p > 0.0 && p < 1.0, "binomial_tail_kl: p must lie in (0,1)");
  const auto kd = static_cast<double>(k);
  require(m > kd * p, "binomial_tail_kl: need M > k p");
  require(m <= kd, "binomial_tail_kl: need M <= k");
  return std::exp(-kd * kl_unchecked(m / kd, p));
}

double pb_ratio_bound(double mu, std::int64_t t1, std::int64_t t2) {
  require(mu >= 0.0, "pb_ratio_bound: mu must be nonnegative");
  const double up = std::ceil(mu);
  const double down = std::floor(mu);
  require(static_cast<double>(t1) >= up, "pb_ratio_bound: need t1 >= ceil(mu)");
  require(t2 > t1, "pb_ratio_bound: need t2 > t1");
  const double a = static_cast<double>(t2) - up;
  const double b = static_cast<double>(t1) - down;
  return std::exp((a * a - b * b) / (2.0 * static_cast<double>(t2)));
}

double max_degree_estimate(std::size_t n, double r, std::size_t d) {
  require(n >= 3 && r > 0.0 && d >= 1, "max_degree_estimate: need n >= 3, r > 0, d >= 1");
  const double ln_n = std::log(static_cast<double>(n));
  const double occupancy = static_cast<double>(n) * std::pow(r, static_cast<double>(d));
  require(occupancy < ln_n, "max_degree_estimate: need n r^d < ln n");
  return ln_n / std::log(ln_n / occupancy);
}

double balls_bins_max_load(std::size_t m, std::size_t n) {
  require(m >= 1 && n >= 3, "balls_bins_max_load: need m >= 1, n >= 3");
  const double ln_n = std::log(static_cast<double>(n));
  const double gamma = static_cast<double>(n) * ln_n / static_cast<double>(m);
  require(gamma > 1.0, "balls_bins_max_load: need m < n ln n");
  const double lg = std::log(gamma);
  return ln_n / lg * (1.0 + 0.9 * std::log(lg) / lg);
}

double c0_lower_bound(std::size_t k) {
  require(k >= 16, "c0_lower_bound: need k >= 16");
  const double l1 = std::log(static_cast<double>(k));
  const double l2 = std::log(l1);
  const double l3 = std::log(l2);
  return l1 / l2 * (1.0 + 0.25 * l3 / l2);
}

std::vector<double> poisson_binomial_pmf(std::span<const double> probs) {
  std::vector<double> pmf(probs.size() + 1, 0.0);
  pmf[0] = 1.0;
  std::size_t used = 0;
  for (double p : probs) {
    require(p >= 0.0 && p <= 1.0, "poisson_binomial_pmf: probability outside [0,1]");
    ++used;
    for (std::size_t j = used; j > 0; --j) pmf[j] = pmf[j] * (1.0 - p) + pmf[j - 1] * p;
    pmf[0] *= 1.0 - p;
  }
  return pmf;
}

double tail_at_least(std::span<const double> pmf, std::int64_t t) {
  if (t <= 0) return 1.0;
  double s = 0.0;
  for (auto j = static_cast<std::size_t>(t); j < pmf.size(); ++j) s += pmf[j];
  return s;
}

double TailSampler::mean() const { return std::accumulate(probs.begin(), probs.end(), 0.0); }

std::vector<std::uint64_t> sample_histogram(const TailSampler& sampler, std::size_t trials, std::uint64_t seed) {
  const std::size_t k = sampler.probs.size();
  const PairHash hash(seed);
  std::vector<std::uint64_t> hist(k + 1, 0);
  const auto count = static_cast<std::int64_t>(trials);
#pragma omp parallel
  {
    std::vector<std::uint64_t> local(k + 1, 0);
#pragma omp for schedule(static)
    for (std::int64_t trial = 0; trial < count; ++trial) {
      std::size_t x = 0;
      for (std::size_t j = 0; j < k; ++j) x += hash.uniform(static_cast<std::uint64_t>(trial), j) < sampler.probs[j];
      ++local[x];
    }
#pragma omp critical
    for (std::size_t j = 0; j <= k; ++j) hist[j] += local[j];
  }
  return hist;
}

BoundReport tail_check_from_histogram(std::span<const std::uint64_t> histogram, double threshold, double bound) {
  BoundReport report;
  std::uint64_t total = 0, hits = 0;
  for (std::size_t x = 0; x < histogram.size(); ++x) {
    total += histogram[x];
    if (static_cast<double>(x) > threshold) hits += histogram[x];
  }
  require(total >= 1, "tail check: empty histogram");
  report.trials = total;
  report.bound_value = bound;
  report.empirical_value = static_cast<double>(hits) / static_cast<double>(total);
  const double q = report.empirical_value;
  report.standard_error = std::sqrt(std::max(q * (1.0 - q), 0.0) / static_cast<double>(total));
  report.pass = report.empirical_value <= bound + 3.0 * report.standard_error;
  return report;
}

BoundReport empirical_tail_check(const TailSampler& sampler, double threshold, double bound, std::size_t trials,
                                 std::uint64_t seed) {
  require(trials >= 1000, "empirical_tail_check: need at least 1000 trials");
  const auto hist = sample_histogram(sampler, trials, seed);
  return tail_check_from_histogram(hist, threshold, bound);
}

namespace {

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
  char buf[128];
  std::snprintf(buf, sizeof buf, format, a, b, c);
  return buf;
}

std::size_t max_bin_load(std::size_t balls, std::size_t bins, std::uint64_t seed) {
  std::vector<std::uint32_t> load(bins, 0);
  Stream stream(seed);
  std::uint32_t best = 0;
  for (std::size_t b = 0; b < balls; ++b) best = std::max(best, ++load[stream.bounded(bins)]);
  return best;
}

}  // namespace

std::vector<ValidationRow> validation_table(std::uint64_t seed, std::size_t trials) {
  std::vector<ValidationRow> rows;

  const auto fair = sample_histogram(TailSampler::binomial(100, 0.5), trials, derive_seed(seed, 1));
  for (int i = 1; i <= 10; ++i) {
    const double delta = 0.1 * i;
    const double upper = chernoff_upper(50.0, delta);
    const auto hi = tail_check_from_histogram(fair, 50.0 * (1.0 + delta), upper);
    rows.push_back({"chernoff_upper", fmt("Bin(100;0.5) delta=%.1f", delta), upper, hi.empirical_value, hi.pass});

    // P(X < (1-delta) mu) = 1 - P(X >= (1-delta) mu) read off the histogram.
    const double lower = chernoff_lower(50.0, delta);
    std::uint64_t below = 0, total = 0;
    for (std::size_t x = 0; x < fair.size(); ++x) {
      total += fair[x];
      if (static_cast<double>(x) < 50.0 * (1.0 - delta)) below += fair[x];
    }
    const double q = static_cast<double>(below) / static_cast<double>(total);
    const double se = std::sqrt(q * (1.0 - q) / static_cast<double>(total));
    rows.push_back({"chernoff_lower", fmt("Bin(100;0.5) delta=%.1f", delta), lower, q, q <= lower + 3.0 * se});
  }

  const auto sparse = sample_histogram(TailSampler::binomial(100, 0.1), trials, derive_seed(seed, 2));
  for (double m : {15.0, 20.0, 25.0, 30.0}) {
    const double bound = binomial_tail_kl(100, 0.1, m);
    const auto r = tail_check_from_histogram(sparse, m, bound);
    rows.push_back({"binomial_tail_kl", fmt("Bin(100;0.1) M=%.0f", m), bound, r.empirical_value, r.pass});
  }

  Stream stream(derive_seed(seed, 3));
  for (int instance = 0; instance < 4; ++instance) {
    std::vector<double> probs(20 + 2 * instance);
    for (auto& p : probs) p = 0.05 + 0.9 * stream.uniform();
    const auto pmf = poisson_binomial_pmf(probs);
    const double mu = std::accumulate(probs.begin(), probs.end(), 0.0);
    const auto t1 = static_cast<std::int64_t>(std::ceil(mu));
    const std::int64_t t2 = t1 + 3;
    const double bound = pb_ratio_bound(mu, t1, t2);
    const double ratio = tail_at_least(pmf, t1) / tail_at_least(pmf, t2);
    rows.push_back({"pb_ratio_bound", fmt("k=%.0f mu=%.3f t1=%.0f", static_cast<double>(probs.size()), mu,
                                          static_cast<double>(t1)),
                    bound, ratio, ratio >= bound});
  }

  const std::size_t bins = 1000000;
  const double load_bound = balls_bins_max_load(bins, bins);
  const auto load = static_cast<double>(max_bin_load(bins, bins, derive_seed(seed, 4)));
  rows.push_back({"balls_bins_max_load", "m=n=1e6", load_bound, load, load >= load_bound});

  // The degree law is a limit statement; only its almost-sure lower side
  // is checked here, the mean ratio is reported.
  const std::size_t pts = 100000;
  const double r = 1.0 / static_cast<double>(pts);
  const double kn = max_degree_estimate(pts, r, 1);
  double mean_degree = 0.0;
  std::size_t low = 0;
  constexpr int replicas = 20;
  for (int i = 0; i < replicas; ++i) {
    const auto deg = static_cast<double>(geometric_max_degree(pts, r, 1, derive_seed(seed, 5, i)));
    mean_degree += deg / replicas;
    low += deg < 0.7 * kn;
  }
  rows.push_back({"max_degree_estimate", "n=1e5 d=1 n*r=1 (20 graphs; mean max degree)", kn, mean_degree, low == 0});

  return rows;
}

void write_validation_csv(std::ostream& out, const std::vector<ValidationRow>& rows) {
  out << "bound,parameters,analytic,empirical,verdict\n";
  for (const auto& r : rows)
    out << r.bound << ',' << r.parameters << ',' << format_double(r.analytic) << ',' << format_double(r.empirical)
        << ',' << (r.pass ? "pass" : "fail") << '\n';
}

std::size_t geometric_max_degree(std::size_t n, double r, std::size_t d, std::uint64_t seed) {
  require(n >= 1 && r > 0.0 && d >= 1, "geometric_max_degree: need n >= 1, r > 0, d >= 1");
  const PointSet pts = sample_vertices(n, d, seed);
  const double min_cell = std::pow(2.0, -60.0 / static_cast<double>(d));
  const GridIndex grid(pts, std::max(r, min_cell));
  const double r2 = r * r;
  std::size_t best = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t degree = 0;
    grid.visit(pts[i], r, [&](std::span<const std::uint32_t> ids) {
      for (auto j : ids) degree += j != i && squared_distance(pts[i], pts[j]) <= r2;
    });
    best = std::max(best, degree);
  }
  return best;
}

}  // namespace kcap
