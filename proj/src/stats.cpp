#include "operc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "operc/errors.hpp"

namespace operc {

double mean(std::span<const double> xs) {
  if (xs.empty()) throw InsufficientDataError("mean of an empty sample");
  double s = 0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double sample_sd(std::span<const double> xs) {
  if (xs.size() < 2)
    throw InsufficientDataError("sample deviation needs at least 2 values");
  double m = mean(xs), s = 0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

double standard_error(std::span<const double> xs) {
  return sample_sd(xs) / std::sqrt(static_cast<double>(xs.size()));
}

double binomial_se(double phat, std::int64_t n) {
  if (n < 1) throw InsufficientDataError("binomial SE needs n >= 1");
  if (phat < 0 || phat > 1)
    throw ContractError("fraction outside [0, 1]");
  return std::sqrt(phat * (1 - phat) / static_cast<double>(n));
}

double median(std::span<const double> xs) {
  if (xs.empty()) throw InsufficientDataError("median of an empty sample");
  std::vector<double> v(xs.begin(), xs.end());
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  return (n % 2) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double lag1_autocorrelation(std::span<const double> xs) {
  if (xs.size() < 3)
    throw InsufficientDataError("lag-1 autocorrelation needs at least 3 values");
  double m = mean(xs), num = 0, den = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    den += (xs[i] - m) * (xs[i] - m);
    if (i + 1 < xs.size()) num += (xs[i] - m) * (xs[i + 1] - m);
  }
  if (den == 0)
    throw InsufficientDataError("constant series has no autocorrelation");
  return num / den;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double ks_distance_to_standard_normal(std::span<const double> xs) {
  if (xs.size() < 2)
    throw InsufficientDataError("distribution test needs at least 2 values");
  double m = mean(xs), sd = sample_sd(xs);
  if (sd == 0)
    throw InsufficientDataError("degenerate sample: zero deviation");
  std::vector<double> z(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) z[i] = (xs[i] - m) / sd;
  std::sort(z.begin(), z.end());
  const double n = static_cast<double>(z.size());
  double d = 0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    double F = normal_cdf(z[i]);
    d = std::max(d, F - static_cast<double>(i) / n);
    d = std::max(d, static_cast<double>(i + 1) / n - F);
  }
  return d;
}

double bootstrap_se(std::int64_t n,
                    const std::function<double(std::span<const std::int64_t>)>& stat,
                    std::uint64_t seed, int reps) {
  if (n < 1) throw InsufficientDataError("bootstrap needs at least one group");
  if (reps < 2) throw ContractError("bootstrap needs at least 2 replicates");
  std::mt19937_64 rng(seed);
  std::vector<double> vals(static_cast<std::size_t>(reps));
  std::vector<std::int64_t> idx(static_cast<std::size_t>(n));
  for (int b = 0; b < reps; ++b) {
    for (auto& i : idx)
      i = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(n));
    vals[static_cast<std::size_t>(b)] = stat(idx);
  }
  double m = mean(vals), s = 0;
  for (double v : vals) s += (v - m) * (v - m);
  return std::sqrt(s / static_cast<double>(reps - 1));
}

std::vector<double> normal_draws(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uniform = [&rng]() {
    // In (0, 1]: safe under the logarithm below.
    return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
  };
  std::vector<double> out;
  out.reserve(n);
  const double two_pi = 8.0 * std::atan(1.0);
  while (out.size() < n) {
    double u1 = uniform(), u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    out.push_back(r * std::cos(two_pi * u2));
    if (out.size() < n) out.push_back(r * std::sin(two_pi * u2));
  }
  return out;
}

}  // namespace operc
