#ifndef OPERC_STATS_HPP
#define OPERC_STATS_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace operc {

double mean(std::span<const double> xs);          // needs n >= 1
double sample_sd(std::span<const double> xs);     // needs n >= 2
double standard_error(std::span<const double> xs);
double binomial_se(double phat, std::int64_t n);
double median(std::span<const double> xs);        // needs n >= 1
double lag1_autocorrelation(std::span<const double> xs);  // needs n >= 3

// Standard normal distribution function, via the complementary error function.
double normal_cdf(double x);

/**
 * Kolmogorov-Smirnov distance between the sample (standardized by its own
 * mean and sample deviation) and the standard normal law. Degenerate
 * samples (zero deviation) raise InsufficientDataError.
 */
double ks_distance_to_standard_normal(std::span<const double> xs);

/**
 * Bootstrap standard error of a statistic over n exchangeable groups:
 * reps resamples of n group indices with replacement, deterministic in
 * seed. Indices are drawn as rng() % n, which keeps replicates identical
 * across platforms.
 */
double bootstrap_se(std::int64_t n,
                    const std::function<double(std::span<const std::int64_t>)>& stat,
                    std::uint64_t seed, int reps = 200);

// Deterministic standard normal draws (Box-Muller over explicit 53-bit
// uniforms), used to calibrate the distribution tests.
std::vector<double> normal_draws(std::size_t n, std::uint64_t seed);

}  // namespace operc

#endif  // OPERC_STATS_HPP
