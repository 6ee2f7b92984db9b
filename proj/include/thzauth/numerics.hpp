#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>

namespace thzauth::numerics {

/// Seeded pseudo-random source.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. Real-valued draws are produced here rather than through
/// std::uniform_real_distribution / std::normal_distribution, whose algorithms
/// are implementation-defined, so that a seed reproduces the same draws with
/// any standard library.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed);

  /// Independent source for (seed, index, stream), e.g. one per realization.
  static RandomSource derive(std::uint64_t seed, std::uint64_t index,
                             std::uint64_t stream = 0);

  std::uint64_t seed() const { return seed_; }

  /// Raw 64-bit output.
  std::uint64_t next_u64();
  /// Uniform real on [a, b) with 53 bits of resolution.
  double uniform(double a = 0.0, double b = 1.0);
  /// Uniform integer on [0, n). n must be positive.
  std::uint64_t uniform_index(std::uint64_t n);
  /// Standard normal draw (Marsaglia polar method).
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

/// splitmix64 finaliser; used for seed derivation.
std::uint64_t mix64(std::uint64_t x);

/// Standard normal upper tail Q(x) = 1 - Phi(x).
double q_function(double x);

/// Inverse of q_function on (0, 1). Throws DomainError outside.
double q_inverse(double p);

/// Normal density with mean `mu` and variance `var` (> 0).
double gaussian_pdf(double x, double mu, double var);

/// Natural log of gaussian_pdf; finite far into the tails.
double log_gaussian_pdf(double x, double mu, double var);

/// Standard error sqrt(p(1-p)/n) of a binomial proportion; 0 when n == 0.
double binomial_stderr(double p, std::uint64_t n);

/// Adaptive Simpson quadrature of f over [a, b] to absolute tolerance `tol`.
double integrate_adaptive_simpson(const std::function<double(double)>& f,
                                  double a, double b, double tol,
                                  int max_depth = 50);

}  // namespace thzauth::numerics
