#pragma once

// Two-state hidden Markov model over {no impersonation, impersonation} and
// Viterbi sequence estimation of the hidden states from per-slot test outcomes.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace thzauth::hmm {

using Matrix2 = std::array<std::array<double, 2>, 2>;
using Distribution2 = std::array<double, 2>;

/// State/observation 0 = no impersonation, 1 = impersonation.
struct Hmm {
  /// transition[i][j] = P(s[k] = j | s[k-1] = i); rows sum to 1.
  Matrix2 transition{{{0.5, 0.5}, {0.5, 0.5}}};
  /// emission[i][j] = P(x[k] = i | s[k] = j); columns sum to 1.
  Matrix2 emission{{{1.0, 0.0}, {0.0, 1.0}}};
  Distribution2 initial{1.0, 0.0};

  void validate() const;
};

/// R = [[1 - pfa, pmd], [pfa, 1 - pmd]].
Matrix2 emission_from_errors(double pfa, double pmd);

/// State distribution after `steps` transitions from `x0`.
Distribution2 predict(const Distribution2& x0, const Matrix2& transition, std::uint64_t steps);

/// Most likely hidden-state sequence given the observations (log domain).
/// Ties prefer state 0, then staying in the previous state.
std::vector<std::uint8_t> viterbi(std::span<const std::uint8_t> observations, const Hmm& model);

/// Log of P(states) P(observations | states); -inf for impossible paths.
double path_log_likelihood(std::span<const std::uint8_t> states,
                           std::span<const std::uint8_t> observations, const Hmm& model);

}  // namespace thzauth::hmm
