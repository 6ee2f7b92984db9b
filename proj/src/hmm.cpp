#include "thzauth/hmm.hpp"

#include <algorithm>

#include <cmath>
#include <limits>
#include <string>

#include "thzauth/error.hpp"

namespace thzauth::hmm {

namespace {

constexpr double kStochasticTol = 1e-9;

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

double safe_log(double p) {
  return p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
}

}  // namespace

void Hmm::validate() const {
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      if (!is_probability(transition[i][j]) || !is_probability(emission[i][j])) {
        throw DomainError("hmm: matrix entries must lie in [0, 1]");
      }
    }
    if (std::abs(transition[i][0] + transition[i][1] - 1.0) > kStochasticTol) {
      throw DomainError("hmm: transition row " + std::to_string(i) + " does not sum to 1");
    }
    if (emission[0][i] == 0.0 && emission[1][i] == 0.0) {
      throw NumericalError("hmm: emission column " + std::to_string(i) + " is all zero");
    }
    if (std::abs(emission[0][i] + emission[1][i] - 1.0) > kStochasticTol) {
      throw DomainError("hmm: emission column " + std::to_string(i) + " does not sum to 1");
    }
  }
  if (!is_probability(initial[0]) || !is_probability(initial[1]) ||
      std::abs(initial[0] + initial[1] - 1.0) > kStochasticTol) {
    throw DomainError("hmm: initial distribution is not a distribution");
  }
}

Matrix2 emission_from_errors(double pfa, double pmd) {
  if (!is_probability(pfa) || !is_probability(pmd)) {
    throw DomainError("emission_from_errors: pfa and pmd must lie in [0, 1]");
  }
  return Matrix2{{{1.0 - pfa, pmd}, {pfa, 1.0 - pmd}}};
}

Distribution2 predict(const Distribution2& x0, const Matrix2& transition, std::uint64_t steps) {
  Distribution2 x = x0;
  for (std::uint64_t k = 0; k < steps; ++k) {
    // Row-stochastic convention: x'[j] = sum_i x[i] p_ij.
    Distribution2 next{x[0] * transition[0][0] + x[1] * transition[1][0],
                       x[0] * transition[0][1] + x[1] * transition[1][1]};
    if (next == x) break;
    x = next;
  }
  return x;
}

namespace {

// Tied paths share the same factors summed in a different order, so their
// log scores can differ by rounding; treat those as equal.
bool tied(double a, double b) {
  if (a == b) return true;
  if (std::isinf(a) || std::isinf(b)) return false;
  return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

std::vector<std::uint8_t> viterbi(std::span<const std::uint8_t> observations, const Hmm& model) {
  if (observations.empty()) throw DomainError("viterbi: empty observation sequence");
  model.validate();

  double log_trans[2][2];
  double log_emit[2][2];
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      log_trans[i][j] = safe_log(model.transition[i][j]);
      log_emit[i][j] = safe_log(model.emission[i][j]);
    }
  }

  const std::size_t n = observations.size();
  std::vector<std::array<std::uint8_t, 2>> backpointer(n);
  double score[2];
  for (int s = 0; s < 2; ++s) {
    const std::uint8_t x = observations[0];
    if (x > 1) throw DomainError("viterbi: observations must be 0 or 1");
    score[s] = safe_log(model.initial[s]) + log_emit[x][s];
  }

  for (std::size_t t = 1; t < n; ++t) {
    const std::uint8_t x = observations[t];
    if (x > 1) throw DomainError("viterbi: observations must be 0 or 1");
    double next[2];
    for (int s = 0; s < 2; ++s) {
      const double stay = score[s] + log_trans[s][s];
      const double move = score[1 - s] + log_trans[1 - s][s];
      // Equal scores keep the previous state.
      const bool from_other = move > stay && !tied(move, stay);
      backpointer[t][s] = static_cast<std::uint8_t>(from_other ? 1 - s : s);
      next[s] = (from_other ? move : stay) + log_emit[x][s];
    }
    score[0] = next[0];
    score[1] = next[1];
  }

  if (score[0] == -std::numeric_limits<double>::infinity() &&
      score[1] == -std::numeric_limits<double>::infinity()) {
    throw NumericalError("viterbi: no state sequence can produce the observations");
  }

  std::vector<std::uint8_t> path(n);
  path[n - 1] = score[1] > score[0] && !tied(score[1], score[0]) ? 1 : 0;
  for (std::size_t t = n - 1; t > 0; --t) path[t - 1] = backpointer[t][path[t]];
  return path;
}

double path_log_likelihood(std::span<const std::uint8_t> states,
                           std::span<const std::uint8_t> observations, const Hmm& model) {
  if (states.size() != observations.size() || states.empty()) {
    throw DomainError("path_log_likelihood: length mismatch");
  }
  double ll = safe_log(model.initial[states[0]]) +
              safe_log(model.emission[observations[0]][states[0]]);
  for (std::size_t t = 1; t < states.size(); ++t) {
    ll += safe_log(model.transition[states[t - 1]][states[t]]) +
          safe_log(model.emission[observations[t]][states[t]]);
  }
  return ll;
}

}  // namespace thzauth::hmm
