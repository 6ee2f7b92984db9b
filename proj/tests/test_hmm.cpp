#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "thzauth/error.hpp"
#include "thzauth/hmm.hpp"
#include "thzauth/numerics.hpp"

using namespace thzauth;
using namespace thzauth::hmm;
using numerics::RandomSource;

namespace {

bool tied(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

// Exhaustive search over all 2^n state paths. Among equally likely paths the
// stated rule applies: prefer ending in s0, then, walking backwards, prefer
// the state that was chosen for the next slot.
std::vector<std::uint8_t> brute_force(const std::vector<std::uint8_t>& obs, const Hmm& h) {
  const std::size_t n = obs.size();
  std::vector<std::vector<std::uint8_t>> paths;
  std::vector<double> scores;
  for (std::uint64_t code = 0; code < (1ull << n); ++code) {
    std::vector<std::uint8_t> path(n);
    for (std::size_t t = 0; t < n; ++t) path[t] = (code >> (n - 1 - t)) & 1u;
    double ll = std::log(h.initial[path[0]]) + std::log(h.emission[obs[0]][path[0]]);
    for (std::size_t t = 1; t < n; ++t) {
      ll += std::log(h.transition[path[t - 1]][path[t]]) + std::log(h.emission[obs[t]][path[t]]);
    }
    paths.push_back(path);
    scores.push_back(ll);
  }
  const double best = *std::max_element(scores.begin(), scores.end());
  std::vector<std::vector<std::uint8_t>> optimal;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    if (tied(scores[i], best)) optimal.push_back(paths[i]);
  }
  std::uint8_t want = 0;
  for (std::size_t t = n; t-- > 0;) {
    const bool any = std::any_of(optimal.begin(), optimal.end(),
                                 [&](const auto& p) { return p[t] == want; });
    if (!any) want = 1 - want;
    std::erase_if(optimal, [&](const auto& p) { return p[t] != want; });
  }
  return optimal.front();
}

Hmm random_hmm(RandomSource& rng) {
  Hmm h;
  for (auto& row : h.transition) {
    row[0] = rng.uniform(0.02, 0.98);
    row[1] = 1.0 - row[0];
  }
  for (int j = 0; j < 2; ++j) {
    h.emission[0][j] = rng.uniform(0.02, 0.98);
    h.emission[1][j] = 1.0 - h.emission[0][j];
  }
  h.initial[0] = rng.uniform(0.02, 0.98);
  h.initial[1] = 1.0 - h.initial[0];
  return h;
}

std::vector<std::uint8_t> sample_states(const Hmm& h, std::size_t n, RandomSource& rng) {
  std::vector<std::uint8_t> s(n);
  s[0] = rng.uniform() < h.initial[1] ? 1 : 0;
  for (std::size_t t = 1; t < n; ++t) s[t] = rng.uniform() < h.transition[s[t - 1]][1] ? 1 : 0;
  return s;
}

std::vector<std::uint8_t> emit(const Hmm& h, const std::vector<std::uint8_t>& s, RandomSource& rng) {
  std::vector<std::uint8_t> x(s.size());
  for (std::size_t t = 0; t < s.size(); ++t) x[t] = rng.uniform() < h.emission[1][s[t]] ? 1 : 0;
  return x;
}

double accuracy(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
  std::size_t same = 0;
  for (std::size_t i = 0; i < a.size(); ++i) same += a[i] == b[i];
  return same / double(a.size());
}

}  // namespace

TEST_CASE("emission matrix from error rates") {
  const auto id = emission_from_errors(0.0, 0.0);
  CHECK(id[0][0] == 1.0);
  CHECK(id[0][1] == 0.0);
  CHECK(id[1][0] == 0.0);
  CHECK(id[1][1] == 1.0);
  const auto r = emission_from_errors(0.2, 0.1);
  CHECK(r[0][0] == doctest::Approx(0.8));
  CHECK(r[0][1] == doctest::Approx(0.1));
  CHECK(r[1][0] == doctest::Approx(0.2));
  CHECK(r[1][1] == doctest::Approx(0.9));
  for (double pfa : {0.0, 0.3, 1.0}) {
    for (double pmd : {0.0, 0.7, 1.0}) {
      const auto m = emission_from_errors(pfa, pmd);
      CHECK(m[0][0] + m[1][0] == doctest::Approx(1.0));
      CHECK(m[0][1] + m[1][1] == doctest::Approx(1.0));
    }
  }
  CHECK_THROWS_AS(emission_from_errors(-0.1, 0.0), DomainError);
  CHECK_THROWS_AS(emission_from_errors(0.0, 1.1), DomainError);
}

TEST_CASE("model validation") {
  Hmm h;
  CHECK_NOTHROW(h.validate());
  h.transition[0] = {0.5, 0.6};
  CHECK_THROWS_AS(h.validate(), DomainError);
  h = Hmm{};
  h.initial = {0.3, 0.3};
  CHECK_THROWS_AS(h.validate(), DomainError);
  h = Hmm{};
  h.emission = {{{0.5, 0.2}, {0.4, 0.8}}};
  CHECK_THROWS_AS(h.validate(), DomainError);
}

TEST_CASE("predict") {
  const Distribution2 x0{0.3, 0.7};
  const Matrix2 p{{{0.9, 0.1}, {0.4, 0.6}}};
  const auto same = predict(x0, p, 0);
  CHECK(same[0] == x0[0]);
  CHECK(same[1] == x0[1]);

  const Matrix2 uniform{{{0.5, 0.5}, {0.5, 0.5}}};
  const auto mixed = predict({1.0, 0.0}, uniform, 1);
  CHECK(mixed[0] == doctest::Approx(0.5));
  CHECK(mixed[1] == doctest::Approx(0.5));

  const Matrix2 identity{{{1.0, 0.0}, {0.0, 1.0}}};
  const auto held = predict(x0, identity, 1000);
  CHECK(held[0] == doctest::Approx(0.3));

  const auto one = predict(x0, p, 1);
  CHECK(one[0] == doctest::Approx(0.3 * 0.9 + 0.7 * 0.4));
  CHECK(one[1] == doctest::Approx(0.3 * 0.1 + 0.7 * 0.6));
  // Stationary distribution of p is (0.8, 0.2).
  const auto far = predict(x0, p, 500);
  CHECK(far[0] == doctest::Approx(0.8));
}

TEST_CASE("viterbi examples") {
  Hmm noiseless;
  noiseless.initial = {0.5, 0.5};
  const std::vector<std::uint8_t> obs{1, 0, 0, 1, 1, 0, 1};
  CHECK(viterbi(obs, noiseless) == obs);

  Hmm favour0;
  favour0.emission = emission_from_errors(0.2, 0.3);
  const std::vector<std::uint8_t> zeros(50, 0);
  CHECK(viterbi(zeros, favour0) == zeros);

  RandomSource rng(1);
  const auto h = random_hmm(rng);
  const std::vector<std::uint8_t> three{1, 0, 1};
  CHECK(viterbi(three, h) == brute_force(three, h));
}

TEST_CASE("viterbi tie rules") {
  // Everything uniform: every path is equally likely, so the all-s0 path wins.
  Hmm flat;
  flat.initial = {0.5, 0.5};
  flat.emission = {{{0.5, 0.5}, {0.5, 0.5}}};
  const std::vector<std::uint8_t> obs{1, 1, 0, 1};
  CHECK(viterbi(obs, flat) == std::vector<std::uint8_t>(4, 0));
}

TEST_CASE("viterbi rejects impossible and malformed input") {
  Hmm h;  // starts in s0 with noiseless emissions
  const std::vector<std::uint8_t> first_one{1, 0};
  CHECK_THROWS_AS(viterbi(first_one, h), NumericalError);
  CHECK_THROWS_AS(viterbi(std::vector<std::uint8_t>{}, h), DomainError);
  CHECK_THROWS_AS(viterbi(std::vector<std::uint8_t>{0, 2}, h), DomainError);
}

TEST_CASE("viterbi equals brute force on random models") {
  RandomSource rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const auto h = random_hmm(rng);
    const std::size_t n = 1 + rng.uniform_index(12);
    std::vector<std::uint8_t> obs(n);
    for (auto& o : obs) o = static_cast<std::uint8_t>(rng.uniform_index(2));
    CHECK(viterbi(obs, h) == brute_force(obs, h));
  }
}

TEST_CASE("path log-likelihood") {
  RandomSource rng(3);
  const auto h = random_hmm(rng);
  const std::vector<std::uint8_t> s{0, 1, 1}, x{1, 1, 0};
  const double want = std::log(h.initial[0] * h.emission[1][0] * h.transition[0][1] *
                               h.emission[1][1] * h.transition[1][1] * h.emission[0][1]);
  CHECK(path_log_likelihood(s, x, h) == doctest::Approx(want).epsilon(1e-12));
  Hmm strict;
  CHECK(path_log_likelihood(std::vector<std::uint8_t>{1}, std::vector<std::uint8_t>{1}, strict) ==
        -std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(path_log_likelihood(s, std::vector<std::uint8_t>{1}, h), DomainError);
}

TEST_CASE("long sequences do not underflow") {
  RandomSource rng(5);
  Hmm h;
  h.transition = {{{0.9, 0.1}, {0.2, 0.8}}};
  h.emission = emission_from_errors(0.3, 0.25);
  const auto states = sample_states(h, 1'000'000, rng);
  const auto obs = emit(h, states, rng);
  const auto path = viterbi(obs, h);
  REQUIRE(path.size() == obs.size());
  const double ll = path_log_likelihood(path, obs, h);
  CHECK(std::isfinite(ll));
  CHECK(ll >= path_log_likelihood(states, obs, h));
}

TEST_CASE("viterbi beats raw observations on a sticky chain") {
  RandomSource rng(9);
  Hmm h;
  h.transition = {{{0.95, 0.05}, {0.05, 0.95}}};
  h.initial = {0.5, 0.5};
  h.emission = emission_from_errors(0.3, 0.3);
  const auto states = sample_states(h, 100000, rng);
  const auto obs = emit(h, states, rng);
  const double raw = accuracy(obs, states);
  const double decoded = accuracy(viterbi(obs, h), states);
  CHECK(decoded > raw + 0.1);
}

TEST_CASE("viterbi is no worse than raw observations with uniform transitions") {
  RandomSource rng(10);
  Hmm h;
  h.initial = {0.5, 0.5};
  h.emission = emission_from_errors(0.2, 0.35);
  const auto states = sample_states(h, 100000, rng);
  const auto obs = emit(h, states, rng);
  const double raw = accuracy(obs, states);
  const double decoded = accuracy(viterbi(obs, h), states);
  CHECK(decoded >= raw - 3.0 * std::sqrt(raw * (1 - raw) / 100000));
}
