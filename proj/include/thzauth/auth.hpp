#pragma once

// Two-step authentication: nearest-fingerprint search followed by a
// threshold test on the residual, plus closed-form error probabilities.

#include <cstddef>
#include <span>

namespace thzauth::auth {

struct AuthConfig {
  double sigma_db = 1.0;    // measurement noise std-dev
  double epsilon_db = 1.0;  // decision threshold
  void validate() const;
};

enum class Hypothesis { h0_legitimate, h1_impersonation };

struct AuthDecision {
  Hypothesis hypothesis = Hypothesis::h0_legitimate;
  std::size_t best_index = 0;  // 0-based nearest fingerprint
  double statistic_db = 0.0;   // min_i |z - l_i|
};

/// H1 iff min_i |z - l_i| >= epsilon. Ties on the index go to the lowest.
AuthDecision authenticate(double z_db, std::span<const double> fingerprints,
                          const AuthConfig& cfg);

/// epsilon = sigma * Qinv(pfa / 2).
double threshold_for_pfa(double pfa, double sigma_db);

/// 2 Q(epsilon / sigma).
double analytic_pfa(double epsilon_db, double sigma_db);

/// Probability that an Eve with path loss `eve_loss_db` passes the test:
/// sum_i [Q((l_i - L_E - eps)/sigma) - Q((l_i - L_E + eps)/sigma)], clamped to [0, 1].
double analytic_pmd(std::span<const double> fingerprints, double eve_loss_db,
                    double epsilon_db, double sigma_db);

/// Average of the single-Eve value over several Eves, each weighted 1/N.
double analytic_pmd(std::span<const double> fingerprints, std::span<const double> eve_losses_db,
                    double epsilon_db, double sigma_db);

/// Mean of analytic_pmd for an Eve loss uniform on [l_min, l_max].
double expected_pmd(std::span<const double> fingerprints, double epsilon_db, double sigma_db,
                    double l_min_db, double l_max_db);

/// sigma = 10^(-snr_db / 20), with SNR = 1 / sigma^2.
double sigma_from_snr_db(double snr_db);

}  // namespace thzauth::auth
