#include "thzauth/auth.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "thzauth/error.hpp"
#include "thzauth/numerics.hpp"

namespace thzauth::auth {

using numerics::q_function;

void AuthConfig::validate() const {
  if (!(sigma_db > 0.0 && std::isfinite(sigma_db))) throw DomainError("auth: sigma must be positive");
  if (!(epsilon_db > 0.0 && std::isfinite(epsilon_db))) {
    throw DomainError("auth: epsilon must be positive");
  }
}

AuthDecision authenticate(double z_db, std::span<const double> fingerprints,
                          const AuthConfig& cfg) {
  if (fingerprints.empty()) throw DomainError("authenticate: empty ground truth");
  AuthDecision d;
  d.statistic_db = std::abs(z_db - fingerprints[0]);
  for (std::size_t i = 1; i < fingerprints.size(); ++i) {
    const double t = std::abs(z_db - fingerprints[i]);
    if (t < d.statistic_db) {
      d.statistic_db = t;
      d.best_index = i;
    }
  }
  // A statistic exactly on the threshold is rejected.
  d.hypothesis = d.statistic_db < cfg.epsilon_db ? Hypothesis::h0_legitimate
                                                 : Hypothesis::h1_impersonation;
  return d;
}

double sigma_from_snr_db(double snr_db) { return std::pow(10.0, -snr_db / 20.0); }

double threshold_for_pfa(double pfa, double sigma_db) {
  if (!(pfa > 0.0 && pfa < 1.0)) {
    throw DomainError("threshold_for_pfa: pfa must lie in (0, 1), got " + std::to_string(pfa));
  }
  if (!(sigma_db > 0.0)) throw DomainError("threshold_for_pfa: sigma must be positive");
  return sigma_db * numerics::q_inverse(0.5 * pfa);
}

double analytic_pfa(double epsilon_db, double sigma_db) {
  if (!(sigma_db > 0.0)) throw DomainError("analytic_pfa: sigma must be positive");
  if (!(epsilon_db >= 0.0)) throw DomainError("analytic_pfa: epsilon must be non-negative");
  return 2.0 * q_function(epsilon_db / sigma_db);
}

namespace {

void check_pmd_args(double epsilon_db, double sigma_db) {
  if (!(sigma_db > 0.0)) throw DomainError("pmd: sigma must be positive");
  if (!(epsilon_db >= 0.0)) throw DomainError("pmd: epsilon must be non-negative");
}

double pmd_unchecked(std::span<const double> fingerprints, double eve_loss_db, double epsilon_db,
                     double sigma_db) {
  double total = 0.0;
  for (double l : fingerprints) {
    const double offset = l - eve_loss_db;
    total += q_function((offset - epsilon_db) / sigma_db) -
             q_function((offset + epsilon_db) / sigma_db);
  }
  return std::clamp(total, 0.0, 1.0);
}

}  // namespace

double analytic_pmd(std::span<const double> fingerprints, double eve_loss_db, double epsilon_db,
                    double sigma_db) {
  check_pmd_args(epsilon_db, sigma_db);
  return pmd_unchecked(fingerprints, eve_loss_db, epsilon_db, sigma_db);
}

double analytic_pmd(std::span<const double> fingerprints, std::span<const double> eve_losses_db,
                    double epsilon_db, double sigma_db) {
  check_pmd_args(epsilon_db, sigma_db);
  if (eve_losses_db.empty()) throw DomainError("analytic_pmd: no Eve losses");
  double total = 0.0;
  for (double le : eve_losses_db) total += pmd_unchecked(fingerprints, le, epsilon_db, sigma_db);
  return total / static_cast<double>(eve_losses_db.size());
}

double expected_pmd(std::span<const double> fingerprints, double epsilon_db, double sigma_db,
                    double l_min_db, double l_max_db) {
  check_pmd_args(epsilon_db, sigma_db);
  if (!(l_max_db > l_min_db)) throw DomainError("expected_pmd: need l_max > l_min");
  const double span = l_max_db - l_min_db;

  // The integrand varies on the scale of sigma and has kinks where the clamp
  // engages, so integrate on panels no wider than sigma / 2. Panels farther
  // than 10 sigma + epsilon from every fingerprint contribute below 1e-23.
  const double reach = epsilon_db + 10.0 * sigma_db;
  const double panel = 0.5 * sigma_db;
  const auto n_panels = static_cast<std::size_t>(std::ceil(span / panel));
  const double width = span / static_cast<double>(n_panels);
  const double tol = 1e-8 * width;

  auto integrand = [&](double le) { return pmd_unchecked(fingerprints, le, epsilon_db, sigma_db); };

  double integral = 0.0;
  for (std::size_t p = 0; p < n_panels; ++p) {
    const double a = l_min_db + width * static_cast<double>(p);
    const double b = p + 1 == n_panels ? l_max_db : a + width;
    const bool near = std::any_of(fingerprints.begin(), fingerprints.end(), [&](double l) {
      return l + reach >= a && l - reach <= b;
    });
    if (!near) continue;
    integral += numerics::integrate_adaptive_simpson(integrand, a, b, tol);
  }
  return std::clamp(integral / span, 0.0, 1.0);
}

}  // namespace thzauth::auth
