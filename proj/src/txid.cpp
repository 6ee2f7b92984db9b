#include "thzauth/txid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "thzauth/error.hpp"
#include "thzauth/numerics.hpp"

namespace thzauth::txid {

std::size_t ml_identify(double z_db, std::span<const double> fingerprints) {
  if (fingerprints.empty()) throw DomainError("ml_identify: empty fingerprint set");
  std::size_t best = 0;
  double best_dist = std::abs(z_db - fingerprints[0]);
  for (std::size_t i = 1; i < fingerprints.size(); ++i) {
    const double d = std::abs(z_db - fingerprints[i]);
    if (d < best_dist) {
      best_dist = d;
      best = i;
    }
  }
  return best;
}

SortedFingerprints::SortedFingerprints(std::span<const double> fingerprints, double l_min_db,
                                       double l_max_db)
    : original_size_(fingerprints.size()) {
  if (fingerprints.empty()) throw DomainError("SortedFingerprints: empty fingerprint set");
  if (!(l_max_db > l_min_db)) throw DomainError("SortedFingerprints: need l_max > l_min");

  std::vector<std::size_t> order(fingerprints.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return fingerprints[a] < fingerprints[b];
  });
  for (std::size_t idx : order) {
    if (!entries_.empty() && entries_.back().value == fingerprints[idx]) {
      entries_.back().members.push_back(idx);
    } else {
      entries_.push_back({fingerprints[idx], 0.0, 0.0, {idx}});
    }
  }
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    auto& e = entries_[i];
    e.lower = i == 0 ? l_min_db : 0.5 * (entries_[i - 1].value + e.value);
    e.upper = i + 1 == entries_.size() ? l_max_db : 0.5 * (e.value + entries_[i + 1].value);
  }
}

double analytic_pmc(const SortedFingerprints& sf, double sigma_db, std::span<const double> priors) {
  if (!(sigma_db > 0.0)) throw DomainError("analytic_pmc: sigma must be positive");
  if (priors.size() != sf.original_size()) {
    throw DomainError("analytic_pmc: one prior per fingerprint required");
  }
  double correct = 0.0;
  for (const auto& e : sf.entries()) {
    const double p_region = numerics::q_function((e.lower - e.value) / sigma_db) -
                            numerics::q_function((e.upper - e.value) / sigma_db);
    correct += priors[e.members.front()] * p_region;
  }
  return std::clamp(1.0 - correct, 0.0, 1.0);
}

void GmmModel::validate() const {
  if (weights.empty() || weights.size() != means.size() || weights.size() != variances.size()) {
    throw DomainError("gmm: inconsistent component arrays");
  }
  double total = 0.0;
  for (std::size_t q = 0; q < size(); ++q) {
    if (!(weights[q] >= 0.0)) throw DomainError("gmm: negative weight");
    if (!(variances[q] > 0.0)) throw DomainError("gmm: non-positive variance");
    if (!std::isfinite(means[q])) throw DomainError("gmm: non-finite mean");
    total += weights[q];
  }
  if (std::abs(total - 1.0) > 1e-9) throw DomainError("gmm: weights must sum to 1");
}

GmmModel gmm_initialize(std::span<const double> samples, std::size_t components,
                        double variance_floor, GmmStart start) {
  if (components < 1) throw DomainError("gmm: need at least one component");
  if (samples.size() < components) throw DomainError("gmm: fewer samples than components");

  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  const double mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / n;
  double var = 0.0;
  for (double x : sorted) var += (x - mean) * (x - mean);
  var = std::max(var / n, variance_floor);

  GmmModel model;
  model.weights.assign(components, 1.0 / static_cast<double>(components));
  model.variances.assign(components, var);
  for (std::size_t q = 0; q < components; ++q) {
    // Quantile level (q + 1/2) / Q, linear interpolation between order statistics.
    const double level = (static_cast<double>(q) + 0.5) / static_cast<double>(components);
    const double pos = level * (n - 1.0);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double t = pos - static_cast<double>(lo);
    model.means.push_back(sorted[lo] + t * (sorted[hi] - sorted[lo]));
  }
  if (start == GmmStart::bin_variance) {
    for (std::size_t q = 0; q < components; ++q) {
      const std::size_t b = q * sorted.size() / components;
      const std::size_t e = (q + 1) * sorted.size() / components;
      const double cnt = static_cast<double>(e - b);
      const double mu = std::accumulate(sorted.begin() + b, sorted.begin() + e, 0.0) / cnt;
      double v = 0.0;
      for (std::size_t i = b; i < e; ++i) v += (sorted[i] - mu) * (sorted[i] - mu);
      model.variances[q] = std::max(v / cnt, variance_floor);
    }
  }
  return model;
}

double gmm_e_step(std::span<const double> samples, const GmmModel& model,
                  std::vector<double>& responsibilities) {
  const std::size_t q_count = model.size();
  responsibilities.resize(samples.size() * q_count);
  std::vector<double> log_weights(q_count);
  for (std::size_t q = 0; q < q_count; ++q) {
    log_weights[q] = model.weights[q] > 0.0 ? std::log(model.weights[q])
                                            : -std::numeric_limits<double>::infinity();
  }
  double log_likelihood = 0.0;
  for (std::size_t m = 0; m < samples.size(); ++m) {
    double* row = responsibilities.data() + m * q_count;
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t q = 0; q < q_count; ++q) {
      row[q] = log_weights[q] +
               numerics::log_gaussian_pdf(samples[m], model.means[q], model.variances[q]);
      peak = std::max(peak, row[q]);
    }
    double sum = 0.0;
    for (std::size_t q = 0; q < q_count; ++q) {
      row[q] = std::exp(row[q] - peak);
      sum += row[q];
    }
    for (std::size_t q = 0; q < q_count; ++q) row[q] /= sum;
    log_likelihood += peak + std::log(sum);
  }
  return log_likelihood;
}

GmmModel gmm_m_step(std::span<const double> samples, std::span<const double> responsibilities,
                    std::size_t components, const GmmFitOptions& options) {
  const std::size_t n = samples.size();
  std::vector<double> mass(components, 0.0);
  std::vector<double> weighted_sum(components, 0.0);
  for (std::size_t m = 0; m < n; ++m) {
    for (std::size_t q = 0; q < components; ++q) {
      const double r = responsibilities[m * components + q];
      mass[q] += r;
      weighted_sum[q] += r * samples[m];
    }
  }
  GmmModel model;
  model.weights.resize(components);
  model.means.resize(components);
  model.variances.assign(components, 0.0);
  for (std::size_t q = 0; q < components; ++q) {
    if (!(mass[q] >= options.min_component_mass)) {
      throw NumericalError("gmm: component " + std::to_string(q) + " lost its responsibility mass");
    }
    model.weights[q] = mass[q] / static_cast<double>(n);
    model.means[q] = weighted_sum[q] / mass[q];
  }
  // Variances about the updated means; this is what makes each EM step
  // non-decreasing in likelihood.
  for (std::size_t m = 0; m < n; ++m) {
    for (std::size_t q = 0; q < components; ++q) {
      const double dev = samples[m] - model.means[q];
      model.variances[q] += responsibilities[m * components + q] * dev * dev;
    }
  }
  for (std::size_t q = 0; q < components; ++q) {
    model.variances[q] = std::max(model.variances[q] / mass[q], options.variance_floor);
  }
  const double total = std::accumulate(model.weights.begin(), model.weights.end(), 0.0);
  for (double& w : model.weights) w /= total;
  return model;
}

GmmFit gmm_fit(std::span<const double> samples, std::size_t components,
               const GmmFitOptions& options, const GmmObserver& observer) {
  if (components < 1) throw DomainError("gmm_fit: need at least one component");
  if (samples.size() < components) throw DomainError("gmm_fit: fewer samples than components");
  return gmm_fit(samples, gmm_initialize(samples, components, options.variance_floor, options.start), options,
                 observer);
}

GmmFit gmm_fit(std::span<const double> samples, GmmModel initial, const GmmFitOptions& options,
               const GmmObserver& observer) {
  initial.validate();
  const std::size_t components = initial.size();
  if (samples.size() < components) throw DomainError("gmm_fit: fewer samples than components");

  GmmFit fit;
  fit.model = std::move(initial);
  std::vector<double> resp;
  double ll = gmm_e_step(samples, fit.model, resp);
  fit.log_likelihood_trace.push_back(ll);
  if (observer) observer(0, fit.model, resp);

  while (fit.iterations < options.max_iterations) {
    GmmModel next = gmm_m_step(samples, resp, components, options);
    std::vector<double> next_resp;
    const double next_ll = gmm_e_step(samples, next, next_resp);
    ++fit.iterations;
    fit.model = std::move(next);
    resp = std::move(next_resp);
    fit.log_likelihood_trace.push_back(next_ll);
    if (observer) observer(fit.iterations, fit.model, resp);
    const double gain = next_ll - ll;
    ll = next_ll;
    if (gain < options.tolerance) {
      fit.converged = true;
      break;
    }
  }
  if (!std::isfinite(ll)) throw NumericalError("gmm_fit: log-likelihood is not finite");
  fit.log_likelihood = ll;
  return fit;
}

std::size_t gmm_identify(double z_db, const GmmModel& model) {
  std::size_t best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t q = 0; q < model.size(); ++q) {
    if (!(model.weights[q] > 0.0)) continue;
    const double score = std::log(model.weights[q]) +
                         numerics::log_gaussian_pdf(z_db, model.means[q], model.variances[q]);
    if (score > best_score) {
      best_score = score;
      best = q;
    }
  }
  return best;
}

std::vector<std::size_t> gmm_component_labels(const GmmModel& model,
                                              std::span<const double> samples,
                                              std::span<const std::size_t> labels,
                                              std::size_t label_count) {
  if (samples.size() != labels.size()) throw DomainError("gmm labels: length mismatch");
  if (label_count == 0) throw DomainError("gmm labels: no labels");
  const std::size_t q_count = model.size();
  std::vector<std::vector<std::size_t>> votes(q_count, std::vector<std::size_t>(label_count, 0));
  std::vector<double> label_sum(label_count, 0.0);
  std::vector<std::size_t> label_n(label_count, 0);
  for (std::size_t m = 0; m < samples.size(); ++m) {
    if (labels[m] >= label_count) throw DomainError("gmm labels: label out of range");
    ++votes[gmm_identify(samples[m], model)][labels[m]];
    label_sum[labels[m]] += samples[m];
    ++label_n[labels[m]];
  }
  std::vector<std::size_t> mapping(q_count, 0);
  for (std::size_t q = 0; q < q_count; ++q) {
    const auto& v = votes[q];
    const auto top = std::max_element(v.begin(), v.end());
    if (*top > 0) {
      mapping[q] = static_cast<std::size_t>(top - v.begin());
      continue;
    }
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t l = 0; l < label_count; ++l) {
      if (label_n[l] == 0) continue;
      const double d = std::abs(label_sum[l] / static_cast<double>(label_n[l]) - model.means[q]);
      if (d < best) {
        best = d;
        mapping[q] = l;
      }
    }
  }
  return mapping;
}

}  // namespace thzauth::txid
