#pragma once

// Transmitter identification among the legitimate nodes: nearest-fingerprint
// (ML) classification and a one-dimensional Gaussian mixture trained by EM.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace thzauth::txid {

/// Nearest fingerprint, ties to the lowest index (0-based).
std::size_t ml_identify(double z_db, std::span<const double> fingerprints);

/// Fingerprints sorted ascending with duplicates merged, and the decision
/// boundaries of the nearest-fingerprint rule between neighbours.
class SortedFingerprints {
 public:
  SortedFingerprints(std::span<const double> fingerprints, double l_min_db, double l_max_db);

  struct Entry {
    double value;
    double lower;  // midpoint to the previous value, or l_min
    double upper;  // midpoint to the next value, or l_max
    std::vector<std::size_t> members;  // original indices, ascending
  };

  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t original_size() const { return original_size_; }

 private:
  std::vector<Entry> entries_;
  std::size_t original_size_;
};

/// Misclassification probability of ml_identify under N(0, sigma^2) noise.
/// Among merged duplicates only the lowest index can be identified.
double analytic_pmc(const SortedFingerprints& sf, double sigma_db, std::span<const double> priors);

struct GmmModel {
  std::vector<double> weights;
  std::vector<double> means;
  std::vector<double> variances;

  std::size_t size() const { return weights.size(); }
  void validate() const;
};

/// Initial variances: the global sample variance, or the variance of each
/// component's equal-count quantile bin.
enum class GmmStart { global_variance, bin_variance };

struct GmmFitOptions {
  double tolerance = 1e-8;  // stop when log-likelihood gain falls below this
  std::size_t max_iterations = 500;
  double variance_floor = 1e-6;
  /// Component responsibility mass (in samples) below which the fit fails.
  double min_component_mass = 1e-8;
  GmmStart start = GmmStart::global_variance;
};

struct GmmFit {
  GmmModel model;
  std::size_t iterations = 0;
  double log_likelihood = 0.0;
  bool converged = false;
  std::vector<double> log_likelihood_trace;  // one entry per evaluated model
};

/// Called after every E-step with the current model and the n-by-Q
/// responsibilities (row-major).
using GmmObserver =
    std::function<void(std::size_t iteration, const GmmModel&, std::span<const double>)>;

/// Deterministic start: means at evenly spaced sample quantiles, uniform
/// weights, variances per `start`.
GmmModel gmm_initialize(std::span<const double> samples, std::size_t components,
                        double variance_floor = 1e-6,
                        GmmStart start = GmmStart::global_variance);

/// Fills `responsibilities` (n-by-Q) and returns the data log-likelihood.
double gmm_e_step(std::span<const double> samples, const GmmModel& model,
                  std::vector<double>& responsibilities);

GmmModel gmm_m_step(std::span<const double> samples, std::span<const double> responsibilities,
                    std::size_t components, const GmmFitOptions& options);

GmmFit gmm_fit(std::span<const double> samples, std::size_t components,
               const GmmFitOptions& options = {}, const GmmObserver& observer = {});

/// Same, starting from a caller-supplied model.
GmmFit gmm_fit(std::span<const double> samples, GmmModel initial,
               const GmmFitOptions& options = {}, const GmmObserver& observer = {});

/// argmax_q w_q N(z; mu_q, var_q), ties to the lowest index.
std::size_t gmm_identify(double z_db, const GmmModel& model);

/// Maps each component to the label most often assigned to it over a
/// labelled training set (components that win no sample map to the label of
/// the nearest training mean).
std::vector<std::size_t> gmm_component_labels(const GmmModel& model,
                                              std::span<const double> samples,
                                              std::span<const std::size_t> labels,
                                              std::size_t label_count);

/// JSON document with weights, means, variances and fit metadata.
std::string gmm_to_json(const GmmFit& fit, std::uint64_t seed);
GmmFit gmm_from_json(const std::string& text, std::uint64_t* seed = nullptr);

}  // namespace thzauth::txid
