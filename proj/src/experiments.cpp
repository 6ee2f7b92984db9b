#include <cmath>
#include <limits>
#include <numeric>

#include "parallel.hpp"
#include "thzauth/auth.hpp"
#include "thzauth/error.hpp"
#include "thzauth/harness.hpp"
#include "thzauth/txid.hpp"

namespace thzauth::harness {

namespace {

using numerics::RandomSource;

// Random streams per realization; keep values stable so seeds reproduce.
constexpr std::uint64_t kStreamDeploy = 0;
constexpr std::uint64_t kStreamEveLoss = 1;
constexpr std::uint64_t kStreamSlots = 2;
constexpr std::uint64_t kStreamHmm = 3;
constexpr std::uint64_t kStreamTxid = 4;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Realization {
  scenario::GroundTruth truth;
  std::vector<double> eve_losses;
};

Realization make_realization(const ExperimentConfig& cfg, const scenario::ChannelSetup& setup,
                             std::uint64_t index, std::size_t eves) {
  auto rng = RandomSource::derive(cfg.seed, index, kStreamDeploy);
  const auto dep = scenario::deploy(cfg.alices, eves, cfg.map_side_m, cfg.d_min_m, rng);
  Realization r{scenario::ground_truth(dep, setup), {}};
  if (cfg.eve_loss_mode == EveLossMode::geometric) {
    r.eve_losses = r.truth.eve;
  } else {
    auto eve_rng = RandomSource::derive(cfg.seed, index, kStreamEveLoss);
    r.eve_losses.reserve(eves);
    for (std::size_t j = 0; j < eves; ++j) {
      r.eve_losses.push_back(eve_rng.uniform(r.truth.l_min, r.truth.l_max));
    }
  }
  return r;
}

double analytic_pmd_for(const ExperimentConfig& cfg, const Realization& r, double eps,
                        double sigma) {
  if (r.eve_losses.empty()) return kNaN;
  if (cfg.eve_loss_mode == EveLossMode::uniform_db) {
    return auth::expected_pmd(r.truth.alice, eps, sigma, r.truth.l_min, r.truth.l_max);
  }
  return auth::analytic_pmd(r.truth.alice, r.eve_losses, eps, sigma);
}

struct SlotDraw {
  scenario::SlotTruth truth;
  double noise;  // standard normal, scaled by sigma at use
};

std::vector<SlotDraw> draw_slots(const ExperimentConfig& cfg, std::uint64_t index) {
  auto rng = RandomSource::derive(cfg.seed, index, kStreamSlots);
  const auto occ = scenario::OccupancyModel::uniform(cfg.alices, cfg.eves, cfg.alpha);
  std::vector<SlotDraw> draws(cfg.slots);
  for (auto& d : draws) {
    d.truth = scenario::sample_slot(occ, rng);
    d.noise = rng.normal();
  }
  return draws;
}

double transmitted_loss(const Realization& r, const scenario::SlotTruth& t) {
  return t.kind == scenario::Transmitter::alice ? r.truth.alice[t.index] : r.eve_losses[t.index];
}

struct Counts {
  std::uint64_t alice_slots = 0;
  std::uint64_t false_alarms = 0;
  std::uint64_t misclassified = 0;
  std::uint64_t eve_slots = 0;
  std::uint64_t missed = 0;
  double pmd_analytic = 0.0;
  double pmc_analytic = 0.0;
};

// Evaluates every threshold on the same slot draws; the statistic does not
// depend on the threshold, so it is computed once per slot.
void tally(const Realization& r, const std::vector<SlotDraw>& draws, double sigma,
           const std::vector<double>& thresholds, std::vector<Counts>& out) {
  auth::AuthConfig cfg{sigma, 1.0};
  for (const auto& d : draws) {
    const double z = transmitted_loss(r, d.truth) + sigma * d.noise;
    const auto decision = auth::authenticate(z, r.truth.alice, cfg);
    const bool is_alice = d.truth.kind == scenario::Transmitter::alice;
    for (std::size_t t = 0; t < thresholds.size(); ++t) {
      const bool reject = !(decision.statistic_db < thresholds[t]);
      auto& c = out[t];
      if (is_alice) {
        ++c.alice_slots;
        c.false_alarms += reject ? 1 : 0;
        c.misclassified += decision.best_index != d.truth.index ? 1 : 0;
      } else {
        ++c.eve_slots;
        c.missed += reject ? 0 : 1;
      }
    }
  }
}

struct MeanAccumulator {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::uint64_t n = 0;
  void add(double v) {
    sum += v;
    sum_sq += v * v;
    ++n;
  }
  double mean() const { return n ? sum / static_cast<double>(n) : kNaN; }
  double stderr_value() const {
    if (n < 2) return 0.0;
    const double m = mean();
    const double var = std::max(0.0, (sum_sq - static_cast<double>(n) * m * m) /
                                         static_cast<double>(n - 1));
    return std::sqrt(var / static_cast<double>(n));
  }
};

void add_proportion(ResultTable& table, const std::string& sweep, const std::string& metric,
                    std::uint64_t hits, std::uint64_t trials, bool complement = false) {
  if (trials == 0) {
    table.add(sweep, metric, kNaN, kNaN, 0);
    return;
  }
  double p = static_cast<double>(hits) / static_cast<double>(trials);
  if (complement) p = 1.0 - p;
  table.add(sweep, metric, p, numerics::binomial_stderr(p, trials), trials);
}

void add_mean(ResultTable& table, const std::string& sweep, const std::string& metric,
              const MeanAccumulator& acc, bool complement = false) {
  if (acc.n == 0 || std::isnan(acc.mean())) {
    table.add(sweep, metric, kNaN, kNaN, 0);
    return;
  }
  table.add(sweep, metric, complement ? 1.0 - acc.mean() : acc.mean(), acc.stderr_value(), acc.n);
}

}  // namespace

ResultTable run_error_vs_snr(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto setup = cfg.channel_setup();
  const bool fixed_eps = !cfg.epsilon_db.empty();
  const auto& thr_values = fixed_eps ? cfg.epsilon_db : cfg.pfa;
  const std::size_t n_snr = cfg.snr_db.size();
  const std::size_t n_thr = thr_values.size();

  auto threshold = [&](std::size_t s, std::size_t t) {
    const double sigma = auth::sigma_from_snr_db(cfg.snr_db[s]);
    return fixed_eps ? thr_values[t] : auth::threshold_for_pfa(thr_values[t], sigma);
  };

  // results[realization][snr * n_thr + thr]
  std::vector<std::vector<Counts>> results(cfg.realizations);
  detail::parallel_for(cfg.realizations, cfg.threads, [&](std::size_t r) {
    const auto real = make_realization(cfg, setup, r, cfg.eves);
    const auto draws = draw_slots(cfg, r);
    auto& out = results[r];
    out.assign(n_snr * n_thr, Counts{});
    for (std::size_t s = 0; s < n_snr; ++s) {
      const double sigma = auth::sigma_from_snr_db(cfg.snr_db[s]);
      std::vector<double> eps(n_thr);
      for (std::size_t t = 0; t < n_thr; ++t) eps[t] = threshold(s, t);
      std::vector<Counts> local(n_thr);
      tally(real, draws, sigma, eps, local);
      for (std::size_t t = 0; t < n_thr; ++t) {
        local[t].pmd_analytic = analytic_pmd_for(cfg, real, eps[t], sigma);
        out[s * n_thr + t] = local[t];
      }
    }
  });

  ResultTable table("error-vs-snr");
  for (std::size_t s = 0; s < n_snr; ++s) {
    const double sigma = auth::sigma_from_snr_db(cfg.snr_db[s]);
    for (std::size_t t = 0; t < n_thr; ++t) {
      Counts total;
      MeanAccumulator pmd;
      for (const auto& per : results) {
        const auto& c = per[s * n_thr + t];
        total.alice_slots += c.alice_slots;
        total.false_alarms += c.false_alarms;
        total.eve_slots += c.eve_slots;
        total.missed += c.missed;
        if (!std::isnan(c.pmd_analytic)) pmd.add(c.pmd_analytic);
      }
      const std::string sweep = "snr_db=" + format_value(cfg.snr_db[s]) +
                                (fixed_eps ? ";eps=" : ";pfa=") + format_value(thr_values[t]);
      add_proportion(table, sweep, "pfa_empirical", total.false_alarms, total.alice_slots);
      table.add(sweep, "pfa_analytic", auth::analytic_pfa(threshold(s, t), sigma), 0.0,
                cfg.realizations);
      add_proportion(table, sweep, "pmd_empirical", total.missed, total.eve_slots);
      add_mean(table, sweep, "pmd_analytic", pmd);
    }
  }
  return table;
}

std::vector<ResultTable> run_roc(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.pfa.empty()) throw ConfigError("roc needs a pfa sweep");
  const auto setup = cfg.channel_setup();
  const std::size_t n_snr = cfg.snr_db.size();
  const std::size_t n_pfa = cfg.pfa.size();
  const std::vector<double> priors(cfg.alices, 1.0 / static_cast<double>(cfg.alices));

  std::vector<std::vector<Counts>> results(cfg.realizations);
  detail::parallel_for(cfg.realizations, cfg.threads, [&](std::size_t r) {
    const auto real = make_realization(cfg, setup, r, cfg.eves);
    const auto draws = draw_slots(cfg, r);
    const txid::SortedFingerprints sorted(real.truth.alice, real.truth.l_min, real.truth.l_max);
    auto& out = results[r];
    out.assign(n_snr * n_pfa, Counts{});
    for (std::size_t s = 0; s < n_snr; ++s) {
      const double sigma = auth::sigma_from_snr_db(cfg.snr_db[s]);
      std::vector<double> eps(n_pfa);
      for (std::size_t p = 0; p < n_pfa; ++p) eps[p] = auth::threshold_for_pfa(cfg.pfa[p], sigma);
      std::vector<Counts> local(n_pfa);
      tally(real, draws, sigma, eps, local);
      const double pmc = txid::analytic_pmc(sorted, sigma, priors);
      for (std::size_t p = 0; p < n_pfa; ++p) {
        local[p].pmd_analytic = analytic_pmd_for(cfg, real, eps[p], sigma);
        local[p].pmc_analytic = pmc;
        out[s * n_pfa + p] = local[p];
      }
    }
  });

  std::vector<ResultTable> tables;
  for (std::size_t s = 0; s < n_snr; ++s) {
    ResultTable table("roc_snr_db=" + format_value(cfg.snr_db[s]));
    const double sigma = auth::sigma_from_snr_db(cfg.snr_db[s]);
    for (std::size_t p = 0; p < n_pfa; ++p) {
      Counts total;
      MeanAccumulator pmd, pmc;
      for (const auto& per : results) {
        const auto& c = per[s * n_pfa + p];
        total.alice_slots += c.alice_slots;
        total.false_alarms += c.false_alarms;
        total.misclassified += c.misclassified;
        total.eve_slots += c.eve_slots;
        total.missed += c.missed;
        if (!std::isnan(c.pmd_analytic)) pmd.add(c.pmd_analytic);
        pmc.add(c.pmc_analytic);
      }
      const std::string sweep = "pfa=" + format_value(cfg.pfa[p]);
      add_proportion(table, sweep, "pfa_empirical", total.false_alarms, total.alice_slots);
      table.add(sweep, "pfa_analytic",
                auth::analytic_pfa(auth::threshold_for_pfa(cfg.pfa[p], sigma), sigma), 0.0,
                cfg.realizations);
      add_proportion(table, sweep, "pd_empirical", total.missed, total.eve_slots, true);
      add_mean(table, sweep, "pd_analytic", pmd, true);
      add_proportion(table, sweep, "pmc_empirical", total.misclassified, total.alice_slots);
      add_mean(table, sweep, "pmc_analytic", pmc);
    }
    tables.push_back(std::move(table));
  }
  return tables;
}

ResultTable run_hmm_compare(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.eves == 0) throw ConfigError("hmm-compare needs at least one Eve (n >= 1)");
  const auto setup = cfg.channel_setup();
  const std::size_t n_snr = cfg.snr_db.size();
  const std::size_t block = cfg.hmm_block_length;
  const std::size_t n_blocks = (cfg.hmm_total_slots + block - 1) / block;
  const double eps = cfg.hmm_epsilon_db;

  struct BlockResult {
    std::uint64_t slots = 0;
    std::uint64_t ht_correct = 0;
    std::uint64_t hmm_correct = 0;
    double gain_sum_sq = 0.0;  // sum of squared per-slot (hmm - ht) correctness
    double pfa_analytic = 0.0;
    double pmd_analytic = 0.0;
  };
  std::vector<std::vector<BlockResult>> results(n_blocks);

  detail::parallel_for(n_blocks, cfg.threads, [&](std::size_t b) {
    const std::size_t len = std::min(block, cfg.hmm_total_slots - b * block);
    const auto real = make_realization(cfg, setup, b, cfg.eves);
    auto rng = RandomSource::derive(cfg.seed, b, kStreamHmm);

    // Hidden states from the configured chain, then who transmits and the noise.
    std::vector<std::uint8_t> states(len);
    std::vector<std::size_t> sender(len);
    std::vector<double> noise(len);
    for (std::size_t k = 0; k < len; ++k) {
      const auto& dist = k == 0 ? cfg.hmm_initial : cfg.hmm_transition[states[k - 1]];
      states[k] = rng.uniform() < dist[0] ? 0 : 1;
      sender[k] = states[k] == 0 ? rng.uniform_index(cfg.alices) : rng.uniform_index(cfg.eves);
      noise[k] = rng.normal();
    }

    auto& out = results[b];
    out.resize(n_snr);
    std::vector<std::uint8_t> observed(len);
    for (std::size_t s = 0; s < n_snr; ++s) {
      const double sigma = auth::sigma_from_snr_db(cfg.snr_db[s]);
      const auth::AuthConfig acfg{sigma, eps};
      for (std::size_t k = 0; k < len; ++k) {
        const double loss = states[k] == 0 ? real.truth.alice[sender[k]] : real.eve_losses[sender[k]];
        const auto d = auth::authenticate(loss + sigma * noise[k], real.truth.alice, acfg);
        observed[k] = d.hypothesis == auth::Hypothesis::h1_impersonation ? 1 : 0;
      }
      hmm::Hmm model;
      model.transition = cfg.hmm_transition;
      model.initial = cfg.hmm_initial;
      const double pfa = auth::analytic_pfa(eps, sigma);
      const double pmd = analytic_pmd_for(cfg, real, eps, sigma);
      model.emission = hmm::emission_from_errors(pfa, pmd);
      const auto decoded = hmm::viterbi(observed, model);

      auto& res = out[s];
      res.slots = len;
      res.pfa_analytic = pfa;
      res.pmd_analytic = pmd;
      for (std::size_t k = 0; k < len; ++k) {
        const int ht = observed[k] == states[k] ? 1 : 0;
        const int hm = decoded[k] == states[k] ? 1 : 0;
        res.ht_correct += static_cast<std::uint64_t>(ht);
        res.hmm_correct += static_cast<std::uint64_t>(hm);
        res.gain_sum_sq += static_cast<double>((hm - ht) * (hm - ht));
      }
    }
  });

  ResultTable table("hmm-compare");
  for (std::size_t s = 0; s < n_snr; ++s) {
    std::uint64_t slots = 0, ht = 0, hm = 0;
    double sum_sq = 0.0;
    MeanAccumulator pfa, pmd;
    for (const auto& per : results) {
      slots += per[s].slots;
      ht += per[s].ht_correct;
      hm += per[s].hmm_correct;
      sum_sq += per[s].gain_sum_sq;
      pfa.add(per[s].pfa_analytic);
      pmd.add(per[s].pmd_analytic);
    }
    const std::string sweep = "snr_db=" + format_value(cfg.snr_db[s]);
    add_proportion(table, sweep, "ht_accuracy", ht, slots);
    add_proportion(table, sweep, "hmm_accuracy", hm, slots);
    const double n = static_cast<double>(slots);
    const double gain = (static_cast<double>(hm) - static_cast<double>(ht)) / n;
    const double var = std::max(0.0, sum_sq / n - gain * gain);
    table.add(sweep, "accuracy_gain", gain, std::sqrt(var / n), slots);
    add_mean(table, sweep, "pfa_analytic", pfa);
    add_mean(table, sweep, "pmd_analytic", pmd);
  }
  return table;
}

ResultTable run_txid(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.sigma2_db2.empty()) throw ConfigError("txid needs a sigma2_db2 sweep");
  const auto setup = cfg.channel_setup();
  const std::size_t m = cfg.alices;
  const std::size_t n_var = cfg.sigma2_db2.size();
  const std::vector<double> priors(m, 1.0 / static_cast<double>(m));

  struct Errors {
    std::uint64_t tests = 0;
    std::uint64_t ml = 0;
    std::uint64_t ml_noisy = 0;
    std::uint64_t gmm = 0;
    double pmc_analytic = 0.0;
  };
  std::vector<std::vector<Errors>> results(cfg.txid_realizations);
  txid::GmmFitOptions gmm_options;
  gmm_options.start = txid::GmmStart::bin_variance;

  detail::parallel_for(cfg.txid_realizations, cfg.threads, [&](std::size_t r) {
    const auto real = make_realization(cfg, setup, r, 0);
    const auto& truth = real.truth.alice;
    const txid::SortedFingerprints sorted(truth, real.truth.l_min, real.truth.l_max);

    // Standard-normal draws shared by every point of the variance sweep.
    auto rng = RandomSource::derive(cfg.seed, r, kStreamTxid);
    std::vector<double> truth_noise(m);
    for (auto& v : truth_noise) v = rng.normal();
    std::vector<std::size_t> train_label(cfg.txid_train);
    std::vector<double> train_noise(cfg.txid_train);
    for (std::size_t i = 0; i < cfg.txid_train; ++i) {
      train_label[i] = rng.uniform_index(m);
      train_noise[i] = rng.normal();
    }
    std::vector<std::size_t> test_label(cfg.txid_test);
    std::vector<double> test_noise(cfg.txid_test);
    for (std::size_t i = 0; i < cfg.txid_test; ++i) {
      test_label[i] = rng.uniform_index(m);
      test_noise[i] = rng.normal();
    }

    auto& out = results[r];
    out.resize(n_var);
    std::vector<double> train(cfg.txid_train);
    std::vector<double> noisy_truth(m);
    for (std::size_t v = 0; v < n_var; ++v) {
      const double sigma = std::sqrt(cfg.sigma2_db2[v]);
      for (std::size_t i = 0; i < m; ++i) noisy_truth[i] = truth[i] + sigma * truth_noise[i];
      for (std::size_t i = 0; i < cfg.txid_train; ++i) {
        train[i] = truth[train_label[i]] + sigma * train_noise[i];
      }
      const auto fit = txid::gmm_fit(train, m, gmm_options);
      const auto labels = txid::gmm_component_labels(fit.model, train, train_label, m);

      auto& e = out[v];
      e.tests = cfg.txid_test;
      e.pmc_analytic = txid::analytic_pmc(sorted, sigma, priors);
      for (std::size_t i = 0; i < cfg.txid_test; ++i) {
        const double z = truth[test_label[i]] + sigma * test_noise[i];
        e.ml += txid::ml_identify(z, truth) != test_label[i] ? 1 : 0;
        e.ml_noisy += txid::ml_identify(z, noisy_truth) != test_label[i] ? 1 : 0;
        e.gmm += labels[txid::gmm_identify(z, fit.model)] != test_label[i] ? 1 : 0;
      }
    }
  });

  ResultTable table("txid");
  for (std::size_t v = 0; v < n_var; ++v) {
    Errors total;
    MeanAccumulator pmc;
    for (const auto& per : results) {
      total.tests += per[v].tests;
      total.ml += per[v].ml;
      total.ml_noisy += per[v].ml_noisy;
      total.gmm += per[v].gmm;
      pmc.add(per[v].pmc_analytic);
    }
    const std::string sweep = "sigma2=" + format_value(cfg.sigma2_db2[v]);
    add_proportion(table, sweep, "noiseless_pmc_ml", total.ml, total.tests);
    add_proportion(table, sweep, "noiseless_pmc_gmm", total.gmm, total.tests);
    add_proportion(table, sweep, "noisy_pmc_ml", total.ml_noisy, total.tests);
    add_proportion(table, sweep, "noisy_pmc_gmm", total.gmm, total.tests);
    add_mean(table, sweep, "pmc_analytic", pmc);
  }
  return table;
}

std::vector<PathLossPoint> path_loss_grid(const channel::AbsorptionModel& model,
                                          const channel::Medium& medium,
                                          const std::vector<double>& frequencies_hz,
                                          const std::vector<double>& distances_m) {
  std::vector<PathLossPoint> points;
  points.reserve(frequencies_hz.size() * distances_m.size());
  for (double f : frequencies_hz) {
    const double k = channel::absorption_coefficient(model, medium, f);
    for (double d : distances_m) {
      const double spreading = channel::spreading_loss_db(f, d);
      const double absorption = channel::absorption_loss_db(k, d);
      points.push_back({f, d, k, spreading, absorption, spreading + absorption});
    }
  }
  return points;
}

std::string path_loss_csv(const std::vector<PathLossPoint>& points) {
  std::string out = "frequency_hz,distance_m,k_per_m,spreading_db,absorption_db,path_loss_db\n";
  char buf[256];
  for (const auto& p : points) {
    std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%.10g,%.10g,%.10g\n", p.frequency_hz,
                  p.distance_m, p.k_per_m, p.spreading_db, p.absorption_db, p.total_db);
    out += buf;
  }
  return out;
}

}  // namespace thzauth::harness
