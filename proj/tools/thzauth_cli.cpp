// Command-line front end for the THz path-loss authentication toolkit.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "thzauth/error.hpp"
#include "thzauth/harness.hpp"

namespace {

namespace fs = std::filesystem;
using thzauth::harness::ExperimentConfig;
using thzauth::harness::ResultTable;

enum ExitCode { kOk = 0, kConfigError = 2, kIoError = 3, kNumericalError = 4 };

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::vector<double> snr_db;
  std::vector<double> pfa;
  std::optional<std::string> eve_loss_mode;
  std::optional<std::size_t> threads;
  bool full = false;
  std::string out;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "Experiment configuration (JSON)");
  cmd->add_option("--seed", o.seed, "Override the random seed");
  cmd->add_option("--snr-db", o.snr_db, "Override the SNR sweep (dB)")->delimiter(',');
  cmd->add_option("--pfa", o.pfa, "Override the false-alarm sweep")->delimiter(',');
  cmd->add_option("--eve-loss-mode", o.eve_loss_mode, "geometric | uniform-in-db");
  cmd->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
  cmd->add_flag("--full", o.full, "Paper-scale realization count (1e5)");
  cmd->add_option("--out", o.out, "Output CSV path (default: stdout)");
}

ExperimentConfig build_config(const CommonOptions& o) {
  ExperimentConfig cfg = o.config.empty() ? ExperimentConfig{} : ExperimentConfig::load(o.config);
  if (o.seed) cfg.seed = *o.seed;
  if (!o.snr_db.empty()) cfg.snr_db = o.snr_db;
  if (!o.pfa.empty()) {
    cfg.pfa = o.pfa;
    cfg.epsilon_db.clear();
  }
  if (o.eve_loss_mode) cfg.eve_loss_mode = thzauth::harness::parse_eve_loss_mode(*o.eve_loss_mode);
  if (o.threads) cfg.threads = *o.threads;
  if (o.full) cfg.apply_full_scale();
  if (!o.out.empty()) cfg.output = o.out;
  cfg.validate();
  return cfg;
}

void emit(const std::vector<ResultTable>& tables, const fs::path& out) {
  if (out.empty()) {
    for (const auto& t : tables) {
      if (tables.size() > 1) std::cout << "# " << t.name() << '\n';
      std::cout << t.to_csv();
    }
    return;
  }
  if (tables.size() == 1) {
    tables.front().write_csv(out);
    return;
  }
  for (const auto& t : tables) {
    fs::path p = out.parent_path() / (out.stem().string() + "_" + t.name() + out.extension().string());
    t.write_csv(p);
  }
}

int run_pathloss(const CommonOptions& o, const std::vector<double>& freqs,
                 const std::vector<double>& dists, const std::string& table,
                 const std::string& catalog, std::optional<double> temperature,
                 std::optional<double> pressure) {
  ExperimentConfig cfg = o.config.empty() ? ExperimentConfig{} : ExperimentConfig::load(o.config);
  using Kind = thzauth::harness::AbsorptionSource::Kind;
  if (!table.empty()) cfg.absorption = {Kind::table, 0.0, table};
  if (!catalog.empty()) cfg.absorption = {Kind::catalog, 0.0, catalog};
  if (temperature) cfg.medium.temperature_k = *temperature;
  if (pressure) cfg.medium.pressure_atm = *pressure;
  const auto model = thzauth::harness::load_absorption(cfg.absorption);
  const auto f = freqs.empty() ? std::vector<double>{cfg.frequency_hz} : freqs;
  const auto points = thzauth::harness::path_loss_grid(model, cfg.medium, f, dists);
  const auto csv = thzauth::harness::path_loss_csv(points);
  const fs::path out = o.out.empty() ? cfg.output : fs::path(o.out);
  if (out.empty()) {
    std::cout << csv;
  } else {
    std::ofstream file(out, std::ios::binary);
    if (!file) throw thzauth::IoError("cannot write " + out.string());
    file << csv;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"THz path-loss physical-layer authentication experiments"};
  app.require_subcommand(1);

  CommonOptions opts;

  auto* pathloss = app.add_subcommand("pathloss", "Path loss over a frequency/distance grid");
  std::vector<double> freqs, dists;
  std::string table, catalog;
  std::optional<double> temperature, pressure;
  pathloss->add_option("--config", opts.config, "Configuration supplying absorption input");
  pathloss->add_option("--f-hz", freqs, "Frequencies (Hz)")->delimiter(',');
  pathloss->add_option("--d-m", dists, "Distances (m)")->delimiter(',')->required();
  pathloss->add_option("--table", table, "Absorption table CSV");
  pathloss->add_option("--catalog", catalog, "Line catalog CSV");
  pathloss->add_option("--temperature-k", temperature, "Ambient temperature (K)");
  pathloss->add_option("--pressure-atm", pressure, "Ambient pressure (atm)");
  pathloss->add_option("--out", opts.out, "Output CSV path (default: stdout)");

  auto* error_vs_snr = app.add_subcommand("error-vs-snr", "False alarm / missed detection vs SNR");
  auto* roc = app.add_subcommand("roc", "Detection and misclassification vs false alarm");
  auto* hmm_compare = app.add_subcommand("hmm-compare", "Hypothesis test vs Viterbi accuracy");
  auto* txid = app.add_subcommand("txid", "ML vs GMM transmitter identification");
  for (auto* cmd : {error_vs_snr, roc, hmm_compare, txid}) add_common(cmd, opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (pathloss->parsed()) {
      return run_pathloss(opts, freqs, dists, table, catalog, temperature, pressure);
    }
    const auto cfg = build_config(opts);
    std::vector<ResultTable> tables;
    if (error_vs_snr->parsed()) {
      tables.push_back(thzauth::harness::run_error_vs_snr(cfg));
    } else if (roc->parsed()) {
      tables = thzauth::harness::run_roc(cfg);
    } else if (hmm_compare->parsed()) {
      tables.push_back(thzauth::harness::run_hmm_compare(cfg));
    } else if (txid->parsed()) {
      tables.push_back(thzauth::harness::run_txid(cfg));
    }
    emit(tables, cfg.output);
  } catch (const thzauth::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const thzauth::DomainError& e) {
    std::cerr << "invalid parameter: " << e.what() << '\n';
    return kConfigError;
  } catch (const thzauth::IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kIoError;
  } catch (const thzauth::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericalError;
  }
  return kOk;
}
