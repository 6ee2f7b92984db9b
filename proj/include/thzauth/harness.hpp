#pragma once

// Monte Carlo experiment driver: configuration, result tables and the
// experiments behind the command-line tool.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "thzauth/hmm.hpp"
#include "thzauth/scenario.hpp"

namespace thzauth::harness {

/// How Eve path losses are produced in a realization.
enum class EveLossMode {
  geometric,   // from the deployed Eve positions
  uniform_db,  // i.i.d. uniform on [L_min, L_max]
};

EveLossMode parse_eve_loss_mode(const std::string& s);
std::string to_string(EveLossMode mode);

struct AbsorptionSource {
  enum class Kind { none, constant, table, catalog };
  Kind kind = Kind::none;
  double k_per_m = 0.0;  // Kind::constant
  std::filesystem::path path;
};

struct ExperimentConfig {
  // Scenario.
  std::size_t alices = 10;
  std::size_t eves = 10;
  double map_side_m = 1.0;
  double d_min_m = 1e-3;
  double alpha = 0.5;
  double frequency_hz = 1e12;
  channel::Medium medium{};
  AbsorptionSource absorption{};
  EveLossMode eve_loss_mode = EveLossMode::geometric;

  // Sweeps. error-vs-snr crosses snr_db with either epsilon_db (when given) or pfa.
  std::vector<double> snr_db{-5.0, 0.0, 5.0, 10.0, 15.0, 20.0};
  std::vector<double> pfa{0.2};
  std::vector<double> epsilon_db;
  std::vector<double> sigma2_db2{0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0};

  // Monte Carlo sizes.
  std::size_t realizations = 1000;
  std::size_t slots = 1000;
  std::uint64_t seed = 1;
  std::size_t threads = 0;  // 0: hardware concurrency

  // hmm-compare.
  double hmm_epsilon_db = 1.0;
  std::size_t hmm_total_slots = 100000;
  std::size_t hmm_block_length = 1000;
  hmm::Matrix2 hmm_transition{{{0.5, 0.5}, {0.5, 0.5}}};
  hmm::Distribution2 hmm_initial{1.0, 0.0};

  // txid.
  std::size_t txid_realizations = 20;
  std::size_t txid_train = 10000;
  std::size_t txid_test = 100000;

  std::filesystem::path output;

  /// Throws ConfigError on unknown keys or invalid values. Relative paths are
  /// resolved against `base_dir`.
  static ExperimentConfig from_json_text(const std::string& text,
                                         const std::filesystem::path& base_dir = {});
  /// Reads a JSON file; IoError if it cannot be read.
  static ExperimentConfig load(const std::filesystem::path& path);

  void validate() const;
  /// Paper-scale Monte Carlo sizes (1e5 deployment realizations).
  void apply_full_scale();
  /// Loads the absorption input and evaluates k at the operating frequency.
  scenario::ChannelSetup channel_setup() const;
};

struct ResultRow {
  std::string sweep;
  std::string metric;
  double estimate = 0.0;
  double stderr_ = 0.0;
  std::uint64_t n = 0;
};

class ResultTable {
 public:
  explicit ResultTable(std::string name = {}) : name_(std::move(name)) {}

  void add(std::string sweep, std::string metric, double estimate, double stderr_value,
           std::uint64_t n);

  const std::string& name() const { return name_; }
  const std::vector<ResultRow>& rows() const { return rows_; }
  /// First row matching (sweep, metric); throws std::out_of_range if absent.
  const ResultRow& at(const std::string& sweep, const std::string& metric) const;

  /// `sweep,metric,estimate,stderr,n` with a fixed number format.
  std::string to_csv() const;
  void write_csv(const std::filesystem::path& path) const;

 private:
  std::string name_;
  std::vector<ResultRow> rows_;
};

/// Compact deterministic rendering of a sweep value ("0.2", "-5", "1e-05").
std::string format_value(double v);

ResultTable run_error_vs_snr(const ExperimentConfig& cfg);
/// One table per SNR in cfg.snr_db, sweeping cfg.pfa.
std::vector<ResultTable> run_roc(const ExperimentConfig& cfg);
ResultTable run_hmm_compare(const ExperimentConfig& cfg);
ResultTable run_txid(const ExperimentConfig& cfg);

/// Rows of the path-loss grid command.
struct PathLossPoint {
  double frequency_hz;
  double distance_m;
  double k_per_m;
  double spreading_db;
  double absorption_db;
  double total_db;
};

std::vector<PathLossPoint> path_loss_grid(const channel::AbsorptionModel& model,
                                          const channel::Medium& medium,
                                          const std::vector<double>& frequencies_hz,
                                          const std::vector<double>& distances_m);
std::string path_loss_csv(const std::vector<PathLossPoint>& points);

/// Builds the absorption model named by `source` (none/constant become flat tables).
channel::AbsorptionModel load_absorption(const AbsorptionSource& source);

}  // namespace thzauth::harness
