#pragma once

// THz path loss: free-space spreading plus molecular absorption.
//
// Units at this interface: Hz, metres, kelvin, atm, dB. Absorption
// coefficients are per metre.

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace thzauth::channel {

inline constexpr double kSpeedOfLight = 299'792'458.0;    // m/s
inline constexpr double kAvogadro = 6.02214076e23;        // 1/mol
inline constexpr double kGasConstant = 8.314462618;       // J/(mol K)
inline constexpr double kPascalPerAtm = 101'325.0;

struct Medium {
  double temperature_k = 285.0;
  double pressure_atm = 1.0;
  /// Reference conditions of the line intensities.
  double reference_temperature_k = 296.0;
  double reference_pressure_atm = 1.0;

  void validate() const;
};

struct AbsorptionSample {
  double frequency_hz;
  double k_per_m;
};

/// Tabulated absorption coefficient k(f), linearly interpolated.
class AbsorptionTable {
 public:
  /// Rows must have strictly increasing frequency and k >= 0.
  explicit AbsorptionTable(std::vector<AbsorptionSample> rows,
                           std::string medium_label = {});

  /// CSV with header `frequency_hz,k_per_m`; `#` lines are comments.
  static AbsorptionTable load_csv(const std::filesystem::path& path);

  /// Linear interpolation; throws DomainError outside [front, back].
  double k_at(double frequency_hz) const;

  double min_frequency() const { return rows_.front().frequency_hz; }
  double max_frequency() const { return rows_.back().frequency_hz; }
  const std::vector<AbsorptionSample>& rows() const { return rows_; }
  const std::string& medium_label() const { return label_; }

 private:
  std::vector<AbsorptionSample> rows_;
  std::string label_;
};

/// One absorption line. `intensity` is the integrated line intensity in
/// m^2 Hz per molecule, so intensity times the line shape (1/Hz) is a cross
/// section in m^2. `width_hz` is the full width at half maximum of the
/// Lorentzian profile.
struct SpectralLine {
  std::string gas;
  std::string isotopologue;
  double center_hz;
  double intensity;
  double width_hz;
  double mixing_ratio;
};

class LineCatalog {
 public:
  explicit LineCatalog(std::vector<SpectralLine> lines);

  /// CSV with header `gas,isotopologue,center_hz,intensity,width_hz,mixing_ratio`.
  static LineCatalog load_csv(const std::filesystem::path& path);

  const std::vector<SpectralLine>& lines() const { return lines_; }
  bool empty() const { return lines_.empty(); }

 private:
  std::vector<SpectralLine> lines_;
};

using AbsorptionModel = std::variant<AbsorptionTable, LineCatalog>;

/// Normalised Lorentzian line shape in 1/Hz; peak value 2/(pi * width).
double lorentzian(double f, double center_hz, double width_hz);

double spreading_loss_db(double frequency_hz, double distance_m);

/// Number density (molecules per m^3) of a species with the given mixing ratio.
double molecular_density(const Medium& medium, double mixing_ratio);

double absorption_coefficient(const LineCatalog& catalog, const Medium& medium,
                              double frequency_hz);

/// Beer-Lambert transmittance exp(-k d).
double transmittance(double k_per_m, double distance_m);

/// 10 log10(1 / transmittance).
double absorption_loss_db(double k_per_m, double distance_m);

/// k(f) from either absorption source.
double absorption_coefficient(const AbsorptionModel& model, const Medium& medium,
                              double frequency_hz);

double path_loss_db(const AbsorptionModel& model, const Medium& medium,
                    double frequency_hz, double distance_m);

/// Samples the catalog on `count` evenly spaced frequencies in [f_lo, f_hi].
AbsorptionTable tabulate(const LineCatalog& catalog, const Medium& medium,
                         double f_lo, double f_hi, std::size_t count);

}  // namespace thzauth::channel
