#include "thzauth/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "csv_reader.hpp"
#include "thzauth/error.hpp"

namespace thzauth::channel {

namespace {

std::string fmt_value(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

void require_finite_positive(double v, const char* what) {
  if (!(std::isfinite(v) && v > 0.0)) {
    throw DomainError(std::string(what) + " must be finite and positive, got " + fmt_value(v));
  }
}

void require_non_negative(double v, const char* what) {
  if (!(std::isfinite(v) && v >= 0.0)) {
    throw DomainError(std::string(what) + " must be finite and non-negative, got " +
                      fmt_value(v));
  }
}

}  // namespace

void Medium::validate() const {
  require_finite_positive(temperature_k, "temperature");
  require_finite_positive(pressure_atm, "pressure");
  require_finite_positive(reference_temperature_k, "reference temperature");
  require_finite_positive(reference_pressure_atm, "reference pressure");
}

AbsorptionTable::AbsorptionTable(std::vector<AbsorptionSample> rows, std::string medium_label)
    : rows_(std::move(rows)), label_(std::move(medium_label)) {
  if (rows_.empty()) throw DomainError("absorption table is empty");
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    require_finite_positive(rows_[i].frequency_hz, "table frequency");
    require_non_negative(rows_[i].k_per_m, "table absorption coefficient");
    if (i > 0 && !(rows_[i].frequency_hz > rows_[i - 1].frequency_hz)) {
      throw DomainError("absorption table frequencies must be strictly increasing (row " +
                        std::to_string(i) + ")");
    }
  }
}

AbsorptionTable AbsorptionTable::load_csv(const std::filesystem::path& path) {
  std::vector<AbsorptionSample> samples;
  for (const auto& row : detail::read_csv(path, {"frequency_hz", "k_per_m"})) {
    samples.push_back({detail::parse_double(row.fields[0], path, row.line_number),
                       detail::parse_double(row.fields[1], path, row.line_number)});
  }
  try {
    return AbsorptionTable(std::move(samples), path.filename().string());
  } catch (const DomainError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

double AbsorptionTable::k_at(double frequency_hz) const {
  if (!(frequency_hz >= min_frequency() && frequency_hz <= max_frequency())) {
    throw DomainError("frequency " + fmt_value(frequency_hz) + " Hz outside table coverage [" +
                      fmt_value(min_frequency()) + ", " + fmt_value(max_frequency()) + "]");
  }
  const auto upper = std::lower_bound(
      rows_.begin(), rows_.end(), frequency_hz,
      [](const AbsorptionSample& s, double f) { return s.frequency_hz < f; });
  if (upper->frequency_hz == frequency_hz) return upper->k_per_m;
  const auto lower = upper - 1;
  const double t = (frequency_hz - lower->frequency_hz) /
                   (upper->frequency_hz - lower->frequency_hz);
  return lower->k_per_m + t * (upper->k_per_m - lower->k_per_m);
}

LineCatalog::LineCatalog(std::vector<SpectralLine> lines) : lines_(std::move(lines)) {
  for (const auto& line : lines_) {
    require_finite_positive(line.center_hz, "line center");
    require_non_negative(line.intensity, "line intensity");
    require_finite_positive(line.width_hz, "line width");
    if (!(line.mixing_ratio >= 0.0 && line.mixing_ratio <= 1.0)) {
      throw DomainError("mixing ratio must lie in [0, 1], got " + fmt_value(line.mixing_ratio));
    }
  }
}

LineCatalog LineCatalog::load_csv(const std::filesystem::path& path) {
  std::vector<SpectralLine> lines;
  const auto rows = detail::read_csv(
      path, {"gas", "isotopologue", "center_hz", "intensity", "width_hz", "mixing_ratio"});
  for (const auto& row : rows) {
    const auto num = [&](std::size_t i) {
      return detail::parse_double(row.fields[i], path, row.line_number);
    };
    lines.push_back({row.fields[0], row.fields[1], num(2), num(3), num(4), num(5)});
  }
  try {
    return LineCatalog(std::move(lines));
  } catch (const DomainError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

double lorentzian(double f, double center_hz, double width_hz) {
  const double half = 0.5 * width_hz;
  const double offset = f - center_hz;
  return half / (std::numbers::pi * (offset * offset + half * half));
}

double spreading_loss_db(double frequency_hz, double distance_m) {
  require_finite_positive(frequency_hz, "frequency");
  require_finite_positive(distance_m, "distance");
  return 20.0 * std::log10(4.0 * std::numbers::pi * frequency_hz * distance_m / kSpeedOfLight);
}

double molecular_density(const Medium& medium, double mixing_ratio) {
  medium.validate();
  if (!(mixing_ratio >= 0.0 && mixing_ratio <= 1.0)) {
    throw DomainError("mixing ratio must lie in [0, 1], got " + fmt_value(mixing_ratio));
  }
  const double pressure_pa = medium.pressure_atm * kPascalPerAtm;
  return pressure_pa / (kGasConstant * medium.temperature_k) * mixing_ratio * kAvogadro;
}

double absorption_coefficient(const LineCatalog& catalog, const Medium& medium,
                              double frequency_hz) {
  require_finite_positive(frequency_hz, "frequency");
  if (catalog.empty()) throw DomainError("line catalog is empty");
  medium.validate();
  const double scale = (medium.pressure_atm / medium.reference_pressure_atm) *
                       (medium.reference_temperature_k / medium.temperature_k);
  double k = 0.0;
  for (const auto& line : catalog.lines()) {
    const double density = molecular_density(medium, line.mixing_ratio);
    k += scale * density * line.intensity * lorentzian(frequency_hz, line.center_hz, line.width_hz);
  }
  return k;
}

double transmittance(double k_per_m, double distance_m) {
  require_non_negative(k_per_m, "absorption coefficient");
  require_non_negative(distance_m, "distance");
  return std::exp(-k_per_m * distance_m);
}

double absorption_loss_db(double k_per_m, double distance_m) {
  require_non_negative(k_per_m, "absorption coefficient");
  require_non_negative(distance_m, "distance");
  // 10 log10(1/tau) without forming tau, which underflows for large k d.
  return 10.0 * k_per_m * distance_m * std::numbers::log10e;
}

double absorption_coefficient(const AbsorptionModel& model, const Medium& medium,
                              double frequency_hz) {
  return std::visit(
      [&](const auto& source) -> double {
        using T = std::decay_t<decltype(source)>;
        if constexpr (std::is_same_v<T, AbsorptionTable>) {
          require_finite_positive(frequency_hz, "frequency");
          return source.k_at(frequency_hz);
        } else {
          return absorption_coefficient(source, medium, frequency_hz);
        }
      },
      model);
}

double path_loss_db(const AbsorptionModel& model, const Medium& medium, double frequency_hz,
                    double distance_m) {
  const double spreading = spreading_loss_db(frequency_hz, distance_m);
  return spreading + absorption_loss_db(absorption_coefficient(model, medium, frequency_hz),
                                        distance_m);
}

AbsorptionTable tabulate(const LineCatalog& catalog, const Medium& medium, double f_lo,
                         double f_hi, std::size_t count) {
  if (count < 2 || !(f_hi > f_lo)) throw DomainError("tabulate: need count >= 2 and f_hi > f_lo");
  std::vector<AbsorptionSample> rows;
  rows.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double f = f_lo + (f_hi - f_lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    rows.push_back({f, absorption_coefficient(catalog, medium, f)});
  }
  return AbsorptionTable(std::move(rows), "tabulated catalog");
}

}  // namespace thzauth::channel
