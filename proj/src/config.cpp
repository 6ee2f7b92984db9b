#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "thzauth/error.hpp"
#include "thzauth/harness.hpp"

namespace thzauth::harness {

using nlohmann::json;

EveLossMode parse_eve_loss_mode(const std::string& s) {
  if (s == "geometric") return EveLossMode::geometric;
  if (s == "uniform-in-db" || s == "uniform_db" || s == "uniform") return EveLossMode::uniform_db;
  throw ConfigError("unknown eve_loss_mode '" + s + "' (expected geometric or uniform-in-db)");
}

std::string to_string(EveLossMode mode) {
  return mode == EveLossMode::geometric ? "geometric" : "uniform-in-db";
}

namespace {

void reject_unknown_keys(const json& obj, const std::set<std::string>& known,
                         const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (!known.contains(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

// Accepts integer-valued numbers written in exponent form (1e5).
void read_count(const json& obj, const char* key, std::size_t& out) {
  if (!obj.contains(key)) return;
  const auto& v = obj.at(key);
  if (v.is_number_unsigned()) {
    out = v.get<std::size_t>();
    return;
  }
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (d >= 0.0 && d == std::floor(d) && d < 1e18) {
      out = static_cast<std::size_t>(d);
      return;
    }
  }
  throw ConfigError(std::string("'") + key + "' must be a non-negative integer");
}

template <typename T>
void read_list(const json& obj, const char* key, std::vector<T>& out) {
  if (!obj.contains(key)) return;
  const auto& v = obj.at(key);
  try {
    if (v.is_array()) {
      out = v.get<std::vector<T>>();
    } else {
      out = {v.get<T>()};
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

std::filesystem::path resolve(const std::filesystem::path& p, const std::filesystem::path& base) {
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return base / p;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text,
                                                  const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown_keys(j,
                      {"m", "n", "map_side_m", "d_min_m", "alpha", "frequency_hz", "seed",
                       "medium", "absorption", "eve_loss_mode", "snr_db", "pfa", "epsilon_db",
                       "sigma2_db2", "realizations", "slots", "threads", "hmm", "txid", "output",
                       "description"},
                      "config");

  ExperimentConfig cfg;
  read_count(j, "m", cfg.alices);
  read_count(j, "n", cfg.eves);
  read(j, "map_side_m", cfg.map_side_m);
  read(j, "d_min_m", cfg.d_min_m);
  read(j, "alpha", cfg.alpha);
  read(j, "frequency_hz", cfg.frequency_hz);
  read(j, "seed", cfg.seed);
  read_count(j, "realizations", cfg.realizations);
  read_count(j, "slots", cfg.slots);
  read_count(j, "threads", cfg.threads);
  read_list(j, "snr_db", cfg.snr_db);
  read_list(j, "pfa", cfg.pfa);
  read_list(j, "epsilon_db", cfg.epsilon_db);
  read_list(j, "sigma2_db2", cfg.sigma2_db2);

  if (j.contains("eve_loss_mode")) {
    std::string mode;
    read(j, "eve_loss_mode", mode);
    cfg.eve_loss_mode = parse_eve_loss_mode(mode);
  }
  if (j.contains("medium")) {
    const auto& m = j.at("medium");
    reject_unknown_keys(m, {"temperature_k", "pressure_atm", "reference_temperature_k",
                            "reference_pressure_atm"},
                        "medium");
    read(m, "temperature_k", cfg.medium.temperature_k);
    read(m, "pressure_atm", cfg.medium.pressure_atm);
    read(m, "reference_temperature_k", cfg.medium.reference_temperature_k);
    read(m, "reference_pressure_atm", cfg.medium.reference_pressure_atm);
  }
  if (j.contains("absorption")) {
    const auto& a = j.at("absorption");
    reject_unknown_keys(a, {"kind", "path", "k_per_m"}, "absorption");
    std::string kind = "none";
    read(a, "kind", kind);
    if (kind == "none") {
      cfg.absorption.kind = AbsorptionSource::Kind::none;
    } else if (kind == "constant") {
      cfg.absorption.kind = AbsorptionSource::Kind::constant;
      read(a, "k_per_m", cfg.absorption.k_per_m);
    } else if (kind == "table" || kind == "catalog") {
      cfg.absorption.kind =
          kind == "table" ? AbsorptionSource::Kind::table : AbsorptionSource::Kind::catalog;
      std::string path;
      read(a, "path", path);
      if (path.empty()) throw ConfigError("absorption." + kind + " needs a path");
      cfg.absorption.path = resolve(path, base_dir);
    } else {
      throw ConfigError("unknown absorption kind '" + kind + "'");
    }
  }
  if (j.contains("hmm")) {
    const auto& h = j.at("hmm");
    reject_unknown_keys(h, {"epsilon_db", "total_slots", "block_length", "transition", "initial"},
                        "hmm");
    read(h, "epsilon_db", cfg.hmm_epsilon_db);
    read_count(h, "total_slots", cfg.hmm_total_slots);
    read_count(h, "block_length", cfg.hmm_block_length);
    read(h, "transition", cfg.hmm_transition);
    read(h, "initial", cfg.hmm_initial);
  }
  if (j.contains("txid")) {
    const auto& t = j.at("txid");
    reject_unknown_keys(t, {"realizations", "train", "test"}, "txid");
    read_count(t, "realizations", cfg.txid_realizations);
    read_count(t, "train", cfg.txid_train);
    read_count(t, "test", cfg.txid_test);
  }
  if (j.contains("output")) {
    std::string out;
    read(j, "output", out);
    cfg.output = out;
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str(), path.parent_path());
}

void ExperimentConfig::validate() const {
  const auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (alices < 1) fail("m must be at least 1");
  if (!(map_side_m > 0.0)) fail("map_side_m must be positive");
  if (!(d_min_m > 0.0 && d_min_m < map_side_m)) fail("d_min_m must lie in (0, map_side_m)");
  if (!(alpha > 0.0 && alpha < 1.0)) fail("alpha must lie in (0, 1)");
  if (!(frequency_hz > 0.0)) fail("frequency_hz must be positive");
  if (realizations < 1) fail("realizations must be at least 1");
  if (slots < 1) fail("slots must be at least 1");
  if (snr_db.empty()) fail("snr_db must not be empty");
  if (pfa.empty() && epsilon_db.empty()) fail("need a pfa or epsilon_db sweep");
  for (double p : pfa) {
    if (!(p > 0.0 && p < 1.0)) fail("pfa values must lie in (0, 1)");
  }
  for (double e : epsilon_db) {
    if (!(e > 0.0)) fail("epsilon_db values must be positive");
  }
  for (double s : sigma2_db2) {
    if (!(s > 0.0)) fail("sigma2_db2 values must be positive");
  }
  for (double s : snr_db) {
    if (!std::isfinite(s)) fail("snr_db values must be finite");
  }
  if (!(hmm_epsilon_db > 0.0)) fail("hmm.epsilon_db must be positive");
  if (hmm_block_length < 1 || hmm_total_slots < 1) fail("hmm sizes must be positive");
  if (txid_realizations < 1 || txid_train < alices || txid_test < 1) {
    fail("txid sizes must be positive and train >= m");
  }
  if (absorption.kind == AbsorptionSource::Kind::constant && !(absorption.k_per_m >= 0.0)) {
    fail("absorption.k_per_m must be non-negative");
  }
  try {
    medium.validate();
    hmm::Hmm probe;
    probe.transition = hmm_transition;
    probe.initial = hmm_initial;
    probe.validate();
  } catch (const std::exception& e) {
    fail(e.what());
  }
  if ((absorption.kind == AbsorptionSource::Kind::table ||
       absorption.kind == AbsorptionSource::Kind::catalog) &&
      !std::filesystem::exists(absorption.path)) {
    fail("absorption file not found: " + absorption.path.string());
  }
}

void ExperimentConfig::apply_full_scale() { realizations = 100000; }

channel::AbsorptionModel load_absorption(const AbsorptionSource& source) {
  switch (source.kind) {
    case AbsorptionSource::Kind::table:
      return channel::AbsorptionTable::load_csv(source.path);
    case AbsorptionSource::Kind::catalog:
      return channel::LineCatalog::load_csv(source.path);
    case AbsorptionSource::Kind::constant:
    case AbsorptionSource::Kind::none:
      break;
  }
  const double k = source.kind == AbsorptionSource::Kind::constant ? source.k_per_m : 0.0;
  // A flat table covering every physical frequency.
  return channel::AbsorptionTable({{1.0, k}, {1e18, k}}, "constant");
}

scenario::ChannelSetup ExperimentConfig::channel_setup() const {
  try {
    return scenario::ChannelSetup(load_absorption(absorption), medium, frequency_hz);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("channel: ") + e.what());
  }
}

}  // namespace thzauth::harness
