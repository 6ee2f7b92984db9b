#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "thzauth/auth.hpp"
#include "thzauth/error.hpp"
#include "thzauth/harness.hpp"

using namespace thzauth;
using namespace thzauth::harness;

namespace {

ExperimentConfig small_config() {
  return ExperimentConfig::from_json_text(R"({
    "m": 6, "n": 6, "alpha": 0.5,
    "absorption": {"kind": "constant", "k_per_m": 45},
    "snr_db": [0, 10], "pfa": [0.1, 0.3],
    "realizations": 40, "slots": 300, "seed": 7,
    "hmm": {"total_slots": 4000, "block_length": 500},
    "txid": {"realizations": 2, "train": 600, "test": 2000},
    "sigma2_db2": [0.1, 2]
  })");
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("thzauth_harness_" + name);
}

std::string write_file(const std::string& name, const std::string& body) {
  const auto p = temp_path(name);
  std::ofstream(p) << body;
  return p.string();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + THZAUTH_CLI + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("result table CSV") {
  ResultTable t("demo");
  t.add("snr_db=5", "pfa", 0.125, 0.001, 1000);
  t.add("snr_db=5", "pmd", std::nan(""), std::nan(""), 0);
  CHECK(t.to_csv() == "sweep,metric,estimate,stderr,n\nsnr_db=5,pfa,0.125,0.001,1000\n"
                      "snr_db=5,pmd,nan,nan,0\n");
  CHECK(t.at("snr_db=5", "pfa").n == 1000);
  CHECK_THROWS_AS(t.at("snr_db=6", "pfa"), std::out_of_range);
  CHECK(format_value(0.2) == "0.2");
  CHECK(format_value(-5.0) == "-5");
  CHECK(format_value(1e-5) == "1e-05");
}

TEST_CASE("experiments are reproducible and independent of the thread count") {
  auto cfg = small_config();
  cfg.threads = 1;
  const auto a = run_error_vs_snr(cfg).to_csv();
  const auto b = run_error_vs_snr(cfg).to_csv();
  cfg.threads = 3;
  const auto c = run_error_vs_snr(cfg).to_csv();
  CHECK(a == b);
  CHECK(a == c);

  cfg.threads = 1;
  const auto r1 = run_roc(cfg);
  cfg.threads = 4;
  const auto r2 = run_roc(cfg);
  REQUIRE(r1.size() == 2);
  for (std::size_t i = 0; i < r1.size(); ++i) CHECK(r1[i].to_csv() == r2[i].to_csv());
  CHECK(r1[0].name() == "roc_snr_db=0");

  const auto h1 = run_hmm_compare(cfg).to_csv();
  cfg.threads = 1;
  CHECK(h1 == run_hmm_compare(cfg).to_csv());

  const auto t1 = run_txid(cfg).to_csv();
  cfg.threads = 2;
  CHECK(t1 == run_txid(cfg).to_csv());

  cfg.seed = 8;
  CHECK(run_error_vs_snr(cfg).to_csv() != a);
}

TEST_CASE("tables are complete") {
  const auto cfg = small_config();
  const auto t = run_error_vs_snr(cfg);
  CHECK(t.rows().size() == 2 * 2 * 4);
  for (const auto& r : t.rows()) {
    CHECK(std::isfinite(r.estimate));
    CHECK(std::isfinite(r.stderr_));
    CHECK(r.n > 0);
  }
  CHECK(run_hmm_compare(cfg).rows().size() == 2 * 5);
  CHECK(run_txid(cfg).rows().size() == 2 * 5);
  for (const auto& r : run_roc(cfg)) CHECK(r.rows().size() == 2 * 6);
}

TEST_CASE("no Eves: missed detection is flagged, false alarm is present") {
  auto cfg = small_config();
  cfg.eves = 0;
  cfg.snr_db = {5.0};
  cfg.pfa = {0.2};
  cfg.realizations = 1;
  const auto t = run_error_vs_snr(cfg);
  const auto& pmd = t.at("snr_db=5;pfa=0.2", "pmd_empirical");
  CHECK(std::isnan(pmd.estimate));
  CHECK(pmd.n == 0);
  CHECK(std::isnan(t.at("snr_db=5;pfa=0.2", "pmd_analytic").estimate));
  CHECK(t.at("snr_db=5;pfa=0.2", "pfa_empirical").n == 300);
  CHECK_THROWS_AS(run_hmm_compare(cfg), ConfigError);
}

TEST_CASE("false alarm with a single Alice matches the target") {
  auto cfg = small_config();
  cfg.alices = 1;
  cfg.eves = 0;
  cfg.snr_db = {0.0};
  cfg.pfa = {0.2};
  cfg.realizations = 100;
  cfg.slots = 1000;
  const auto& row = run_error_vs_snr(cfg).at("snr_db=0;pfa=0.2", "pfa_empirical");
  CHECK(row.n == 100000);
  CHECK(std::abs(row.estimate - 0.2) < 3.0 * row.stderr_);
}

TEST_CASE("explicit epsilon sweep") {
  auto cfg = small_config();
  cfg.epsilon_db = {1.0};
  const auto t = run_error_vs_snr(cfg);
  CHECK(t.at("snr_db=0;eps=1", "pfa_analytic").estimate ==
        doctest::Approx(auth::analytic_pfa(1.0, 1.0)));
}

TEST_CASE("noiseless limits") {
  auto cfg = small_config();
  cfg.snr_db = {100.0};
  cfg.hmm_epsilon_db = 1e-3;
  const auto h = run_hmm_compare(cfg);
  CHECK(h.at("snr_db=100", "ht_accuracy").estimate > 0.99);
  CHECK(h.at("snr_db=100", "hmm_accuracy").estimate > 0.99);

  cfg.sigma2_db2 = {1e-8};
  const auto t = run_txid(cfg);
  CHECK(t.at("sigma2=1e-08", "noiseless_pmc_ml").estimate < 0.01);
  CHECK(t.at("sigma2=1e-08", "noiseless_pmc_gmm").estimate < 0.01);
}

TEST_CASE("ROC rows behave") {
  auto cfg = small_config();
  cfg.pfa = {0.05, 0.2, 0.5, 0.999999};
  const auto tables = run_roc(cfg);
  for (const auto& t : tables) {
    double prev = -1.0;
    for (double p : cfg.pfa) {
      const double pd = t.at("pfa=" + format_value(p), "pd_empirical").estimate;
      CHECK(pd >= prev);
      prev = pd;
    }
    CHECK(prev > 0.999);
  }
}

TEST_CASE("configuration errors") {
  CHECK_THROWS_AS(ExperimentConfig::from_json_text("{"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json_text("[]"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"bogus": 1})"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"m": 0})"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"m": -2})"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"alpha": 1.5})"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"pfa": [0.0]})"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"snr_db": []})"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"eve_loss_mode": "random"})"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"medium": {"temp": 3}})"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"medium": {"temperature_k": -3}})"),
                  ConfigError);
  CHECK_THROWS_AS(
      ExperimentConfig::from_json_text(R"({"absorption": {"kind": "table", "path": "nope.csv"}})"),
      ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"absorption": {"kind": "table"}})"),
                  ConfigError);
  CHECK_THROWS_AS(
      ExperimentConfig::from_json_text(R"({"hmm": {"transition": [[0.5, 0.6], [0.5, 0.5]]}})"),
      ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::load("/nonexistent/config.json"), IoError);

  const auto cfg = ExperimentConfig::from_json_text(R"({"realizations": 1e5, "pfa": 0.3})");
  CHECK(cfg.realizations == 100000);
  CHECK(cfg.pfa == std::vector<double>{0.3});
  CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"realizations": 2.5})"), ConfigError);

  auto out_of_band = ExperimentConfig::from_json_text(
      R"({"absorption": {"kind": "table", "path": "example_k_table.csv"}, "frequency_hz": 2e12})",
      THZAUTH_DATA_DIR);
  CHECK_THROWS_AS(out_of_band.channel_setup(), ConfigError);
}

TEST_CASE("shipped configurations load") {
  for (const char* name : {"error_vs_snr", "roc", "hmm_compare", "txid", "pathloss"}) {
    CAPTURE(name);
    CHECK_NOTHROW(ExperimentConfig::load(std::string(THZAUTH_DATA_DIR "/configs/") + name + ".json"));
  }
  auto cfg = ExperimentConfig::load(THZAUTH_DATA_DIR "/configs/roc.json");
  cfg.apply_full_scale();
  CHECK(cfg.realizations == 100000);
}

TEST_CASE("eve loss mode names") {
  CHECK(parse_eve_loss_mode("uniform-in-db") == EveLossMode::uniform_db);
  CHECK(parse_eve_loss_mode("geometric") == EveLossMode::geometric);
  CHECK(to_string(EveLossMode::uniform_db) == "uniform-in-db");
  CHECK_THROWS_AS(parse_eve_loss_mode("x"), ConfigError);
}

TEST_CASE("path loss grid") {
  const auto model = load_absorption({AbsorptionSource::Kind::constant, 0.1, {}});
  const auto pts = path_loss_grid(model, channel::Medium{}, {1e12, 2e12}, {0.5, 1.0});
  REQUIRE(pts.size() == 4);
  CHECK(pts[0].total_db == doctest::Approx(86.64433054955538).epsilon(1e-12));
  CHECK(pts[0].spreading_db + pts[0].absorption_db == doctest::Approx(pts[0].total_db));
  CHECK(pts[1].distance_m == 1.0);
  CHECK(pts[2].frequency_hz == 2e12);
  const auto csv = path_loss_csv(pts);
  CHECK(csv.rfind("frequency_hz,distance_m,k_per_m,spreading_db,absorption_db,path_loss_db\n", 0) == 0);
}

TEST_CASE("command line exit codes") {
  const std::string data = THZAUTH_DATA_DIR;
  const auto out = temp_path("pl.csv").string();
  CHECK(run_cli("pathloss --d-m 0.5,1 --f-hz 1e12 --table " + data + "/example_k_table.csv --out " +
                out) == 0);
  std::ifstream in(out);
  std::string header;
  std::getline(in, header);
  CHECK(header == "frequency_hz,distance_m,k_per_m,spreading_db,absorption_db,path_loss_db");

  const auto cfg = write_file("ok.json", R"({"m": 3, "n": 3, "realizations": 3, "slots": 50,
      "absorption": {"kind": "constant", "k_per_m": 10}, "snr_db": [0]})");
  CHECK(run_cli("error-vs-snr --config " + cfg) == 0);
  CHECK(run_cli("roc --config " + cfg + " --pfa 0.1,0.5 --seed 4") == 0);

  CHECK(run_cli("error-vs-snr --config " + write_file("bad.json", R"({"zzz": 1})")) == 2);
  CHECK(run_cli("error-vs-snr --config " + cfg + " --pfa 2") == 2);
  CHECK(run_cli("error-vs-snr --no-such-flag") == 2);
  CHECK(run_cli("") == 2);
  CHECK(run_cli("error-vs-snr --config /nonexistent/x.json") == 3);
  CHECK(run_cli("pathloss --d-m 1 --table /nonexistent/t.csv") == 3);
  // The parent of the output path is a regular file.
  CHECK(run_cli("error-vs-snr --config " + cfg + " --out " + cfg + "/x.csv") == 3);
  CHECK(run_cli("pathloss --d-m 1 --f-hz 5e12 --table " + data + "/example_k_table.csv") == 2);
}

TEST_CASE("command line output is deterministic") {
  const auto cfg = write_file("det.json", R"({"m": 4, "n": 4, "realizations": 5, "slots": 100,
      "absorption": {"kind": "constant", "k_per_m": 10}, "snr_db": [0, 5]})");
  const auto a = temp_path("det_a.csv").string();
  const auto b = temp_path("det_b.csv").string();
  REQUIRE(run_cli("error-vs-snr --config " + cfg + " --out " + a) == 0);
  REQUIRE(run_cli("error-vs-snr --config " + cfg + " --threads 2 --out " + b) == 0);
  auto slurp = [](const std::string& p) {
    std::ifstream f(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(f), {});
  };
  CHECK(!slurp(a).empty());
  CHECK(slurp(a) == slurp(b));
}
