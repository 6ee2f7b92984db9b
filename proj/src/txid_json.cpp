#include <json.hpp>

#include "thzauth/error.hpp"
#include "thzauth/txid.hpp"

namespace thzauth::txid {

std::string gmm_to_json(const GmmFit& fit, std::uint64_t seed) {
  nlohmann::ordered_json j;
  j["weights"] = fit.model.weights;
  j["means"] = fit.model.means;
  j["variances"] = fit.model.variances;
  j["iterations"] = fit.iterations;
  j["converged"] = fit.converged;
  j["log_likelihood"] = fit.log_likelihood;
  j["seed"] = seed;
  return j.dump(2);
}

GmmFit gmm_from_json(const std::string& text, std::uint64_t* seed) {
  GmmFit fit;
  try {
    const auto j = nlohmann::json::parse(text);
    fit.model.weights = j.at("weights").get<std::vector<double>>();
    fit.model.means = j.at("means").get<std::vector<double>>();
    fit.model.variances = j.at("variances").get<std::vector<double>>();
    fit.iterations = j.value("iterations", std::size_t{0});
    fit.converged = j.value("converged", false);
    fit.log_likelihood = j.value("log_likelihood", 0.0);
    if (seed) *seed = j.value("seed", std::uint64_t{0});
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("gmm json: ") + e.what());
  }
  fit.model.validate();
  return fit;
}

}  // namespace thzauth::txid
