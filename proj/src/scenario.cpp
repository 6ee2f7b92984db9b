#include "thzauth/scenario.hpp"

#include <cmath>
#include <numeric>

#include "thzauth/error.hpp"

namespace thzauth::scenario {

double distance(Position a, Position b) { return std::hypot(a.x - b.x, a.y - b.y); }

namespace {

Position draw_position(double side, double d_min, Position bob, numerics::RandomSource& rng) {
  while (true) {
    Position p{rng.uniform(0.0, side), rng.uniform(0.0, side)};
    if (distance(p, bob) >= d_min) return p;
  }
}

}  // namespace

Deployment deploy(std::size_t m, std::size_t n, double map_side_m, double d_min_m,
                  numerics::RandomSource& rng) {
  if (m < 1) throw DomainError("deploy: need at least one Alice");
  if (!(map_side_m > 0.0 && std::isfinite(map_side_m))) {
    throw DomainError("deploy: map side must be positive");
  }
  if (!(d_min_m > 0.0 && d_min_m < map_side_m)) {
    throw DomainError("deploy: d_min must lie in (0, map side)");
  }
  Deployment dep;
  dep.map_side_m = map_side_m;
  dep.d_min_m = d_min_m;
  dep.alices.reserve(m);
  dep.eves.reserve(n);
  for (std::size_t i = 0; i < m; ++i) dep.alices.push_back(draw_position(map_side_m, d_min_m, dep.bob, rng));
  for (std::size_t j = 0; j < n; ++j) dep.eves.push_back(draw_position(map_side_m, d_min_m, dep.bob, rng));
  return dep;
}

ChannelSetup::ChannelSetup(channel::AbsorptionModel absorption, channel::Medium medium,
                           double frequency_hz)
    : absorption_(std::move(absorption)),
      medium_(medium),
      frequency_hz_(frequency_hz),
      k_per_m_(channel::absorption_coefficient(absorption_, medium_, frequency_hz)) {}

double ChannelSetup::path_loss_db(double distance_m) const {
  return channel::spreading_loss_db(frequency_hz_, distance_m) +
         channel::absorption_loss_db(k_per_m_, distance_m);
}

GroundTruth ground_truth(const Deployment& dep, const ChannelSetup& setup) {
  GroundTruth gt;
  gt.alice.reserve(dep.alices.size());
  gt.eve.reserve(dep.eves.size());
  for (const auto& p : dep.alices) gt.alice.push_back(setup.path_loss_db(distance(p, dep.bob)));
  for (const auto& p : dep.eves) gt.eve.push_back(setup.path_loss_db(distance(p, dep.bob)));
  gt.l_min = setup.path_loss_db(dep.d_min_m);
  gt.l_max = setup.path_loss_db(std::sqrt(2.0) * dep.map_side_m);
  return gt;
}

OccupancyModel OccupancyModel::uniform(std::size_t m, std::size_t n, double alpha) {
  if (m < 1) throw DomainError("occupancy: need at least one Alice");
  OccupancyModel occ;
  occ.alice_priors.assign(m, 1.0 / static_cast<double>(m));
  occ.alpha = alpha;
  occ.eve_count = n;
  occ.validate();
  return occ;
}

void OccupancyModel::validate() const {
  if (alice_priors.empty()) throw DomainError("occupancy: empty Alice priors");
  double total = 0.0;
  for (double p : alice_priors) {
    if (!(p >= 0.0)) throw DomainError("occupancy: negative prior");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw DomainError("occupancy: priors must sum to 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("occupancy: alpha must lie in (0, 1)");
}

std::size_t sample_categorical(const std::vector<double>& weights, numerics::RandomSource& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc) return i;
  }
  // Rounding left u above the accumulated mass: take the last non-zero entry.
  for (std::size_t i = weights.size(); i-- > 0;) {
    if (weights[i] > 0.0) return i;
  }
  return 0;
}

SlotTruth sample_slot(const OccupancyModel& occ, numerics::RandomSource& rng) {
  SlotTruth truth;
  truth.owner = sample_categorical(occ.alice_priors, rng);
  truth.index = truth.owner;
  if (occ.eve_count > 0 && rng.uniform() < occ.alpha) {
    truth.kind = Transmitter::eve;
    truth.index = rng.uniform_index(occ.eve_count);
  }
  return truth;
}

}  // namespace thzauth::scenario
