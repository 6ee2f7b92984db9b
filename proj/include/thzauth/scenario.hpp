#pragma once

#include <cstddef>
#include <vector>

#include "thzauth/channel.hpp"
#include "thzauth/numerics.hpp"

namespace thzauth::scenario {

struct Position {
  double x = 0.0;
  double y = 0.0;
};

double distance(Position a, Position b);

/// Node layout on the square [0, side]^2 with Bob at the corner (0, 0).
struct Deployment {
  std::vector<Position> alices;
  std::vector<Position> eves;
  Position bob{};
  double map_side_m = 1.0;
  double d_min_m = 1e-3;
};

/// Uniform deployment of `m` Alices and `n` Eves, each resampled until it lies
/// at least `d_min` from Bob.
Deployment deploy(std::size_t m, std::size_t n, double map_side_m, double d_min_m,
                  numerics::RandomSource& rng);

/// Path-loss fingerprints in dB. `eve` is simulator-side truth only.
struct GroundTruth {
  std::vector<double> alice;
  std::vector<double> eve;
  double l_min = 0.0;
  double l_max = 0.0;
};

/// Channel inputs needed to turn a distance into a fingerprint. The
/// absorption coefficient at the operating frequency is evaluated once here.
class ChannelSetup {
 public:
  ChannelSetup(channel::AbsorptionModel absorption, channel::Medium medium,
               double frequency_hz);

  double path_loss_db(double distance_m) const;
  double k_per_m() const { return k_per_m_; }
  double frequency_hz() const { return frequency_hz_; }
  const channel::Medium& medium() const { return medium_; }
  const channel::AbsorptionModel& absorption() const { return absorption_; }

 private:
  channel::AbsorptionModel absorption_;
  channel::Medium medium_;
  double frequency_hz_;
  double k_per_m_;
};

GroundTruth ground_truth(const Deployment& dep, const ChannelSetup& setup);

/// Who owns each slot and how idle slots are taken over.
struct OccupancyModel {
  std::vector<double> alice_priors;  // simplex over M
  double alpha = 0.5;                // idle fraction, uniform over (i, j)
  std::size_t eve_count = 0;

  static OccupancyModel uniform(std::size_t m, std::size_t n, double alpha);
  void validate() const;
};

enum class Transmitter { alice, eve };

struct SlotTruth {
  Transmitter kind = Transmitter::alice;
  std::size_t index = 0;  // 0-based into alices or eves
  std::size_t owner = 0;  // Alice that owns the slot
};

/// Draws the slot owner from the priors; with probability alpha the owner is
/// idle and a uniformly chosen Eve transmits instead. With no Eves the owner
/// always transmits.
SlotTruth sample_slot(const OccupancyModel& occ, numerics::RandomSource& rng);

/// Draws an index from a discrete distribution given by `weights` (summing to 1).
std::size_t sample_categorical(const std::vector<double>& weights, numerics::RandomSource& rng);

}  // namespace thzauth::scenario
