#pragma once

#include <array>
#include <optional>

#include "sarm/env.hpp"
#include "sarm/grid.hpp"

namespace sarm {

// Taxi gridworld: pick the passenger up at one landmark and put them down
// at another. Factored state (taxi cell, passenger location, destination)
// encoded through the mixed-radix codec.
class Taxi final : public Env {
 public:
  static constexpr Action kNorth = 0;
  static constexpr Action kSouth = 1;
  static constexpr Action kEast = 2;
  static constexpr Action kWest = 3;
  static constexpr Action kPickUp = 4;
  static constexpr Action kPutDown = 5;

  static constexpr int kInTaxi = 4;  // passenger location index

  struct State {
    Cell taxi;
    int passenger;  // 0..3 landmark, 4 = in taxi
    int destination;  // 0..3 landmark
  };

  /// `scale` multiplies the 5x5 layout (landmarks and walls) uniformly.
  Taxi(int pickup, int destination, double slip = 0.2, int scale = 1);

  StateId state_count() const override;
  StateId max_state_id() const override;
  int action_count() const override { return 6; }
  std::vector<std::pair<StateId, double>> transition_distribution(
      StateId s, Action a) const override;
  double reward(StateId s, Action a, StateId next) const override;
  bool terminal(StateId s, Action a, StateId next) const override;
  StateId initial_state(Rng& rng) const override;
  double goal_reward() const override { return 20.0; }

  StateId encode_state(const State& st) const;
  State decode_state(StateId s) const;

  int size() const { return size_; }
  Cell landmark(int i) const { return landmarks_.at(i); }
  const DomainSpec& domain() const { return spec_; }
  int pickup() const { return pickup_; }
  int destination() const { return dest_; }

 private:
  bool blocked(Cell c, Action dir) const;
  Cell move_target(Cell c, Action dir) const;

  int size_;
  int scale_;
  int pickup_;
  int dest_;
  double slip_;
  std::array<Cell, 4> landmarks_;
  // Wall segments between horizontally adjacent cells, stored as the
  // west-side cell; moving east from it (or west into it) is blocked.
  std::vector<Cell> vwalls_;
  DomainSpec spec_;
};

}  // namespace sarm
