#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "xfer/net/dense_net.hpp"

namespace xfer::gridworld {

using net::Vec;

enum class Orientation { North = 0, East = 1, South = 2, West = 3 };

enum class Action { Forward = 0, TurnLeft = 1, TurnRight = 2, Wait = 3, Catch = 4 };
constexpr int kActionCount = 5;

enum class PreyMove { Stay = 0, TurnLeft = 1, TurnRight = 2, Forward = 3 };

struct Entity {
  int x = 0;
  int y = 0;
  Orientation facing = Orientation::North;
  bool alive = true;
};

struct GridConfig {
  int grid_size = 9;
  int prey_count = 2;
  int view_size = 3;  // view_size x view_size cells directly ahead
  int max_steps = 500;
  double reward_catch = 1.0;
  double reward_missed_catch = -0.5;
  double reward_hold = -0.25;
  double reward_move = -0.01;
  double prey_stay = 0.10;
  double prey_turn_left = 0.25;
  double prey_turn_right = 0.25;
  double prey_forward = 0.40;
};

struct StepResult {
  Vec observation;
  double reward = 0.0;
  bool done = false;
};

/// Partially observable predator-prey grid. One learning predator, random
/// preys; the predator sees the view_size x view_size block directly in
/// front of it, one-hot per cell over {empty, prey, out-of-bounds}.
class GridWorld {
 public:
  GridWorld(GridConfig config, std::uint64_t seed);

  /// New episode: entities on distinct random cells, random orientations.
  Vec reset();

  /// Predator acts, then each live prey moves. Throws on a finished episode.
  StepResult step(Action action);

  Vec observation() const;
  bool done() const { return done_; }
  int step_count() const { return step_count_; }
  int preys_alive() const;

  const Entity& predator() const { return predator_; }
  const std::vector<Entity>& preys() const { return preys_; }
  const GridConfig& config() const { return config_; }
  int observation_size() const { return config_.view_size * config_.view_size * 3; }

  /// Draws a prey move with the configured probabilities.
  static PreyMove prey_policy(const GridConfig& config, std::mt19937_64& rng);

  // Test hooks: place entities explicitly (positions must be distinct).
  void place_predator(int x, int y, Orientation facing);
  void place_prey(std::size_t index, int x, int y, Orientation facing, bool alive);

 private:
  GridConfig config_;
  std::mt19937_64 rng_;
  Entity predator_;
  std::vector<Entity> preys_;
  int step_count_ = 0;
  bool done_ = false;

  bool in_bounds(int x, int y) const;
  bool occupied(int x, int y) const;  // predator or live prey
  void move_prey(Entity& prey);
};

/// Unit forward vector for an orientation (grid y grows southward).
std::pair<int, int> forward_delta(Orientation o);
Orientation turn_left(Orientation o);
Orientation turn_right(Orientation o);

}  // namespace xfer::gridworld
