#include "xfer/env/gridworld.hpp"

#include <stdexcept>

namespace xfer::gridworld {

std::pair<int, int> forward_delta(Orientation o) {
  switch (o) {
    case Orientation::North: return {0, -1};
    case Orientation::East: return {1, 0};
    case Orientation::South: return {0, 1};
    case Orientation::West: return {-1, 0};
  }
  return {0, 0};
}

Orientation turn_left(Orientation o) {
  return static_cast<Orientation>((static_cast<int>(o) + 3) % 4);
}

Orientation turn_right(Orientation o) {
  return static_cast<Orientation>((static_cast<int>(o) + 1) % 4);
}

GridWorld::GridWorld(GridConfig config, std::uint64_t seed)
    : config_(config), rng_(seed), preys_(config.prey_count) {
  if (config_.grid_size <= 0 || config_.prey_count < 0)
    throw std::invalid_argument("GridWorld: bad configuration");
  reset();
}

Vec GridWorld::reset() {
  std::uniform_int_distribution<int> cell(0, config_.grid_size - 1);
  std::uniform_int_distribution<int> orient(0, 3);
  auto place = [&](Entity& e) {
    // Rejection sampling keeps placements uniform over free cells.
    for (;;) {
      const int x = cell(rng_);
      const int y = cell(rng_);
      if (!occupied(x, y)) {
        e.x = x;
        e.y = y;
        e.facing = static_cast<Orientation>(orient(rng_));
        e.alive = true;
        return;
      }
    }
  };
  predator_ = Entity{};
  predator_.x = -1;  // off-grid so occupied() ignores it during placement
  predator_.y = -1;
  for (auto& p : preys_) {
    p = Entity{};
    p.x = -1;
    p.y = -1;
    p.alive = false;
  }
  place(predator_);
  for (auto& p : preys_) place(p);
  step_count_ = 0;
  done_ = false;
  return observation();
}

bool GridWorld::in_bounds(int x, int y) const {
  return x >= 0 && x < config_.grid_size && y >= 0 && y < config_.grid_size;
}

bool GridWorld::occupied(int x, int y) const {
  if (predator_.x == x && predator_.y == y && in_bounds(predator_.x, predator_.y))
    return true;
  for (const auto& p : preys_)
    if (p.alive && p.x == x && p.y == y) return true;
  return false;
}

Vec GridWorld::observation() const {
  const int view = config_.view_size;
  Vec obs(static_cast<std::size_t>(view) * view * 3, 0.0);
  const auto [fx, fy] = forward_delta(predator_.facing);
  // Right-hand vector relative to facing: rotate forward by 90 degrees.
  const int rx = -fy;
  const int ry = fx;
  const int half = view / 2;
  std::size_t idx = 0;
  for (int dist = 1; dist <= view; ++dist) {
    for (int lateral = -half; lateral <= half; ++lateral) {
      const int x = predator_.x + fx * dist + rx * lateral;
      const int y = predator_.y + fy * dist + ry * lateral;
      int channel = 0;  // empty
      if (!in_bounds(x, y)) {
        channel = 2;  // out of bounds
      } else {
        for (const auto& p : preys_) {
          if (p.alive && p.x == x && p.y == y) {
            channel = 1;
            break;
          }
        }
      }
      obs[idx * 3 + channel] = 1.0;
      ++idx;
    }
  }
  return obs;
}

PreyMove GridWorld::prey_policy(const GridConfig& config, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u = unit(rng);
  if (u < config.prey_stay) return PreyMove::Stay;
  if (u < config.prey_stay + config.prey_turn_left) return PreyMove::TurnLeft;
  if (u < config.prey_stay + config.prey_turn_left + config.prey_turn_right)
    return PreyMove::TurnRight;
  return PreyMove::Forward;
}

void GridWorld::move_prey(Entity& prey) {
  switch (prey_policy(config_, rng_)) {
    case PreyMove::Stay:
      break;
    case PreyMove::TurnLeft:
      prey.facing = turn_left(prey.facing);
      break;
    case PreyMove::TurnRight:
      prey.facing = turn_right(prey.facing);
      break;
    case PreyMove::Forward: {
      const auto [dx, dy] = forward_delta(prey.facing);
      const int nx = prey.x + dx;
      const int ny = prey.y + dy;
      // Blocked moves (wall or occupied cell) resolve to stay.
      if (in_bounds(nx, ny) && !occupied(nx, ny)) {
        prey.x = nx;
        prey.y = ny;
      }
      break;
    }
  }
}

StepResult GridWorld::step(Action action) {
  if (done_) throw std::logic_error("GridWorld::step on finished episode");

  double reward = 0.0;
  switch (action) {
    case Action::Forward: {
      const auto [dx, dy] = forward_delta(predator_.facing);
      const int nx = predator_.x + dx;
      const int ny = predator_.y + dy;
      if (in_bounds(nx, ny) && !occupied(nx, ny)) {
        predator_.x = nx;
        predator_.y = ny;
      }
      reward = config_.reward_move;
      break;
    }
    case Action::TurnLeft:
      predator_.facing = turn_left(predator_.facing);
      reward = config_.reward_move;
      break;
    case Action::TurnRight:
      predator_.facing = turn_right(predator_.facing);
      reward = config_.reward_move;
      break;
    case Action::Wait:
      reward = config_.reward_hold;
      break;
    case Action::Catch: {
      const auto [dx, dy] = forward_delta(predator_.facing);
      const int cx = predator_.x + dx;
      const int cy = predator_.y + dy;
      bool caught = false;
      for (auto& p : preys_) {
        if (p.alive && p.x == cx && p.y == cy) {
          p.alive = false;
          caught = true;
          break;
        }
      }
      reward = caught ? config_.reward_catch : config_.reward_missed_catch;
      break;
    }
  }

  for (auto& p : preys_)
    if (p.alive) move_prey(p);

  ++step_count_;
  done_ = preys_alive() == 0 || step_count_ >= config_.max_steps;
  return {observation(), reward, done_};
}

int GridWorld::preys_alive() const {
  int n = 0;
  for (const auto& p : preys_)
    if (p.alive) ++n;
  return n;
}

void GridWorld::place_predator(int x, int y, Orientation facing) {
  predator_.x = x;
  predator_.y = y;
  predator_.facing = facing;
}

void GridWorld::place_prey(std::size_t index, int x, int y, Orientation facing,
                           bool alive) {
  auto& p = preys_.at(index);
  p.x = x;
  p.y = y;
  p.facing = facing;
  p.alive = alive;
}

}  // namespace xfer::gridworld
