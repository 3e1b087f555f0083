#pragma once

#include <optional>

#include "xfer/ppo.hpp"
#include "xfer/rnd.hpp"

namespace xfer::baselines {

/// A trained agent (and its RND estimator) frozen for advising, with a
/// budget capping the number of advice actions over a student's run.
struct Teacher {
  ppo::PpoAgent agent;
  std::optional<rnd::RndPair> rnd;
  long budget = 0;

  Teacher(ppo::PpoAgent a, std::optional<rnd::RndPair> r, long b)
      : agent(std::move(a)), rnd(std::move(r)), budget(b) {}

  int argmax_action(std::span<const double> state) const;
};

struct EpsDecayConfig {
  double eps0 = 1.0;
  double decay = 0.999;  // multiplicative per episode
};

/// Advice for the first `budget` student steps, nothing afterwards.
std::optional<int> advice_at_beginning(Teacher& teacher, std::span<const double> state);

/// Advice only when the student's proposed action differs from the
/// teacher's argmax.
std::optional<int> mistake_correction(Teacher& teacher, std::span<const double> state,
                                      int student_action);

/// With probability eps0 * decay^episode, and only when the student is less
/// confident (u_student > u_teacher), the teacher's argmax is returned.
std::optional<int> confidence_epsilon_decay(Teacher& teacher,
                                            const rnd::RndPair& student_rnd,
                                            std::span<const double> state, long episode,
                                            const EpsDecayConfig& config,
                                            std::mt19937_64& rng);

}  // namespace xfer::baselines
