#include "xfer/baselines.hpp"

#include <algorithm>
#include <cmath>

namespace xfer::baselines {

int Teacher::argmax_action(std::span<const double> state) const {
  const ppo::Vec logits = agent.policy().evaluate(state);
  return static_cast<int>(std::max_element(logits.begin(), logits.end()) -
                          logits.begin());
}

std::optional<int> advice_at_beginning(Teacher& teacher, std::span<const double> state) {
  if (teacher.budget <= 0) return std::nullopt;
  --teacher.budget;
  return teacher.argmax_action(state);
}

std::optional<int> mistake_correction(Teacher& teacher, std::span<const double> state,
                                      int student_action) {
  if (teacher.budget <= 0) return std::nullopt;
  const int expected = teacher.argmax_action(state);
  if (student_action == expected) return std::nullopt;
  --teacher.budget;
  return expected;
}

std::optional<int> confidence_epsilon_decay(Teacher& teacher,
                                            const rnd::RndPair& student_rnd,
                                            std::span<const double> state, long episode,
                                            const EpsDecayConfig& config,
                                            std::mt19937_64& rng) {
  if (teacher.budget <= 0 || !teacher.rnd) return std::nullopt;
  const double u_student = student_rnd.uncertainty(state);
  const double u_teacher = teacher.rnd->uncertainty(state);
  if (u_student <= u_teacher) return std::nullopt;
  const double eps = config.eps0 * std::pow(config.decay, static_cast<double>(episode));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (unit(rng) >= eps) return std::nullopt;
  --teacher.budget;
  return teacher.argmax_action(state);
}

}  // namespace xfer::baselines
