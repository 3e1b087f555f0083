#pragma once

#include <cmath>

namespace xfer::mod::reward {

// Delays are in simulation minutes. All formulas keep the delay term in a
// (0,1]-ish band so the three action families stay comparable.

constexpr double infeasible() { return -1.0; }

/// -x/(x+delay), x = 5 when no request is being served, 1 otherwise.
inline double park(bool serving_any, double delay_min) {
  const double x = serving_any ? 1.0 : 5.0;
  return -x / (x + delay_min);
}

/// exp(1/(1+delay)).
inline double dropoff(double delay_min) { return std::exp(1.0 / (1.0 + delay_min)); }

/// x/(x+delay), x = 1 for the first (solo) request, 2 for an additional one.
inline double pickup(bool first_request, double delay_min) {
  const double x = first_request ? 1.0 : 2.0;
  return x / (x + delay_min);
}

}  // namespace xfer::mod::reward
