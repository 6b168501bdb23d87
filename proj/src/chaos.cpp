#include "cbde/chaos.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cbde {

ChaosMap ChaosMap::logistic(double lw) {
  if (!(lw >= 0.0 && lw <= 4.0)) throw std::invalid_argument("logistic map parameter must lie in [0, 4]");
  return {Kind::Logistic, lw};
}

ChaosMap ChaosMap::tent(double tw) {
  if (!(tw >= 0.0 && tw <= 2.0)) throw std::invalid_argument("tent map parameter must lie in [0, 2]");
  return {Kind::Tent, tw};
}

double ChaosMap::apply(double d) const noexcept {
  double next = 0.0;
  if (kind_ == Kind::Logistic) {
    next = param_ * d * (1.0 - d);
  } else {
    next = d < 0.5 ? param_ * d : param_ * (1.0 - d);
  }
  return std::clamp(next, 0.0, 1.0);
}

std::vector<double> ChaosMap::degenerate_points() const {
  if (kind_ == Kind::Logistic) {
    std::vector<double> pts{0.0, 0.5, 1.0};
    if (param_ > 1.0) pts.push_back(1.0 - 1.0 / param_);
    if (param_ == 4.0) pts.push_back(0.25);
    return pts;
  }
  return {0.0, param_ / (1.0 + param_)};
}

ChaosState::ChaosState(ChaosMap map, double value) : map_(map), value_(value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw std::invalid_argument("chaos state value " + std::to_string(value) + " outside [0, 1]");
  }
}

ChaosState seed_state(const ChaosMap& map, double rng_draw) {
  if (!(rng_draw > 0.0 && rng_draw < 1.0)) throw std::invalid_argument("chaos seed draw must lie in (0, 1)");
  double v = rng_draw;
  for (const double p : map.degenerate_points()) {
    if (std::abs(v - p) < 1e-12) {
      v += kSeedNudge;
      if (v >= 1.0) v -= 1.0;
      break;
    }
  }
  return {map, v};
}

std::pair<std::vector<double>, ChaosState> sequence(const ChaosState& state, std::size_t n) {
  std::vector<double> values;
  values.reserve(n);
  ChaosState s = state;
  for (std::size_t i = 0; i < n; ++i) {
    s = s.next();
    values.push_back(s.value());
  }
  return {std::move(values), s};
}

}  // namespace cbde
