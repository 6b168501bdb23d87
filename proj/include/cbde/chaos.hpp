#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace cbde {

/// One-dimensional chaotic map. Logistic: d' = lw * d * (1 - d).
/// Tent: d' = tw * d for d < 0.5, tw * (1 - d) otherwise.
class ChaosMap {
 public:
  enum class Kind { Logistic, Tent };

  /// Rejects lw outside [0, 4]; chaotic for lw in (3.56, 4].
  static ChaosMap logistic(double lw = 4.0);
  /// Rejects tw outside [0, 2]; chaotic for tw in (1, 2).
  static ChaosMap tent(double tw = 1.5);

  Kind kind() const noexcept { return kind_; }
  double parameter() const noexcept { return param_; }

  /// One application of the map, clamped to [0, 1].
  double apply(double value) const noexcept;

  /// Fixed points and points that reach one in a step or two; seeds equal to
  /// any of these are nudged.
  std::vector<double> degenerate_points() const;

  friend bool operator==(const ChaosMap&, const ChaosMap&) = default;

 private:
  ChaosMap(Kind kind, double param) : kind_(kind), param_(param) {}
  Kind kind_;
  double param_;
};

/// Current point of a chaotic orbit. Advancing returns a new state.
class ChaosState {
 public:
  ChaosState(ChaosMap map, double value);

  const ChaosMap& map() const noexcept { return map_; }
  double value() const noexcept { return value_; }

  ChaosState next() const noexcept { return {map_, map_.apply(value_)}; }

 private:
  ChaosMap map_;
  double value_;
};

/// Offset applied to degenerate seeds.
inline constexpr double kSeedNudge = 1e-6;

/// Starts an orbit from a uniform draw in (0, 1), nudging degenerate seeds by
/// +1e-6 (wrapping inside (0, 1)).
ChaosState seed_state(const ChaosMap& map, double rng_draw);

/// The next n orbit values (the start value itself is not emitted) and the
/// state after the last one.
std::pair<std::vector<double>, ChaosState> sequence(const ChaosState& state, std::size_t n);

}  // namespace cbde
