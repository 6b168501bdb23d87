#pragma once

#include "cbde/chaos.hpp"
#include "cbde/rng.hpp"

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace cbde {

/// Stream of reals in [0, 1] feeding the variation operators. Random and
/// chaotic variants differ only in which implementation they are handed.
class DrawSource {
 public:
  virtual ~DrawSource() = default;
  virtual double draw() = 0;
};

class UniformDraws final : public DrawSource {
 public:
  explicit UniformDraws(Rng& rng) : rng_(&rng) {}
  double draw() override { return uniform01(*rng_); }

 private:
  Rng* rng_;
};

/// Emits successive orbit values; the start value itself is never emitted.
class ChaosDraws final : public DrawSource {
 public:
  explicit ChaosDraws(ChaosState state) : state_(state) {}
  double draw() override {
    state_ = state_.next();
    return state_.value();
  }
  const ChaosState& state() const noexcept { return state_; }

 private:
  ChaosState state_;
};

/// Replays a fixed list; throws once exhausted.
class ScriptedDraws final : public DrawSource {
 public:
  explicit ScriptedDraws(std::vector<double> values) : values_(std::move(values)) {}
  double draw() override {
    if (next_ >= values_.size()) throw std::out_of_range("scripted draw sequence exhausted");
    return values_[next_++];
  }
  std::size_t consumed() const noexcept { return next_; }
  std::size_t remaining() const noexcept { return values_.size() - next_; }

 private:
  std::vector<double> values_;
  std::size_t next_ = 0;
};

/// floor(u * n) clamped into [0, n).
inline std::size_t index_from_draw(double u, std::size_t n) noexcept {
  auto i = static_cast<std::size_t>(u * static_cast<double>(n));
  return i < n ? i : n - 1;
}

}  // namespace cbde
