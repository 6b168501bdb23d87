#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace cbde {

/// Fixed-length bit vector over the N features of a dataset. Bit j set means
/// feature j is selected.
class FeatureMask {
 public:
  FeatureMask() = default;
  explicit FeatureMask(std::size_t n, bool value = false) : bits_(n, value ? 1 : 0) {}

  /// Parses a '0'/'1' string, index 0 first ("101" selects features 0 and 2).
  static FeatureMask from_string(std::string_view bits);
  /// Inverse of to_hex(); n is the mask length.
  static FeatureMask from_hex(std::string_view hex, std::size_t n);

  std::size_t size() const noexcept { return bits_.size(); }
  bool operator[](std::size_t j) const noexcept { return bits_[j] != 0; }
  void set(std::size_t j, bool value = true) noexcept { bits_[j] = value ? 1 : 0; }

  std::size_t popcount() const noexcept;
  bool empty_selection() const noexcept { return popcount() == 0; }

  /// Indices of set bits in increasing order.
  std::vector<std::size_t> selected() const;

  std::string to_string() const;
  /// Hex encoding of the bitstring: bit j lives in nibble j/4 (most
  /// significant bit of the nibble first), nibbles written left to right.
  std::string to_hex() const;

  friend bool operator==(const FeatureMask&, const FeatureMask&) = default;
  friend auto operator<=>(const FeatureMask&, const FeatureMask&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

struct FeatureMaskHash {
  std::size_t operator()(const FeatureMask& m) const noexcept;
};

}  // namespace cbde
