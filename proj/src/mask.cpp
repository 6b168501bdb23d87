#include "cbde/mask.hpp"

#include <algorithm>
#include <stdexcept>

namespace cbde {

FeatureMask FeatureMask::from_string(std::string_view bits) {
  FeatureMask m(bits.size());
  for (std::size_t j = 0; j < bits.size(); ++j) {
    if (bits[j] == '1') {
      m.set(j);
    } else if (bits[j] != '0') {
      throw std::invalid_argument("FeatureMask: bad bit character at " + std::to_string(j));
    }
  }
  return m;
}

FeatureMask FeatureMask::from_hex(std::string_view hex, std::size_t n) {
  if (hex.size() != (n + 3) / 4) {
    throw std::invalid_argument("FeatureMask: hex length does not match mask length");
  }
  FeatureMask m(n);
  for (std::size_t i = 0; i < hex.size(); ++i) {
    const char c = hex[i];
    int nibble = 0;
    if (c >= '0' && c <= '9') {
      nibble = c - '0';
    } else if (c >= 'a' && c <= 'f') {
      nibble = c - 'a' + 10;
    } else if (c >= 'A' && c <= 'F') {
      nibble = c - 'A' + 10;
    } else {
      throw std::invalid_argument("FeatureMask: bad hex digit");
    }
    for (int b = 0; b < 4; ++b) {
      const std::size_t j = 4 * i + static_cast<std::size_t>(b);
      const bool on = (nibble >> (3 - b)) & 1;
      if (j < n) {
        m.set(j, on);
      } else if (on) {
        throw std::invalid_argument("FeatureMask: padding bits must be zero");
      }
    }
  }
  return m;
}

std::size_t FeatureMask::popcount() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::vector<std::size_t> FeatureMask::selected() const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < bits_.size(); ++j) {
    if (bits_[j]) out.push_back(j);
  }
  return out;
}

std::string FeatureMask::to_string() const {
  std::string s(bits_.size(), '0');
  for (std::size_t j = 0; j < bits_.size(); ++j) {
    if (bits_[j]) s[j] = '1';
  }
  return s;
}

std::string FeatureMask::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s((bits_.size() + 3) / 4, '0');
  for (std::size_t i = 0; i < s.size(); ++i) {
    int nibble = 0;
    for (int b = 0; b < 4; ++b) {
      const std::size_t j = 4 * i + static_cast<std::size_t>(b);
      if (j < bits_.size() && bits_[j]) nibble |= 1 << (3 - b);
    }
    s[i] = kDigits[nibble];
  }
  return s;
}

std::size_t FeatureMaskHash::operator()(const FeatureMask& m) const noexcept {
  // FNV-1a over the bits.
  std::uint64_t h = 1469598103934665603ULL;
  for (std::size_t j = 0; j < m.size(); ++j) {
    h ^= m[j] ? 0x9bu : 0x35u;
    h *= 1099511628211ULL;
  }
  return static_cast<std::size_t>(h);
}

}  // namespace cbde
