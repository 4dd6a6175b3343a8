#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

namespace subkit {

/// A value of N∞ = N0 ∪ {∞}. Infinity is the largest representable value so
/// that the natural order of the integers extends to N∞.
using ExtNat = std::int64_t;

inline constexpr ExtNat kInfinity = std::numeric_limits<std::int64_t>::max();

constexpr bool is_infinite(ExtNat v) { return v == kInfinity; }

/// v + d with ∞ + d = ∞.
constexpr ExtNat shifted(ExtNat v, std::int64_t d) { return is_infinite(v) ? kInfinity : v + d; }

/// A letter of one of the supported compact alphabets.
///
/// The interpretation of the payload depends on the kind:
///   Symbol      - index into the finite symbol list
///   Nat         - element of N∞ (kInfinity is the point at infinity)
///   Pair        - element of N∞ × N∞
///   CircleOrbit - the point k·α of the circle
///   CircleGrid  - the point j/q of a full turn
class Letter {
 public:
  enum class Kind : std::uint8_t { Symbol, Nat, Pair, CircleOrbit, CircleGrid };

  constexpr Letter() = default;

  static constexpr Letter symbol(std::int64_t index) { return {Kind::Symbol, index, 0}; }
  static constexpr Letter nat(ExtNat n) { return {Kind::Nat, n, 0}; }
  static constexpr Letter inf() { return {Kind::Nat, kInfinity, 0}; }
  static constexpr Letter pair(ExtNat a, ExtNat b) { return {Kind::Pair, a, b}; }
  static constexpr Letter orbit(std::int64_t k) { return {Kind::CircleOrbit, k, 0}; }
  static constexpr Letter grid(std::int64_t j, std::int64_t q) { return {Kind::CircleGrid, j, q}; }

  constexpr Kind kind() const { return kind_; }
  constexpr std::int64_t first() const { return first_; }
  constexpr std::int64_t second() const { return second_; }

  /// True for Inf, and for pairs with at least one infinite component.
  constexpr bool has_infinity() const {
    if (kind_ == Kind::Nat) return is_infinite(first_);
    if (kind_ == Kind::Pair) return is_infinite(first_) || is_infinite(second_);
    return false;
  }

  friend constexpr auto operator<=>(const Letter&, const Letter&) = default;
  friend constexpr bool operator==(const Letter&, const Letter&) = default;

 private:
  constexpr Letter(Kind k, std::int64_t a, std::int64_t b) : kind_(k), first_(a), second_(b) {}

  Kind kind_ = Kind::Nat;
  std::int64_t first_ = 0;
  std::int64_t second_ = 0;
};

using Word = std::vector<Letter>;

struct LetterHash {
  std::size_t operator()(const Letter& a) const noexcept {
    std::uint64_t h = static_cast<std::uint64_t>(a.kind()) * 0x9e3779b97f4a7c15ULL;
    h ^= static_cast<std::uint64_t>(a.first()) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h ^= static_cast<std::uint64_t>(a.second()) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

}  // namespace subkit
