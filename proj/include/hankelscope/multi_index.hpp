#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <optional>
#include <ostream>

namespace hankelscope {

/// Exponent pair (a1, a2) of the monomial z1^a1 z2^a2. Both components >= 0.
struct MultiIndex {
  int a1 = 0;
  int a2 = 0;

  constexpr int order() const noexcept { return a1 + a2; }
  constexpr bool is_zero() const noexcept { return a1 == 0 && a2 == 0; }

  friend constexpr bool operator==(const MultiIndex&, const MultiIndex&) = default;
  // Lexicographic; only used for ordered containers.
  friend constexpr auto operator<=>(const MultiIndex&, const MultiIndex&) = default;
};

constexpr MultiIndex operator+(MultiIndex a, MultiIndex b) noexcept {
  return {a.a1 + b.a1, a.a2 + b.a2};
}

/// Componentwise a <= b.
constexpr bool componentwise_leq(MultiIndex a, MultiIndex b) noexcept {
  return a.a1 <= b.a1 && a.a2 <= b.a2;
}

/// n - j when n >= j componentwise, otherwise nothing.
constexpr std::optional<MultiIndex> checked_sub(MultiIndex n, MultiIndex j) noexcept {
  if (!componentwise_leq(j, n)) return std::nullopt;
  return MultiIndex{n.a1 - j.a1, n.a2 - j.a2};
}

/// Signed torus weight: psi(zeta z) = zeta^g psi(z).
struct GradeIndex {
  int g1 = 0;
  int g2 = 0;

  friend constexpr bool operator==(const GradeIndex&, const GradeIndex&) = default;
};

/// Grade of z^holo * conj(z)^anti.
constexpr GradeIndex grade_of(MultiIndex holo, MultiIndex anti) noexcept {
  return {holo.a1 - anti.a1, holo.a2 - anti.a2};
}

struct MultiIndexHash {
  std::size_t operator()(MultiIndex m) const noexcept {
    return std::hash<long long>{}((static_cast<long long>(m.a1) << 32) ^
                                  static_cast<unsigned int>(m.a2));
  }
};

inline std::ostream& operator<<(std::ostream& os, MultiIndex m) {
  return os << '(' << m.a1 << ',' << m.a2 << ')';
}

}  // namespace hankelscope
