#pragma once

// Hankel operators H_{conj f} on the Bergman space of a complete Reinhardt
// domain, for monomial and polynomial f, acting on the orthonormal monomial
// basis e_n = z^n / ||z^n||.

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <optional>

#include "domain.hpp"
#include "moments.hpp"
#include "multi_index.hpp"

namespace hankelscope {

/// f = sum c_{jk} z1^j z2^k with finitely many nonzero coefficients. The
/// operator of interest is H with symbol conj(f).
class PolySymbol {
 public:
  static constexpr double kNegligible = 1e-300;

  PolySymbol() = default;

  /// Adds c to the coefficient of z1^j z2^k; negligible results are dropped.
  PolySymbol& add(MultiIndex jk, std::complex<double> c) {
    if (jk.a1 < 0 || jk.a2 < 0) throw std::invalid_argument("PolySymbol: negative exponent");
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      throw std::invalid_argument("PolySymbol: non-finite coefficient");
    auto total = terms_[jk] + c;
    if (std::abs(total) < kNegligible) {
      terms_.erase(jk);
    } else {
      terms_[jk] = total;
    }
    return *this;
  }

  static PolySymbol monomial(MultiIndex jk, std::complex<double> c = 1.0) {
    return PolySymbol{}.add(jk, c);
  }

  const std::map<MultiIndex, std::complex<double>>& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  bool is_constant() const noexcept {
    return std::all_of(terms_.begin(), terms_.end(), [](const auto& t) { return t.first.is_zero(); });
  }
  int degree() const noexcept {
    int d = 0;
    for (const auto& [k, c] : terms_) d = std::max(d, k.order());
    return d;
  }

  friend bool operator==(const PolySymbol&, const PolySymbol&) = default;

 private:
  std::map<MultiIndex, std::complex<double>> terms_;
};

/// Symbolic form of H_{conj(z^j)} e_n:
///
///   anti_coeff * conj(z)^j z^n  -  correction.coeff * z^(n-j)
///
/// with anti_coeff = 1/||z^n|| and correction.coeff = ||z^n|| / ||z^(n-j)||^2.
/// The correction (the Bergman projection) is present iff n >= j.
struct HankelAction {
  struct Correction {
    MultiIndex index;
    double coeff = 0.0;
  };

  MultiIndex j;
  MultiIndex n;
  double anti_coeff = 0.0;
  std::optional<Correction> correction;

  /// ||action||^2 expanded with monomial inner products.
  double norm_sq(const ShadowDomain& d, MomentTable& table) const {
    double total = anti_coeff * anti_coeff * monomial_inner(n, j, n, j, d, table).real();
    if (correction) {
      const auto& c = *correction;
      double cross = monomial_inner(n, j, c.index, {}, d, table).real();
      total += -2.0 * anti_coeff * c.coeff * cross +
               c.coeff * c.coeff * monomial_inner(c.index, {}, c.index, {}, d, table).real();
    }
    return total;
  }
};

/// <P(conj(z)^j e_n), e_(n-j)> = ||z^n|| / ||z^(n-j)||, or 0 when n - j has a
/// negative component (the projection vanishes).
inline double projection_coeff(const ShadowDomain& d, MultiIndex j, MultiIndex n, MomentTable& table) {
  auto rest = checked_sub(n, j);
  if (!rest) return 0.0;
  if (j.is_zero()) return 1.0;
  return std::exp(0.5 * (log_moment(d, n, table) - log_moment(d, *rest, table)));
}

inline HankelAction hankel_action(const ShadowDomain& d, MultiIndex j, MultiIndex n, MomentTable& table) {
  HankelAction act{j, n, 0.0, std::nullopt};
  const double log_mn = log_moment(d, n, table);
  act.anti_coeff = std::exp(-0.5 * log_mn);
  if (auto rest = checked_sub(n, j)) {
    act.correction = HankelAction::Correction{*rest, std::exp(0.5 * log_mn - log_moment(d, *rest, table))};
  }
  return act;
}

namespace detail {

// e^a - e^b evaluated as e^b expm1(a - b).
inline double exp_difference(double a, double b) { return std::exp(b) * std::expm1(a - b); }

}  // namespace detail

/// Eigenvalue of H*H for the symbol conj(z^alpha) at e_n, i.e. ||H e_n||^2:
///
///   M(n+alpha)/M(n) - M(n)/M(n-alpha)   if n >= alpha
///   M(n+alpha)/M(n)                     otherwise
///
/// The difference is taken through expm1 so that small eigenvalues at large
/// |n| keep their relative accuracy. Clamped at 0.
inline double hankel_eigenvalue(const ShadowDomain& d, MultiIndex alpha, MultiIndex n, MomentTable& table) {
  if (alpha.is_zero()) return 0.0;
  const double log_mn = log_moment(d, n, table);
  const double u = log_moment(d, n + alpha, table) - log_mn;
  auto rest = checked_sub(n, alpha);
  if (!rest) return std::exp(u);
  const double v = log_mn - log_moment(d, *rest, table);
  return std::max(0.0, detail::exp_difference(u, v));
}

/// <H e_j, H e_l> for the symbol conj(z^alpha):
///
///   <conj(z)^alpha e_j, conj(z)^alpha e_l> - <P(conj(z)^alpha e_j), P(conj(z)^alpha e_l)>
///
/// Both terms obey the torus-grading selection rule, so the result is an
/// exact zero whenever j != l.
inline double hankel_gram(const ShadowDomain& d, MultiIndex alpha, MultiIndex j, MultiIndex l,
                          MomentTable& table) {
  // Selection rule of monomial_inner(j, alpha, l, alpha); tested on grades
  // directly so that an underflowing moment cannot fake a zero.
  const bool first_nonzero = grade_of(j, alpha) == grade_of(l, alpha);
  auto pj = checked_sub(j, alpha);
  auto pl = checked_sub(l, alpha);
  const bool second_nonzero = pj && pl && *pj == *pl;
  if (!first_nonzero && !second_nonzero) return 0.0;

  const double half_norms = 0.5 * (log_moment(d, j, table) + log_moment(d, l, table));
  double log_first = log_moment(d, j + alpha, table) - half_norms;
  if (!second_nonzero) return std::exp(log_first);
  double log_second = half_norms - 0.5 * (log_moment(d, *pj, table) + log_moment(d, *pl, table));
  return detail::exp_difference(log_first, log_second);
}

/// ||H_{conj f} e_m||^2 = sum |c_jk|^2 lambda_(j,k)(m), by mutual
/// orthogonality of the graded pieces.
inline double symbol_norm_sq(const ShadowDomain& d, const PolySymbol& f, MultiIndex m, MomentTable& table) {
  double total = 0.0;
  for (const auto& [jk, c] : f.terms()) {
    if (jk.is_zero()) continue;
    total += std::norm(c) * hankel_eigenvalue(d, jk, m, table);
  }
  return total;
}

}  // namespace hankelscope
