#pragma once

// Bounded complete Reinhardt domains in C^2, represented by their absolute
// shadow {(|z1|, |z2|)} in the closed first quadrant.
//
// A complete Reinhardt domain is determined by the upper boundary of its
// shadow. `profile_tau(x)` is that boundary seen as a function of |z1|:
// the slice {|z1| = x} of the domain is the disk |z2| < tau(x).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "errors.hpp"

namespace hankelscope {

struct ShadowPoint {
  double x = 0.0;  // |z1| extent
  double y = 0.0;  // |z2| extent

  friend bool operator==(const ShadowPoint&, const ShadowPoint&) = default;
};

struct Bidisk {
  double r = 1.0;
  double s = 1.0;
  friend bool operator==(const Bidisk&, const Bidisk&) = default;
};

struct Ball {
  double radius = 1.0;
  friend bool operator==(const Ball&, const Ball&) = default;
};

/// |z1/scale|^p + |z2/scale|^q < 1.
struct Egg {
  double p = 2.0;
  double q = 2.0;
  double scale = 1.0;
  friend bool operator==(const Egg&, const Egg&) = default;
};

/// Piecewise-linear upper boundary from (0, y0) to (x_last, 0).
struct PolygonShadow {
  std::vector<ShadowPoint> vertices;
  friend bool operator==(const PolygonShadow&, const PolygonShadow&) = default;
};

using ShadowKind = std::variant<Bidisk, Ball, Egg, PolygonShadow>;

namespace detail {

inline bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace detail

/// Immutable value describing a bounded complete Reinhardt domain.
class ShadowDomain {
 public:
  static ShadowDomain bidisk(double r, double s) {
    if (!detail::positive_finite(r) || !detail::positive_finite(s))
      throw std::invalid_argument("bidisk radii must be positive and finite");
    return ShadowDomain(Bidisk{r, s});
  }

  static ShadowDomain ball(double radius) {
    if (!detail::positive_finite(radius))
      throw std::invalid_argument("ball radius must be positive and finite");
    return ShadowDomain(Ball{radius});
  }

  static ShadowDomain egg(double p, double q, double scale = 1.0) {
    if (!std::isfinite(p) || p < 1.0) throw std::invalid_argument("p must be >= 1 for convexity");
    if (!std::isfinite(q) || q < 1.0) throw std::invalid_argument("q must be >= 1 for convexity");
    if (!detail::positive_finite(scale)) throw std::invalid_argument("scale must be positive");
    return ShadowDomain(Egg{p, q, scale});
  }

  /// Structural validation only; monotonicity is left to check_complete.
  static ShadowDomain polygon(std::vector<ShadowPoint> vertices) {
    if (vertices.size() < 2) throw std::invalid_argument("polygon needs at least two vertices");
    for (const auto& v : vertices) {
      if (!std::isfinite(v.x) || !std::isfinite(v.y) || v.x < 0.0 || v.y < 0.0)
        throw std::invalid_argument("polygon coordinates must be finite and >= 0");
    }
    for (std::size_t i = 1; i < vertices.size(); ++i) {
      if (vertices[i] == vertices[i - 1])
        throw std::invalid_argument("degenerate (zero-length) polygon edge at vertex " +
                                    std::to_string(i));
    }
    if (vertices.front().x != 0.0 || !(vertices.front().y > 0.0))
      throw std::invalid_argument("polygon must start at (0, y) with y > 0");
    if (vertices.back().y != 0.0 || !(vertices.back().x > 0.0))
      throw std::invalid_argument("polygon must end at (x, 0) with x > 0");
    return ShadowDomain(PolygonShadow{std::move(vertices)});
  }

  const ShadowKind& kind() const noexcept { return kind_; }
  bool is_preset() const noexcept { return !std::holds_alternative<PolygonShadow>(kind_); }
  const PolygonShadow* polygon_shadow() const noexcept { return std::get_if<PolygonShadow>(&kind_); }

  /// sup |z1| over the domain.
  double r1_max() const noexcept { return r1_max_; }
  /// sup |z2| over the domain.
  double r2_max() const noexcept { return r2_max_; }

  /// Stable textual identity; two domains are the same iff these agree.
  const std::string& canonical_text() const noexcept { return canonical_; }
  /// 16 hex digits of FNV-1a over canonical_text().
  std::string identity_hash() const {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(detail::fnv1a(canonical_)));
    return buf;
  }

  /// Every shadow coordinate multiplied by c.
  ShadowDomain scaled(double c) const {
    if (!detail::positive_finite(c)) throw std::invalid_argument("scale factor must be positive");
    return std::visit(
        [c](const auto& k) -> ShadowDomain {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, Bidisk>) {
            return bidisk(k.r * c, k.s * c);
          } else if constexpr (std::is_same_v<K, Ball>) {
            return ball(k.radius * c);
          } else if constexpr (std::is_same_v<K, Egg>) {
            return egg(k.p, k.q, k.scale * c);
          } else {
            auto v = k.vertices;
            for (auto& pt : v) {
              pt.x *= c;
              pt.y *= c;
            }
            return polygon(std::move(v));
          }
        },
        kind_);
  }

  friend bool operator==(const ShadowDomain& a, const ShadowDomain& b) { return a.kind_ == b.kind_; }

 private:
  explicit ShadowDomain(ShadowKind kind) : kind_(std::move(kind)) {
    std::visit(
        [this](const auto& k) {
          using K = std::decay_t<decltype(k)>;
          using detail::fmt17;
          if constexpr (std::is_same_v<K, Bidisk>) {
            r1_max_ = k.r;
            r2_max_ = k.s;
            canonical_ = "bidisk " + fmt17(k.r) + " " + fmt17(k.s);
          } else if constexpr (std::is_same_v<K, Ball>) {
            r1_max_ = r2_max_ = k.radius;
            canonical_ = "ball " + fmt17(k.radius);
          } else if constexpr (std::is_same_v<K, Egg>) {
            r1_max_ = r2_max_ = k.scale;
            canonical_ = "egg " + fmt17(k.p) + " " + fmt17(k.q) + " " + fmt17(k.scale);
          } else {
            r1_max_ = r2_max_ = 0.0;
            canonical_ = "polygon";
            for (const auto& v : k.vertices) {
              r1_max_ = std::max(r1_max_, v.x);
              r2_max_ = std::max(r2_max_, v.y);
              canonical_ += " " + fmt17(v.x) + "," + fmt17(v.y);
            }
          }
        },
        kind_);
  }

  ShadowKind kind_;
  double r1_max_ = 0.0;
  double r2_max_ = 0.0;
  std::string canonical_;
};

namespace detail {

// Largest y over polygon points with abscissa x (swap=false), or the mirror
// statement with the roles of x and y exchanged (swap=true).
inline double polyline_extent(const std::vector<ShadowPoint>& v, double t, bool swap) {
  double best = 0.0;
  bool hit = false;
  for (std::size_t i = 1; i < v.size(); ++i) {
    double u0 = swap ? v[i - 1].y : v[i - 1].x;
    double u1 = swap ? v[i].y : v[i].x;
    double w0 = swap ? v[i - 1].x : v[i - 1].y;
    double w1 = swap ? v[i].x : v[i].y;
    double lo = std::min(u0, u1), hi = std::max(u0, u1);
    if (t < lo || t > hi) continue;
    double w;
    if (u0 == u1) {
      w = std::max(w0, w1);
    } else if (t == u0) {
      w = w0;
    } else if (t == u1) {
      w = w1;
    } else {
      w = w0 + (t - u0) * (w1 - w0) / (u1 - u0);
    }
    best = hit ? std::max(best, w) : w;
    hit = true;
  }
  return hit ? std::max(best, 0.0) : 0.0;
}

// (1 - t^p)^(1/q) without losing digits near t = 1.
inline double superellipse_arc(double t, double p, double q) {
  if (t >= 1.0) return 0.0;
  double one_minus = -std::expm1(p * std::log(t));
  if (t == 0.0) one_minus = 1.0;
  return std::pow(one_minus, 1.0 / q);
}

}  // namespace detail

/// sup{|z2| : z in domain, |z1| = x}. Throws DomainError outside [0, R1_max].
inline double profile_tau(const ShadowDomain& d, double x) {
  if (!(x >= 0.0) || x > d.r1_max())
    throw DomainError("profile_tau: x = " + detail::fmt17(x) + " outside [0, R1_max]");
  return std::visit(
      [x](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Bidisk>) {
          return k.s;
        } else if constexpr (std::is_same_v<K, Ball>) {
          return std::sqrt((k.radius - x) * (k.radius + x));
        } else if constexpr (std::is_same_v<K, Egg>) {
          return k.scale * detail::superellipse_arc(x / k.scale, k.p, k.q);
        } else {
          return detail::polyline_extent(k.vertices, x, false);
        }
      },
      d.kind());
}

/// sup{|z1| : z in domain, |z2| = y}. Throws DomainError outside [0, R2_max].
inline double profile_sigma(const ShadowDomain& d, double y) {
  if (!(y >= 0.0) || y > d.r2_max())
    throw DomainError("profile_sigma: y = " + detail::fmt17(y) + " outside [0, R2_max]");
  return std::visit(
      [y](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Bidisk>) {
          return k.r;
        } else if constexpr (std::is_same_v<K, Ball>) {
          return std::sqrt((k.radius - y) * (k.radius + y));
        } else if constexpr (std::is_same_v<K, Egg>) {
          return k.scale * detail::superellipse_arc(y / k.scale, k.q, k.p);
        } else {
          return detail::polyline_extent(k.vertices, y, true);
        }
      },
      d.kind());
}

struct CheckReport {
  bool ok = false;
  std::string detail;  // first violation found, empty when ok
  explicit operator bool() const noexcept { return ok; }
};

inline constexpr int kProfileGridPoints = 1024;

namespace detail {

inline std::vector<double> profile_grid(const ShadowDomain& d) {
  std::vector<double> xs;
  xs.reserve(kProfileGridPoints + 1);
  for (int i = 0; i <= kProfileGridPoints; ++i)
    xs.push_back(d.r1_max() * static_cast<double>(i) / kProfileGridPoints);
  if (const auto* poly = d.polygon_shadow()) {
    for (const auto& v : poly->vertices) xs.push_back(v.x);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

}  // namespace detail

/// tau nonincreasing on a dense grid (plus polygon vertices), tolerance 1e-12.
inline CheckReport check_complete(const ShadowDomain& d) {
  constexpr double tol = 1e-12;
  if (const auto* poly = d.polygon_shadow()) {
    const auto& v = poly->vertices;
    for (std::size_t i = 1; i < v.size(); ++i) {
      if (v[i].x < v[i - 1].x || v[i].y > v[i - 1].y)
        return {false, "polygon vertex " + std::to_string(i) +
                           " breaks monotone ordering (x nondecreasing, y nonincreasing)"};
    }
  }
  if (!(profile_tau(d, 0.0) > 0.0)) return {false, "tau(0) must be positive"};
  auto xs = detail::profile_grid(d);
  double prev = profile_tau(d, xs.front());
  for (std::size_t i = 1; i < xs.size(); ++i) {
    double cur = profile_tau(d, xs[i]);
    if (cur > prev + tol)
      return {false, "profile increases at x = " + detail::fmt17(xs[i])};
    prev = cur;
  }
  return {true, {}};
}

/// Concavity of tau, i.e. convexity of the domain. Exact turn test on polygon
/// vertices, sampled midpoint test on presets.
inline CheckReport check_convex(const ShadowDomain& d) {
  constexpr double tol = 1e-12;
  if (auto c = check_complete(d); !c) return {false, "not complete: " + c.detail};
  if (const auto* poly = d.polygon_shadow()) {
    const auto& v = poly->vertices;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
      double dx1 = v[i].x - v[i - 1].x, dy1 = v[i].y - v[i - 1].y;
      double dx2 = v[i + 1].x - v[i].x, dy2 = v[i + 1].y - v[i].y;
      double cross = dx1 * dy2 - dy1 * dx2;
      double scale = std::hypot(dx1, dy1) * std::hypot(dx2, dy2);
      if (cross > tol * scale) return {false, "reflex vertex " + std::to_string(i)};
    }
    return {true, {}};
  }
  constexpr int samples = 256;
  std::vector<double> xs(samples + 1), tau(samples + 1);
  for (int i = 0; i <= samples; ++i) {
    xs[i] = d.r1_max() * static_cast<double>(i) / samples;
    tau[i] = profile_tau(d, xs[i]);
  }
  for (int a = 0; a <= samples; ++a) {
    for (int b = a + 2; b <= samples; b += 2) {
      double mid = profile_tau(d, xs[(a + b) / 2]);
      if (mid < 0.5 * (tau[a] + tau[b]) - tol)
        return {false, "midpoint concavity fails on [" + detail::fmt17(xs[a]) + ", " +
                           detail::fmt17(xs[b]) + "]"};
    }
  }
  return {true, {}};
}

/// Gamma1 = closed disk of radius r1 (in z1) times circle of radius s1 (in z2).
struct Gamma1 {
  double r1 = 0.0;
  double s1 = 0.0;
  friend bool operator==(const Gamma1&, const Gamma1&) = default;
};

/// Gamma2 = circle of radius s2 (in z1) times closed disk of radius r2 (in z2).
struct Gamma2 {
  double s2 = 0.0;
  double r2 = 0.0;
  friend bool operator==(const Gamma2&, const Gamma2&) = default;
};

struct GammaReport {
  std::optional<Gamma1> gamma1;
  std::optional<Gamma2> gamma2;
  double flat_eps = 0.0;
  double len_eps = 0.0;
  bool exact = false;  // preset structural answer, tolerances unused
};

struct GammaTolerances {
  double flat_eps;
  double len_eps;
};

inline GammaTolerances default_gamma_tolerances(const ShadowDomain& d) {
  return {1e-9 * d.r2_max(), 1e-6 * d.r1_max()};
}

namespace detail {

// Walks the vertices outward from the axis while the far coordinate stays at
// or above `level`; returns the near coordinate of the last such vertex.
inline double last_at_or_above(const std::vector<ShadowPoint>& v, double level, bool swap) {
  double best = 0.0;
  const std::size_t n = v.size();
  for (std::size_t k = 0; k < n; ++k) {
    const ShadowPoint& p = swap ? v[n - 1 - k] : v[k];
    if ((swap ? p.x : p.y) < level) break;
    best = swap ? p.y : p.x;
  }
  return best;
}

}  // namespace detail

/// Flat pieces of the shadow boundary adjacent to the axes: a horizontal flat
/// at the top gives Gamma1, a vertical flat at the right gives Gamma2. Only
/// the maximal flat touching the axis is reported.
inline GammaReport detect_gamma(const ShadowDomain& d, double flat_eps, double len_eps) {
  if (!(flat_eps > 0.0) || !(len_eps > 0.0))
    throw std::invalid_argument("detect_gamma: tolerances must be positive");
  if (auto c = check_complete(d); !c)
    throw PreconditionError("detect_gamma requires a complete domain: " + c.detail);

  GammaReport rep;
  rep.flat_eps = flat_eps;
  rep.len_eps = len_eps;
  if (const auto* b = std::get_if<Bidisk>(&d.kind())) {
    rep.exact = true;
    rep.gamma1 = Gamma1{b->r, b->s};
    rep.gamma2 = Gamma2{b->r, b->s};
    return rep;
  }
  if (d.is_preset()) {
    // Ball and egg profiles are strictly decreasing with no flat pieces.
    rep.exact = true;
    return rep;
  }

  const auto& v = d.polygon_shadow()->vertices;
  double s1 = profile_tau(d, 0.0);
  double r1 = detail::last_at_or_above(v, s1 - flat_eps, false);
  if (r1 >= len_eps) rep.gamma1 = Gamma1{r1, s1};

  double s2 = profile_sigma(d, 0.0);
  double r2 = detail::last_at_or_above(v, s2 - flat_eps, true);
  if (r2 >= len_eps) rep.gamma2 = Gamma2{s2, r2};
  return rep;
}

inline GammaReport detect_gamma(const ShadowDomain& d) {
  auto tol = default_gamma_tolerances(d);
  return detect_gamma(d, tol.flat_eps, tol.len_eps);
}

}  // namespace hankelscope
