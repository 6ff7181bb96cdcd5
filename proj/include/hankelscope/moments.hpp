#pragma once

// Log-moments log M(beta), M(beta) = || z^beta ||^2 in L^2(domain, Lebesgue).
//
// For a complete Reinhardt domain the angular integrals factor out, leaving
//
//   M(beta) = 4 pi^2 / (2 b2 + 2) * Int_0^{R1} x^(2 b1 + 1) tau(x)^(2 b2 + 2) dx.
//
// Everything is stored as a natural log: M underflows long before the
// eigenvalue formulas (which only need ratios) stop being meaningful.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <numbers>
#include <optional>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "domain.hpp"
#include "errors.hpp"
#include "gauss_legendre.hpp"
#include "multi_index.hpp"

namespace hankelscope {

struct QuadratureStats {
  int max_nodes_per_segment = 0;
  std::size_t evaluations = 0;
  /// Bound on the relative rounding error of any quadrature sum so far.
  double max_error_estimate = 0.0;
};

/// Memo table MultiIndex -> log M for one domain. Concurrent reads, serialized
/// inserts. Optionally backed by an append-only text file that is read on the
/// first lookup.
class MomentTable {
 public:
  explicit MomentTable(std::string domain_hash) : hash_(std::move(domain_hash)) {}
  explicit MomentTable(const ShadowDomain& d) : MomentTable(d.identity_hash()) {}

  MomentTable(const MomentTable&) = delete;
  MomentTable& operator=(const MomentTable&) = delete;

  const std::string& domain_hash() const noexcept { return hash_; }

  std::optional<double> find(MultiIndex beta) const {
    ensure_loaded();
    std::shared_lock lock(mu_);
    auto it = entries_.find(beta);
    if (it == entries_.end()) return std::nullopt;
    return it->second.log_moment;
  }

  /// Returns false (and keeps the old value) if beta is already present.
  bool insert(MultiIndex beta, double log_moment) {
    if (!std::isfinite(log_moment))
      throw std::invalid_argument("MomentTable: non-finite log-moment");
    ensure_loaded();
    std::unique_lock lock(mu_);
    auto [it, inserted] = entries_.try_emplace(beta, Entry{log_moment, false});
    if (inserted) ++computed_;
    return inserted;
  }

  std::size_t size() const {
    ensure_loaded();
    std::shared_lock lock(mu_);
    return entries_.size();
  }

  /// Entries computed in this process (not loaded from the backing file).
  std::size_t computed_count() const {
    std::shared_lock lock(mu_);
    return computed_;
  }

  /// Sorted by (|beta|, beta1).
  std::vector<std::pair<MultiIndex, double>> entries() const {
    ensure_loaded();
    std::vector<std::pair<MultiIndex, double>> out;
    {
      std::shared_lock lock(mu_);
      out.reserve(entries_.size());
      for (const auto& [k, e] : entries_) out.emplace_back(k, e.log_moment);
    }
    std::sort(out.begin(), out.end(), [](const auto& l, const auto& r) {
      if (l.first.order() != r.first.order()) return l.first.order() < r.first.order();
      return l.first.a1 < r.first.a1;
    });
    return out;
  }

  QuadratureStats quadrature_stats() const {
    std::shared_lock lock(mu_);
    return stats_;
  }

  void note_quadrature(int nodes_per_segment, std::size_t evaluations, double error_estimate) {
    std::unique_lock lock(mu_);
    stats_.max_nodes_per_segment = std::max(stats_.max_nodes_per_segment, nodes_per_segment);
    stats_.evaluations += evaluations;
    stats_.max_error_estimate = std::max(stats_.max_error_estimate, error_estimate);
  }

  // -- persistence ---------------------------------------------------------

  std::string header_line() const { return "# domain " + hash_ + " version 1"; }

  /// Attach a cache file. Nothing is read until the first lookup.
  void attach_file(std::filesystem::path path) {
    std::unique_lock lock(mu_);
    path_ = std::move(path);
  }

  const std::optional<std::filesystem::path>& backing_file() const noexcept { return path_; }

  /// Parse "b1 b2 logM" records after a matching header.
  void load(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) return;
    if (line != header_line())
      throw CacheIoError("moment cache header mismatch: expected '" + header_line() + "', got '" +
                         line + "'");
    std::unique_lock lock(mu_);
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      std::istringstream rec(line);
      MultiIndex beta;
      std::string value;
      if (!(rec >> beta.a1 >> beta.a2 >> value) || beta.a1 < 0 || beta.a2 < 0)
        throw CacheIoError("malformed moment cache record at line " + std::to_string(lineno));
      char* end = nullptr;
      double v = std::strtod(value.c_str(), &end);
      if (*end != '\0' || !std::isfinite(v))
        throw CacheIoError("malformed log-moment at line " + std::to_string(lineno));
      entries_.try_emplace(beta, Entry{v, true});
    }
  }

  /// Write the header and every entry.
  void save(std::ostream& out) const {
    out << header_line() << '\n';
    for (const auto& [beta, v] : entries()) write_record(out, beta, v);
  }

  /// Append entries not yet on disk to the backing file. Single writer.
  std::size_t flush() {
    if (!path_) return 0;
    ensure_loaded();
    std::unique_lock lock(mu_);
    std::vector<std::pair<MultiIndex, double>> fresh;
    for (const auto& [k, e] : entries_)
      if (!e.persisted) fresh.emplace_back(k, e.log_moment);
    if (fresh.empty()) return 0;
    std::sort(fresh.begin(), fresh.end());

    std::error_code ec;
    bool has_header = std::filesystem::exists(*path_, ec) && std::filesystem::file_size(*path_, ec) > 0;
    std::ofstream out(*path_, std::ios::app);
    if (!out) throw CacheIoError("cannot open moment cache for append: " + path_->string());
    if (!has_header) out << header_line() << '\n';
    for (const auto& [beta, v] : fresh) write_record(out, beta, v);
    out.flush();
    if (!out) throw CacheIoError("write failed on moment cache: " + path_->string());
    for (const auto& [beta, v] : fresh) entries_[beta].persisted = true;
    return fresh.size();
  }

  /// Set once the owning domain has been checked for identity and completeness.
  bool verified() const noexcept { return verified_.load(std::memory_order_acquire); }
  void mark_verified() noexcept { verified_.store(true, std::memory_order_release); }

 private:
  struct Entry {
    double log_moment = 0.0;
    bool persisted = false;
  };

  static void write_record(std::ostream& out, MultiIndex beta, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%d %d %.17g\n", beta.a1, beta.a2, v);
    out << buf;
  }

  void ensure_loaded() const {
    std::call_once(load_once_, [this] {
      std::optional<std::filesystem::path> path;
      {
        std::shared_lock lock(mu_);
        path = path_;
      }
      if (!path) return;
      std::ifstream in(*path);
      if (!in) return;  // nothing cached yet
      const_cast<MomentTable*>(this)->load(in);
    });
  }

  std::string hash_;
  mutable std::shared_mutex mu_;
  mutable std::once_flag load_once_;
  std::unordered_map<MultiIndex, Entry, MultiIndexHash> entries_;
  std::size_t computed_ = 0;
  QuadratureStats stats_;
  std::optional<std::filesystem::path> path_;
  std::atomic<bool> verified_{false};
};

namespace detail {

inline long double log_pi_sq() { return 2.0L * std::log(std::numbers::pi_v<long double>); }

inline void require_index(MultiIndex beta) {
  if (beta.a1 < 0 || beta.a2 < 0) throw std::invalid_argument("multi-index must be nonnegative");
}

}  // namespace detail

/// Exact log-moment for the preset shapes. Throws UnsupportedError on polygons.
///
///   bidisk(r, s): pi^2 r^(2b1+2) s^(2b2+2) / ((b1+1)(b2+1))
///   ball(R):      pi^2 R^(2|b|+4) b1! b2! / (|b|+2)!
///   egg(p, q, c): 4 pi^2 c^(2|b|+4) / (p q) * G(u) G(v) / G(u+v+1),
///                 u = (2b1+2)/p, v = (2b2+2)/q   (Dirichlet integral)
inline double closed_form_log_moment(const ShadowDomain& d, MultiIndex beta) {
  detail::require_index(beta);
  const long double b1 = beta.a1, b2 = beta.a2;
  const long double order = b1 + b2;
  if (const auto* k = std::get_if<Bidisk>(&d.kind())) {
    return static_cast<double>(detail::log_pi_sq() + (2 * b1 + 2) * std::log((long double)k->r) +
                               (2 * b2 + 2) * std::log((long double)k->s) - std::log(b1 + 1) -
                               std::log(b2 + 1));
  }
  if (const auto* k = std::get_if<Ball>(&d.kind())) {
    return static_cast<double>(detail::log_pi_sq() +
                               (2 * order + 4) * std::log((long double)k->radius) +
                               std::lgamma(b1 + 1) + std::lgamma(b2 + 1) - std::lgamma(order + 3));
  }
  if (const auto* k = std::get_if<Egg>(&d.kind())) {
    const long double p = k->p, q = k->q;
    const long double u = (2 * b1 + 2) / p, v = (2 * b2 + 2) / q;
    return static_cast<double>(std::log(4.0L) + detail::log_pi_sq() - std::log(p * q) +
                               (2 * order + 4) * std::log((long double)k->scale) + std::lgamma(u) +
                               std::lgamma(v) - std::lgamma(u + v + 1));
  }
  throw UnsupportedError("closed_form_log_moment: no closed form for polygon shadows");
}

/// Gauss-Legendre nodes per linear segment used for beta: the integrand
/// x^(2b1+1) tau(x)^(2b2+2) is a polynomial of degree 2|b|+3 there.
inline int polygon_nodes_per_segment(MultiIndex beta) { return beta.order() + 4; }

namespace detail {

inline double polygon_log_moment(const PolygonShadow& poly, MultiIndex beta, MomentTable& table) {
  const int n = polygon_nodes_per_segment(beta);
  const auto& rule = gauss_legendre(n);
  const long double ex = 2.0L * beta.a1 + 1, ey = 2.0L * beta.a2 + 2;

  std::vector<long double> logs;
  logs.reserve(poly.vertices.size() * n);
  const auto& v = poly.vertices;
  for (std::size_t i = 1; i < v.size(); ++i) {
    const long double x0 = v[i - 1].x, x1 = v[i].x;
    const long double y0 = v[i - 1].y, y1 = v[i].y;
    if (x1 == x0) continue;  // vertical edge, no area under it
    const long double half = 0.5L * (x1 - x0), mid = 0.5L * (x1 + x0);
    const long double slope = (y1 - y0) / (x1 - x0);
    for (int k = 0; k < n; ++k) {
      long double x = mid + half * rule.nodes[k];
      long double y = y0 + (x - x0) * slope;
      if (!(x > 0.0L) || !(y > 0.0L)) continue;
      logs.push_back(std::log(rule.weights[k] * half) + ex * std::log(x) + ey * std::log(y));
    }
  }
  if (logs.empty()) throw PreconditionError("polygon shadow has empty interior");
  long double peak = *std::max_element(logs.begin(), logs.end());
  long double acc = 0.0L;
  for (long double l : logs) acc += std::exp(l - peak);
  long double result = std::log(4.0L) + log_pi_sq() - std::log(ey) + peak + std::log(acc);

  double err = static_cast<double>((ex + ey + 4.0L) * std::numeric_limits<long double>::epsilon());
  table.note_quadrature(n, logs.size(), err);
  return static_cast<double>(result);
}

inline void verify_table(const ShadowDomain& d, MomentTable& table) {
  if (table.verified()) return;
  if (table.domain_hash() != d.identity_hash())
    throw PreconditionError("moment table belongs to domain " + table.domain_hash() +
                            ", not " + d.identity_hash());
  if (auto c = check_complete(d); !c)
    throw PreconditionError("moments require a complete domain: " + c.detail);
  table.mark_verified();
}

}  // namespace detail

/// log M(beta), memoized in `table`. Closed form on presets, exact
/// per-segment Gauss-Legendre on polygon shadows.
inline double log_moment(const ShadowDomain& d, MultiIndex beta, MomentTable& table) {
  detail::require_index(beta);
  if (auto hit = table.find(beta)) return *hit;
  detail::verify_table(d, table);
  double value = d.is_preset() ? closed_form_log_moment(d, beta)
                               : detail::polygon_log_moment(*d.polygon_shadow(), beta, table);
  table.insert(beta, value);
  return value;
}

/// <z^a conj(z)^b, z^c conj(z)^d> in L^2(domain). Zero unless the torus
/// grades a-b and c-d coincide; then equal to M(a+d).
inline std::complex<double> monomial_inner(MultiIndex a, MultiIndex b, MultiIndex c, MultiIndex d,
                                           const ShadowDomain& domain, MomentTable& table) {
  if (grade_of(a, b) != grade_of(c, d)) return {0.0, 0.0};
  return {std::exp(log_moment(domain, a + d, table)), 0.0};
}

/// Fill every |beta| <= degree_bound and persist to the backing file if any.
/// Returns the number of table entries with |beta| <= degree_bound.
inline std::size_t warm_cache(const ShadowDomain& d, int degree_bound, MomentTable& table) {
  if (degree_bound < 0) throw std::invalid_argument("warm_cache: degree_bound must be >= 0");
  std::size_t count = 0;
  for (int total = 0; total <= degree_bound; ++total) {
    for (int b1 = 0; b1 <= total; ++b1) {
      log_moment(d, {b1, total - b1}, table);
      ++count;
    }
  }
  table.flush();
  return count;
}

}  // namespace hankelscope
