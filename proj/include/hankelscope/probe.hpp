#pragma once

// Numerical compactness probe. A compact operator sends the weakly-null
// sequence e_m to a norm-null one, so ||H e_m||^2 must decay over the shells
// |m| = N. A plateau is numerical evidence of non-compactness; decay is only
// ever reported as "consistent with" compactness.

#include <algorithm>
#include <cmath>
#include <complex>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

#include "domain.hpp"
#include "errors.hpp"
#include "hankel.hpp"
#include "moments.hpp"

namespace hankelscope {

enum class Verdict { CompactConsistent, NonCompact, Inconclusive };
enum class Prediction { MustBeNonCompact, NoPrediction };

inline std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::CompactConsistent: return "CompactConsistent";
    case Verdict::NonCompact: return "NonCompact";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

inline std::string_view to_string(Prediction p) {
  return p == Prediction::MustBeNonCompact ? "MustBeNonCompact" : "NoPrediction";
}

/// Classifier thresholds. Every series is divided by its value at N_min
/// before the thresholds apply, which makes verdicts invariant under scaling
/// of the domain.
struct ScanThresholds {
  double tau_decay = 0.2;    // normalized S(N_max) at most this for decay
  double decay_ratio = 0.75;  // S(N_max) <= decay_ratio * S(mid)
  double tau_floor = 1e-4;   // plateau floor over the last half
  double var_tol = 0.05;     // plateau relative variation over the last half
};

struct TermSeries {
  MultiIndex index;
  std::complex<double> coeff;
  std::vector<double> shell_sup;  // S(N) for N = n_min .. n_max
  Verdict verdict = Verdict::Inconclusive;
};

struct DecayReport {
  int n_min = 0;
  int n_max = 0;
  ScanThresholds thresholds;
  std::vector<TermSeries> terms;
  std::vector<double> aggregate;  // max over the shell of ||H_{conj f} e_m||^2
  Verdict aggregate_verdict = Verdict::Inconclusive;
};

/// Max of lambda_alpha(m) over m1 + m2 = N.
inline double shell_sup(const ShadowDomain& d, MultiIndex alpha, int N, MomentTable& table) {
  if (N < 0) throw PreconditionError("shell_sup: N must be >= 0");
  if (alpha.is_zero()) return 0.0;
  double best = 0.0;
  for (int m1 = 0; m1 <= N; ++m1) best = std::max(best, hankel_eigenvalue(d, alpha, {m1, N - m1}, table));
  return best;
}

/// Plateau / decay classification of one shell series over [n_min, n_max].
inline Verdict classify_series(std::span<const double> series, int n_min, int n_max,
                               const ScanThresholds& th) {
  if (static_cast<int>(series.size()) != n_max - n_min + 1 || series.empty())
    throw std::invalid_argument("classify_series: length does not match the shell range");
  double ref = series.front();
  if (!(ref > 0.0)) ref = *std::max_element(series.begin(), series.end());
  if (!(ref > 0.0)) return Verdict::CompactConsistent;  // identically zero

  const int mid = (n_min + n_max + 1) / 2;
  auto at = [&](int N) { return series[N - n_min] / ref; };

  double lo = at(mid), hi = at(mid);
  for (int N = mid; N <= n_max; ++N) {
    lo = std::min(lo, at(N));
    hi = std::max(hi, at(N));
  }
  if (lo >= th.tau_floor && (hi - lo) / hi <= th.var_tol) return Verdict::NonCompact;
  if (at(n_max) <= th.tau_decay && at(n_max) <= th.decay_ratio * at(mid))
    return Verdict::CompactConsistent;
  return Verdict::Inconclusive;
}

inline Verdict aggregate_verdict(const std::vector<TermSeries>& terms) {
  bool all_compact = true;
  for (const auto& t : terms) {
    if (!t.index.is_zero() && t.verdict == Verdict::NonCompact) return Verdict::NonCompact;
    all_compact = all_compact && t.verdict == Verdict::CompactConsistent;
  }
  return all_compact ? Verdict::CompactConsistent : Verdict::Inconclusive;
}

inline constexpr double kScanWorkWarning = 1e7;

/// Eigenvalue evaluations needed by the per-term series of a decay scan.
inline double scan_work(const PolySymbol& f, int n_min, int n_max) {
  return (n_max + 1.0) * static_cast<double>(f.terms().size()) * (n_max - n_min + 1.0);
}

/// Shell-sup series for every term of f and for f itself. `warn` receives a
/// notice when the evaluation count exceeds kScanWorkWarning.
inline DecayReport decay_scan(const ShadowDomain& d, const PolySymbol& f, int n_min, int n_max,
                              MomentTable& table, const ScanThresholds& th = {},
                              std::ostream* warn = nullptr) {
  if (n_min < 0 || n_min >= n_max)
    throw PreconditionError("decay_scan: need 0 <= N_min < N_max");
  const double work = scan_work(f, n_min, n_max);
  if (warn && work > kScanWorkWarning)
    *warn << "warning: decay scan needs about " << work << " eigenvalue evaluations\n";

  DecayReport rep;
  rep.n_min = n_min;
  rep.n_max = n_max;
  rep.thresholds = th;
  for (const auto& [jk, c] : f.terms()) {
    TermSeries ts{jk, c, {}, Verdict::Inconclusive};
    ts.shell_sup.reserve(n_max - n_min + 1);
    for (int N = n_min; N <= n_max; ++N) ts.shell_sup.push_back(shell_sup(d, jk, N, table));
    ts.verdict = classify_series(ts.shell_sup, n_min, n_max, th);
    rep.terms.push_back(std::move(ts));
  }
  rep.aggregate.reserve(n_max - n_min + 1);
  for (int N = n_min; N <= n_max; ++N) {
    double best = 0.0;
    for (int m1 = 0; m1 <= N; ++m1) best = std::max(best, symbol_norm_sq(d, f, {m1, N - m1}, table));
    rep.aggregate.push_back(best);
  }
  rep.aggregate_verdict = aggregate_verdict(rep.terms);
  return rep;
}

struct TermConsistency {
  MultiIndex index;
  Prediction prediction = Prediction::NoPrediction;
  Verdict verdict = Verdict::Inconclusive;
  bool agrees = true;
};

struct ConsistencyReport {
  GammaReport gamma;
  std::vector<TermConsistency> terms;
  Prediction aggregate_prediction = Prediction::NoPrediction;
  Verdict aggregate_verdict = Verdict::Inconclusive;
  bool agreement = true;
  DecayReport scan;
};

/// Geometric prediction for one monomial z1^j z2^k of f: a disk family in
/// the boundary along z1 (Gamma1) rules out compactness when j > 0, along z2
/// (Gamma2) when k > 0.
inline Prediction predict_term(const GammaReport& g, MultiIndex jk) {
  if (g.gamma1 && jk.a1 > 0) return Prediction::MustBeNonCompact;
  if (g.gamma2 && jk.a2 > 0) return Prediction::MustBeNonCompact;
  return Prediction::NoPrediction;
}

inline bool agrees(Prediction p, Verdict v) {
  return !(p == Prediction::MustBeNonCompact && v == Verdict::CompactConsistent);
}

struct ScanRange {
  int n_min = 20;
  int n_max = 200;
};

/// Compare boundary geometry against the spectral scan. Only convex domains
/// are accepted; anything else throws HypothesisError.
inline ConsistencyReport theorem_check(const ShadowDomain& d, const PolySymbol& f, ScanRange range,
                                       MomentTable& table, const ScanThresholds& th,
                                       GammaTolerances tol, std::ostream* warn = nullptr) {
  if (auto c = check_convex(d); !c)
    throw HypothesisError("theorem check needs a convex domain: " + c.detail);
  ConsistencyReport rep;
  rep.gamma = detect_gamma(d, tol.flat_eps, tol.len_eps);
  rep.scan = decay_scan(d, f, range.n_min, range.n_max, table, th, warn);
  for (const auto& t : rep.scan.terms) {
    TermConsistency tc{t.index, predict_term(rep.gamma, t.index), t.verdict, true};
    tc.agrees = agrees(tc.prediction, tc.verdict);
    if (tc.prediction == Prediction::MustBeNonCompact)
      rep.aggregate_prediction = Prediction::MustBeNonCompact;
    rep.agreement = rep.agreement && tc.agrees;
    rep.terms.push_back(tc);
  }
  rep.aggregate_verdict = rep.scan.aggregate_verdict;
  rep.agreement = rep.agreement && agrees(rep.aggregate_prediction, rep.aggregate_verdict);
  return rep;
}

inline ConsistencyReport theorem_check(const ShadowDomain& d, const PolySymbol& f, ScanRange range,
                                       MomentTable& table, const ScanThresholds& th = {}) {
  return theorem_check(d, f, range, table, th, default_gamma_tolerances(d));
}

}  // namespace hankelscope
