#pragma once

// Domain and symbol spec files (JSON), and machine-readable reports.
//
//   {"type":"bidisk","r":1.0,"s":1.0}
//   {"type":"ball","radius":1.0}
//   {"type":"egg","p":2.0,"q":4.0}            optional "scale" (default 1)
//   {"type":"polygon","vertices":[[0,1],[0.5,1],[1,0]]}
//
//   {"terms":[{"j":1,"k":0,"re":2.0,"im":0.0}, ...]}   "im" optional
//
// Report JSON uses insertion-ordered keys and prints every float with 17
// significant digits, so identical inputs give byte-identical output.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <initializer_list>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <system_error>

#include <json.hpp>

#include "domain.hpp"
#include "errors.hpp"
#include "hankel.hpp"
#include "probe.hpp"

namespace hankelscope {

using ordered_json = nlohmann::ordered_json;

namespace detail {

inline void write_json_value(std::ostream& out, const ordered_json& j, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case ordered_json::value_t::object: {
      if (j.empty()) {
        out << "{}";
        return;
      }
      out << '{' << nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out << ',' << nl;
        first = false;
        out << pad << ordered_json(it.key()).dump() << (indent > 0 ? ": " : ":");
        write_json_value(out, it.value(), indent, depth + 1);
      }
      out << nl << close_pad << '}';
      return;
    }
    case ordered_json::value_t::array: {
      if (j.empty()) {
        out << "[]";
        return;
      }
      // numeric arrays stay on one line
      bool flat = std::all_of(j.begin(), j.end(), [](const auto& e) { return e.is_primitive(); });
      out << '[';
      bool first = true;
      for (const auto& e : j) {
        if (!first) out << (flat ? ", " : ",");
        if (!flat) out << nl << pad;
        first = false;
        write_json_value(out, e, indent, depth + 1);
      }
      if (!flat) out << nl << close_pad;
      out << ']';
      return;
    }
    case ordered_json::value_t::number_float: {
      double v = j.get<double>();
      if (!std::isfinite(v)) {
        out << "null";
      } else {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << buf;
      }
      return;
    }
    default:
      out << j.dump();
  }
}

inline void reject_unknown_keys(const ordered_json& obj, std::initializer_list<const char*> allowed,
                                const std::string& where) {
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!ok.count(it.key())) throw ParseError(where + it.key(), "unknown key");
}

inline double require_number(const ordered_json& obj, const char* key, const std::string& where = "") {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(where + key, "missing");
  if (!it->is_number()) throw ParseError(where + key, "must be a number");
  double v = it->get<double>();
  if (!std::isfinite(v)) throw ParseError(where + key, "must be finite");
  return v;
}

inline double require_positive(const ordered_json& obj, const char* key) {
  double v = require_number(obj, key);
  if (!(v > 0.0)) throw ParseError(key, "must be > 0");
  return v;
}

inline ordered_json parse_json_text(const std::string& text) {
  try {
    return ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("<document>", e.what());
  }
}

}  // namespace detail

/// Pretty JSON with 17-significant-digit floats and a trailing newline.
inline void write_json(std::ostream& out, const ordered_json& j, int indent = 2) {
  detail::write_json_value(out, j, indent, 0);
  out << '\n';
}

inline std::string to_json_text(const ordered_json& j, int indent = 2) {
  std::ostringstream os;
  write_json(os, j, indent);
  return os.str();
}

/// Shortest representation that reads back to the same double.
inline std::string shortest_repr(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// -- domain specs -----------------------------------------------------------

inline ShadowDomain domain_from_json(const ordered_json& j) {
  using namespace detail;
  if (!j.is_object()) throw ParseError("<document>", "domain spec must be a JSON object");
  auto t = j.find("type");
  if (t == j.end() || !t->is_string()) throw ParseError("type", "missing or not a string");
  const std::string type = t->get<std::string>();

  if (type == "bidisk") {
    reject_unknown_keys(j, {"type", "r", "s"}, "");
    return ShadowDomain::bidisk(require_positive(j, "r"), require_positive(j, "s"));
  }
  if (type == "ball") {
    reject_unknown_keys(j, {"type", "radius"}, "");
    return ShadowDomain::ball(require_positive(j, "radius"));
  }
  if (type == "egg") {
    reject_unknown_keys(j, {"type", "p", "q", "scale"}, "");
    double p = require_number(j, "p");
    double q = require_number(j, "q");
    if (p < 1.0) throw ParseError("p", "p must be >= 1 for convexity");
    if (q < 1.0) throw ParseError("q", "q must be >= 1 for convexity");
    double scale = j.contains("scale") ? require_positive(j, "scale") : 1.0;
    return ShadowDomain::egg(p, q, scale);
  }
  if (type == "polygon") {
    reject_unknown_keys(j, {"type", "vertices"}, "");
    auto v = j.find("vertices");
    if (v == j.end() || !v->is_array()) throw ParseError("vertices", "missing or not an array");
    std::vector<ShadowPoint> pts;
    for (std::size_t i = 0; i < v->size(); ++i) {
      const auto& e = (*v)[i];
      const std::string field = "vertices[" + std::to_string(i) + "]";
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
        throw ParseError(field, "must be a pair [x, y] of numbers");
      pts.push_back({e[0].get<double>(), e[1].get<double>()});
    }
    try {
      return ShadowDomain::polygon(std::move(pts));
    } catch (const std::invalid_argument& e) {
      throw ParseError("vertices", e.what());
    }
  }
  throw ParseError("type", "unknown domain type '" + type + "'");
}

inline ShadowDomain parse_domain_spec(const std::string& text) {
  return domain_from_json(detail::parse_json_text(text));
}

inline ordered_json domain_to_json(const ShadowDomain& d) {
  return std::visit(
      [](const auto& k) -> ordered_json {
        using K = std::decay_t<decltype(k)>;
        ordered_json j;
        if constexpr (std::is_same_v<K, Bidisk>) {
          j["type"] = "bidisk";
          j["r"] = k.r;
          j["s"] = k.s;
        } else if constexpr (std::is_same_v<K, Ball>) {
          j["type"] = "ball";
          j["radius"] = k.radius;
        } else if constexpr (std::is_same_v<K, Egg>) {
          j["type"] = "egg";
          j["p"] = k.p;
          j["q"] = k.q;
          if (k.scale != 1.0) j["scale"] = k.scale;
        } else {
          j["type"] = "polygon";
          j["vertices"] = ordered_json::array();
          for (const auto& v : k.vertices) j["vertices"].push_back(ordered_json::array({v.x, v.y}));
        }
        return j;
      },
      d.kind());
}

inline std::string serialize_domain_spec(const ShadowDomain& d) { return to_json_text(domain_to_json(d), 0); }

// -- symbol specs -----------------------------------------------------------

inline PolySymbol parse_symbol_spec(const std::string& text) {
  using namespace detail;
  auto j = parse_json_text(text);
  if (!j.is_object()) throw ParseError("<document>", "symbol spec must be a JSON object");
  reject_unknown_keys(j, {"terms"}, "");
  auto terms = j.find("terms");
  if (terms == j.end() || !terms->is_array()) throw ParseError("terms", "missing or not an array");
  PolySymbol f;
  for (std::size_t i = 0; i < terms->size(); ++i) {
    const auto& t = (*terms)[i];
    const std::string where = "terms[" + std::to_string(i) + "].";
    if (!t.is_object()) throw ParseError(where.substr(0, where.size() - 1), "must be an object");
    reject_unknown_keys(t, {"j", "k", "re", "im"}, where);
    MultiIndex jk;
    for (auto [key, slot] : {std::pair{"j", &jk.a1}, std::pair{"k", &jk.a2}}) {
      auto it = t.find(key);
      if (it == t.end()) throw ParseError(where + key, "missing");
      if (!it->is_number_integer()) throw ParseError(where + key, "must be an integer");
      auto v = it->get<long long>();
      if (v < 0) throw ParseError(where + key, "exponent must be >= 0");
      if (v > 100000) throw ParseError(where + key, "exponent too large");
      *slot = static_cast<int>(v);
    }
    double re = require_number(t, "re", where);
    double im = t.contains("im") ? require_number(t, "im", where) : 0.0;
    f.add(jk, {re, im});
  }
  return f;
}

inline ordered_json symbol_to_json(const PolySymbol& f) {
  ordered_json j;
  j["terms"] = ordered_json::array();
  for (const auto& [jk, c] : f.terms()) {
    ordered_json t;
    t["j"] = jk.a1;
    t["k"] = jk.a2;
    t["re"] = c.real();
    t["im"] = c.imag();
    j["terms"].push_back(std::move(t));
  }
  return j;
}

inline std::string serialize_symbol_spec(const PolySymbol& f) { return to_json_text(symbol_to_json(f), 0); }

// -- reports ----------------------------------------------------------------

inline ordered_json index_json(MultiIndex m) { return ordered_json::array({m.a1, m.a2}); }

inline ordered_json gamma_to_json(const GammaReport& g) {
  ordered_json j;
  if (g.gamma1) {
    j["gamma1"] = {{"r1", g.gamma1->r1}, {"s1", g.gamma1->s1}};
  } else {
    j["gamma1"] = nullptr;
  }
  if (g.gamma2) {
    j["gamma2"] = {{"s2", g.gamma2->s2}, {"r2", g.gamma2->r2}};
  } else {
    j["gamma2"] = nullptr;
  }
  j["flat_eps"] = g.flat_eps;
  j["len_eps"] = g.len_eps;
  j["exact"] = g.exact;
  return j;
}

inline ordered_json thresholds_to_json(const ScanThresholds& th) {
  return {{"tau_decay", th.tau_decay},
          {"decay_ratio", th.decay_ratio},
          {"tau_floor", th.tau_floor},
          {"var_tol", th.var_tol},
          {"normalized_at", "N_min"}};
}

inline ordered_json decay_report_to_json(const DecayReport& r) {
  ordered_json j;
  j["n_min"] = r.n_min;
  j["n_max"] = r.n_max;
  j["thresholds"] = thresholds_to_json(r.thresholds);
  j["terms"] = ordered_json::array();
  for (const auto& t : r.terms) {
    ordered_json e;
    e["j"] = t.index.a1;
    e["k"] = t.index.a2;
    e["re"] = t.coeff.real();
    e["im"] = t.coeff.imag();
    e["verdict"] = std::string(to_string(t.verdict));
    e["shell_sup"] = t.shell_sup;
    j["terms"].push_back(std::move(e));
  }
  j["aggregate"] = {{"verdict", std::string(to_string(r.aggregate_verdict))}, {"shell_sup", r.aggregate}};
  return j;
}

inline ordered_json consistency_to_json(const ConsistencyReport& r) {
  ordered_json j;
  j["gamma"] = gamma_to_json(r.gamma);
  j["terms"] = ordered_json::array();
  for (const auto& t : r.terms) {
    j["terms"].push_back({{"j", t.index.a1},
                          {"k", t.index.a2},
                          {"prediction", std::string(to_string(t.prediction))},
                          {"verdict", std::string(to_string(t.verdict))},
                          {"agrees", t.agrees}});
  }
  j["aggregate_prediction"] = std::string(to_string(r.aggregate_prediction));
  j["aggregate_verdict"] = std::string(to_string(r.aggregate_verdict));
  j["agreement"] = r.agreement;
  j["scan"] = decay_report_to_json(r.scan);
  return j;
}

inline constexpr const char* kCsvHeader = "N,term_j,term_k,shell_sup";

/// One row per (term, N), terms in ascending (j, k) order, N ascending.
inline void write_decay_csv(std::ostream& out, const DecayReport& r) {
  out << kCsvHeader << '\n';
  for (const auto& t : r.terms) {
    for (int N = r.n_min; N <= r.n_max; ++N) {
      out << N << ',' << t.index.a1 << ',' << t.index.a2 << ','
          << shortest_repr(t.shell_sup[N - r.n_min]) << '\n';
    }
  }
}

}  // namespace hankelscope
