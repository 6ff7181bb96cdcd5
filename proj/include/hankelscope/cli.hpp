#pragma once

// Command-line front end. `parse_command_line` turns argv into a
// CommandRequest; `run_command` executes it.
//
// Exit codes: 0 success, 1 usage / parse / hypothesis / I/O error,
// 2 theorem check disagreement.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "domain.hpp"
#include "errors.hpp"
#include "hankel.hpp"
#include "moments.hpp"
#include "probe.hpp"
#include "spec_io.hpp"

namespace hankelscope::cli {

enum class Subcommand { Geometry, Moment, Eig, Scan, Probe, Check, Report };
enum class OutputFormat { Json, Csv };

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitDisagreement = 2;

struct CommandRequest {
  Subcommand subcommand = Subcommand::Geometry;
  std::string domain_path;
  std::optional<std::string> symbol_path;
  std::optional<MultiIndex> alpha;
  std::optional<MultiIndex> beta;
  std::optional<MultiIndex> n;
  std::optional<int> warm;
  int n_min = 20;
  int n_max = 200;
  ScanThresholds thresholds;
  std::optional<double> flat_eps;
  std::optional<double> len_eps;
  OutputFormat format = OutputFormat::Json;
  std::optional<std::string> out_path;
  std::optional<std::string> cache_dir;  // empty optional: default location
  bool no_cache = false;
};

/// $HANKELSCOPE_CACHE, else $XDG_CACHE_HOME/hankelscope, else ~/.cache/hankelscope.
inline std::filesystem::path default_cache_dir() {
  if (const char* env = std::getenv("HANKELSCOPE_CACHE"); env && *env) return env;
  if (const char* xdg = std::getenv("XDG_CACHE_HOME"); xdg && *xdg)
    return std::filesystem::path(xdg) / "hankelscope";
  if (const char* home = std::getenv("HOME"); home && *home)
    return std::filesystem::path(home) / ".cache" / "hankelscope";
  return std::filesystem::temp_directory_path() / "hankelscope";
}

namespace detail {

inline MultiIndex parse_pair(const std::string& text, const char* flag) {
  std::istringstream in(text);
  long long a = -1, b = -1;
  char comma = 0;
  if (!(in >> a >> comma >> b) || comma != ',' || !(in >> std::ws).eof() || a < 0 || b < 0 ||
      a > 100000 || b > 100000)
    throw CLI::ValidationError(flag, "expected two nonnegative integers 'j,k', got '" + text + "'");
  return {static_cast<int>(a), static_cast<int>(b)};
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CacheIoError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace detail

/// --help was given; `text` is the formatted help.
struct HelpRequested {
  std::string text;
};

/// Throws CLI::ParseError on bad input and HelpRequested for --help.
inline CommandRequest parse_command_line(std::vector<std::string> args) {
  CommandRequest req;
  CLI::App app{"hankelscope: Bergman moments, Hankel eigenvalues and compactness probes on "
               "complete Reinhardt domains in C^2",
               "hankelscope"};
  app.require_subcommand(1);

  std::string alpha, beta, n, format = "json";
  struct Sub {
    const char* name;
    const char* help;
    Subcommand kind;
  };
  const Sub subs[] = {
      {"geometry", "completeness, convexity and boundary disk sets", Subcommand::Geometry},
      {"moment", "log-moment log ||z^beta||^2 (or --warm D to fill the cache)", Subcommand::Moment},
      {"eig", "Hankel eigenvalue at e_n (--alpha, or --symbol for a full symbol)", Subcommand::Eig},
      {"scan", "shell-sup decay scan of a symbol", Subcommand::Scan},
      {"probe", "shell-sup series and verdict for one monomial --alpha", Subcommand::Probe},
      {"check", "geometry vs spectrum consistency check (convex domains)", Subcommand::Check},
      {"report", "geometry, scan and consistency in one document", Subcommand::Report},
  };
  for (const auto& s : subs) {
    auto* sc = app.add_subcommand(s.name, s.help);
    sc->add_option("domain", req.domain_path, "domain spec JSON file")->required();
    sc->add_option("--symbol", req.symbol_path, "symbol spec JSON file");
    sc->add_option("--alpha", alpha, "monomial exponent j,k");
    sc->add_option("--beta", beta, "moment exponent j,k");
    sc->add_option("--n", n, "basis index n1,n2");
    sc->add_option("--warm", req.warm, "precompute all moments with |beta| <= D")->check(CLI::NonNegativeNumber);
    sc->add_option("--nmin", req.n_min, "first shell")->check(CLI::NonNegativeNumber);
    sc->add_option("--nmax", req.n_max, "last shell")->check(CLI::NonNegativeNumber);
    sc->add_option("--tau-decay", req.thresholds.tau_decay)->check(CLI::PositiveNumber);
    sc->add_option("--tau-floor", req.thresholds.tau_floor)->check(CLI::PositiveNumber);
    sc->add_option("--var-tol", req.thresholds.var_tol)->check(CLI::PositiveNumber);
    sc->add_option("--decay-ratio", req.thresholds.decay_ratio)->check(CLI::PositiveNumber);
    sc->add_option("--flat-eps", req.flat_eps)->check(CLI::PositiveNumber);
    sc->add_option("--len-eps", req.len_eps)->check(CLI::PositiveNumber);
    sc->add_option("--out", req.out_path, "write output here instead of stdout");
    sc->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sc->add_option("--cache", req.cache_dir, "moment cache directory");
    sc->add_flag("--no-cache", req.no_cache, "do not read or write the moment cache");
    sc->callback([&req, kind = s.kind] { req.subcommand = kind; });
  }

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() != 0) throw;
    std::ostringstream help, ignored;
    app.exit(e, help, ignored);
    throw HelpRequested{help.str()};
  }

  if (!alpha.empty()) req.alpha = detail::parse_pair(alpha, "--alpha");
  if (!beta.empty()) req.beta = detail::parse_pair(beta, "--beta");
  if (!n.empty()) req.n = detail::parse_pair(n, "--n");
  req.format = format == "csv" ? OutputFormat::Csv : OutputFormat::Json;

  auto need = [](bool ok, const char* msg) {
    if (!ok) throw CLI::ValidationError(msg);
  };
  switch (req.subcommand) {
    case Subcommand::Moment:
      need(req.beta || req.warm, "moment needs --beta j,k or --warm D");
      break;
    case Subcommand::Eig:
      need(req.n.has_value(), "eig needs --n n1,n2");
      need(req.alpha || req.symbol_path, "eig needs --alpha j,k or --symbol FILE");
      break;
    case Subcommand::Probe:
      need(req.alpha.has_value(), "probe needs --alpha j,k");
      break;
    case Subcommand::Scan:
    case Subcommand::Check:
    case Subcommand::Report:
      need(req.symbol_path.has_value(), "this subcommand needs --symbol FILE");
      break;
    case Subcommand::Geometry:
      break;
  }
  if (req.subcommand == Subcommand::Scan || req.subcommand == Subcommand::Probe ||
      req.subcommand == Subcommand::Check || req.subcommand == Subcommand::Report)
    need(req.n_min < req.n_max, "--nmin must be smaller than --nmax");
  if (req.format == OutputFormat::Csv)
    need(req.subcommand == Subcommand::Scan || req.subcommand == Subcommand::Probe,
         "--format csv is only available for scan and probe");
  return req;
}

namespace detail {

inline ordered_json geometry_json(const ShadowDomain& d, GammaTolerances tol) {
  ordered_json j;
  j["domain"] = domain_to_json(d);
  j["r1_max"] = d.r1_max();
  j["r2_max"] = d.r2_max();
  auto complete = check_complete(d);
  j["complete"] = complete.ok;
  if (!complete) j["complete_detail"] = complete.detail;
  auto convex = check_convex(d);
  j["convex"] = convex.ok;
  if (!convex) j["convex_detail"] = convex.detail;
  j["gamma"] = complete ? gamma_to_json(detect_gamma(d, tol.flat_eps, tol.len_eps)) : ordered_json();
  return j;
}

inline void write_probe_csv(std::ostream& out, MultiIndex alpha, int n_min, const std::vector<double>& s) {
  out << kCsvHeader << '\n';
  for (std::size_t i = 0; i < s.size(); ++i)
    out << n_min + static_cast<int>(i) << ',' << alpha.a1 << ',' << alpha.a2 << ',' << shortest_repr(s[i])
        << '\n';
}

}  // namespace detail

/// Executes one request. Diagnostics go to `err`; results to `out` or --out.
inline int run_command(const CommandRequest& req, std::ostream& out, std::ostream& err) {
  try {
    const ShadowDomain domain = parse_domain_spec(detail::read_file(req.domain_path));
    std::optional<PolySymbol> symbol;
    if (req.symbol_path) symbol = parse_symbol_spec(detail::read_file(*req.symbol_path));

    GammaTolerances tol = default_gamma_tolerances(domain);
    if (req.flat_eps) tol.flat_eps = *req.flat_eps;
    if (req.len_eps) tol.len_eps = *req.len_eps;

    MomentTable table(domain);
    if (!req.no_cache) {
      std::filesystem::path dir = req.cache_dir ? std::filesystem::path(*req.cache_dir) : default_cache_dir();
      std::error_code ec;
      std::filesystem::create_directories(dir, ec);
      if (ec) throw CacheIoError("cannot create cache directory " + dir.string() + ": " + ec.message());
      table.attach_file(dir / (domain.identity_hash() + ".moments"));
    }

    auto needs_complete = [&] {
      if (auto c = check_complete(domain); !c)
        throw PreconditionError("domain is not complete: " + c.detail);
    };

    std::ostringstream body;
    int status = kExitOk;
    switch (req.subcommand) {
      case Subcommand::Geometry:
        write_json(body, detail::geometry_json(domain, tol));
        break;

      case Subcommand::Moment: {
        needs_complete();
        ordered_json j;
        j["domain"] = domain_to_json(domain);
        if (req.warm) j["warmed_entries"] = warm_cache(domain, *req.warm, table);
        if (req.beta) {
          double lm = log_moment(domain, *req.beta, table);
          j["beta"] = index_json(*req.beta);
          j["log_moment"] = lm;
          j["moment"] = std::exp(lm);
        }
        write_json(body, j);
        break;
      }

      case Subcommand::Eig: {
        needs_complete();
        ordered_json j;
        j["n"] = index_json(*req.n);
        if (req.alpha) {
          const MultiIndex a = *req.alpha, m = *req.n;
          j["alpha"] = index_json(a);
          j["eigenvalue"] = hankel_eigenvalue(domain, a, m, table);
          j["projection_coeff"] = projection_coeff(domain, a, m, table);
          auto act = hankel_action(domain, a, m, table);
          ordered_json aj;
          aj["anti_coeff"] = act.anti_coeff;
          if (act.correction) {
            aj["correction"] = {{"index", index_json(act.correction->index)}, {"coeff", act.correction->coeff}};
          } else {
            aj["correction"] = nullptr;
          }
          j["action"] = aj;
        }
        if (symbol) {
          ordered_json terms = ordered_json::array();
          for (const auto& [jk, c] : symbol->terms())
            terms.push_back({{"j", jk.a1}, {"k", jk.a2}, {"eigenvalue", hankel_eigenvalue(domain, jk, *req.n, table)}});
          j["symbol_terms"] = terms;
          j["symbol_norm_sq"] = symbol_norm_sq(domain, *symbol, *req.n, table);
        }
        write_json(body, j);
        break;
      }

      case Subcommand::Scan: {
        needs_complete();
        auto rep = decay_scan(domain, *symbol, req.n_min, req.n_max, table, req.thresholds, &err);
        if (req.format == OutputFormat::Csv) {
          write_decay_csv(body, rep);
        } else {
          ordered_json j;
          j["domain"] = domain_to_json(domain);
          j["symbol"] = symbol_to_json(*symbol);
          j["scan"] = decay_report_to_json(rep);
          write_json(body, j);
        }
        break;
      }

      case Subcommand::Probe: {
        needs_complete();
        std::vector<double> s;
        for (int N = req.n_min; N <= req.n_max; ++N) s.push_back(shell_sup(domain, *req.alpha, N, table));
        if (req.format == OutputFormat::Csv) {
          detail::write_probe_csv(body, *req.alpha, req.n_min, s);
        } else {
          ordered_json j;
          j["domain"] = domain_to_json(domain);
          j["alpha"] = index_json(*req.alpha);
          j["n_min"] = req.n_min;
          j["n_max"] = req.n_max;
          j["shell_sup"] = s;
          j["verdict"] = std::string(to_string(classify_series(s, req.n_min, req.n_max, req.thresholds)));
          write_json(body, j);
        }
        break;
      }

      case Subcommand::Check: {
        auto rep = theorem_check(domain, *symbol, {req.n_min, req.n_max}, table, req.thresholds, tol, &err);
        ordered_json j;
        j["domain"] = domain_to_json(domain);
        j["symbol"] = symbol_to_json(*symbol);
        j["consistency"] = consistency_to_json(rep);
        write_json(body, j);
        if (!rep.agreement) {
          err << "theorem check: spectral verdict contradicts the geometric prediction\n";
          status = kExitDisagreement;
        }
        break;
      }

      case Subcommand::Report: {
        ordered_json j;
        j["geometry"] = detail::geometry_json(domain, tol);
        j["symbol"] = symbol_to_json(*symbol);
        needs_complete();
        if (check_convex(domain)) {
          auto rep = theorem_check(domain, *symbol, {req.n_min, req.n_max}, table, req.thresholds, tol, &err);
          j["consistency"] = consistency_to_json(rep);
          if (!rep.agreement) status = kExitDisagreement;
        } else {
          j["consistency"] = nullptr;
          j["notice"] = "domain is not convex; no geometric prediction applies";
          j["scan"] = decay_report_to_json(
              decay_scan(domain, *symbol, req.n_min, req.n_max, table, req.thresholds, &err));
        }
        write_json(body, j);
        break;
      }
    }

    table.flush();

    if (req.out_path) {
      std::ofstream f(*req.out_path, std::ios::binary);
      if (!f || !(f << body.str()) || !f.flush()) throw CacheIoError("cannot write " + *req.out_path);
    } else {
      out << body.str();
    }
    return status;
  } catch (const ParseError& e) {
    err << "error: invalid spec (" << e.what() << ")\n";
  } catch (const HypothesisError& e) {
    err << "hypothesis not satisfied: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return kExitError;
}

/// argv entry point shared by the tool and the tests.
inline int main_entry(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  std::vector<std::string> args(argv + 1, argv + argc);
  CommandRequest req;
  try {
    req = parse_command_line(args);
  } catch (const HelpRequested& h) {
    out << h.text;
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitError;
  }
  return run_command(req, out, err);
}

}  // namespace hankelscope::cli
