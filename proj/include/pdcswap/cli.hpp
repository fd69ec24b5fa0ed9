#pragma once

// Command-line front end. `run` is the whole program; tools/pdcswap.cpp only
// forwards argv to it.
//
// Exit codes: 0 success, 1 failed numerical check, 2 usage error.

#include <charconv>
#include <cstdio>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pdcswap/bell.hpp"
#include "pdcswap/experiment.hpp"
#include "pdcswap/verify.hpp"

namespace pdcswap::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 9 significant digits, '.' decimal separator regardless of locale.
inline std::string format_number(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 9);
  return std::string(buf, res.ptr);
}

inline double round9(double x) {
  const std::string s = format_number(x);
  double v = 0.0;
  std::from_chars(s.data(), s.data() + s.size(), v);
  return v;
}

struct RunConfig {
  std::string command;
  std::optional<std::string> variant;
  std::optional<double> alpha;
  std::optional<double> theta1, theta2, theta1p, theta2p;
  bool degrees = false;
  std::optional<std::string> format;
  std::string out_path;
  double grid_step = std::numbers::pi / 60;
  std::string which;
  std::optional<std::size_t> points;
  std::optional<double> range_min, range_max;
  std::uint64_t seed = VerifyOptions{}.seed;
  bool perturb = false;
};

namespace detail {

using nlohmann::json;

inline Variant need_variant(const RunConfig& rc) {
  if (!rc.variant) throw UsageError("--variant is required for '" + rc.command + "'");
  return parse_variant(*rc.variant);
}

inline double to_radians(const RunConfig& rc, double x) { return rc.degrees ? x * std::numbers::pi / 180.0 : x; }

inline double need_angle(const RunConfig& rc, const std::optional<double>& v, const char* flag) {
  if (!v) throw UsageError(std::string(flag) + " is required for '" + rc.command + "'");
  return to_radians(rc, *v);
}

inline Distinguishability alpha_of(const RunConfig& rc) {
  const double a = rc.alpha.value_or(1.0);
  if (!(a >= 0.0 && a <= 1.0)) throw UsageError("--alpha must lie in [0, 1]");
  return Distinguishability(a);
}

inline bool want_csv(const RunConfig& rc, bool csv_default) {
  const std::string f = rc.format.value_or(csv_default ? "csv" : "json");
  return f == "csv";
}

inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
  if (n == 0) throw UsageError("--points must be positive");
  std::vector<double> g(n);
  for (std::size_t k = 0; k < n; ++k)
    g[k] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
  return g;
}

inline json angles_json(const AngleSet& a) {
  return {{"theta1", round9(a.theta1)},       {"theta1p", round9(a.theta1p)},
          {"theta2", round9(a.theta2)},       {"theta2p", round9(a.theta2p)},
          {"two_theta1", round9(2 * a.theta1)}, {"two_theta1p", round9(2 * a.theta1p)},
          {"two_theta2", round9(2 * a.theta2)}, {"two_theta2p", round9(2 * a.theta2p)}};
}

inline std::string csv_cell(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string q = "\"";
  for (char c : cell) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

inline std::string join_csv(const std::vector<std::string>& cells) {
  std::string s;
  for (std::size_t k = 0; k < cells.size(); ++k) s += (k ? "," : "") + csv_cell(cells[k]);
  return s + "\n";
}

inline std::string bool_str(bool b) { return b ? "true" : "false"; }

inline int cmd_probabilities(const RunConfig& rc, std::ostream& out) {
  const Variant v = need_variant(rc);
  const double t1 = need_angle(rc, rc.theta1, "--theta1");
  const double t2 = need_angle(rc, rc.theta2, "--theta2");
  const auto table = station_probabilities(Configuration(v, t1, t2));
  if (want_csv(rc, false)) {
    out << "pattern,n_a_plus,n_a_minus,n_b_plus,n_b_minus,probability\n";
    for (const auto& p : all_detection_patterns())
      out << join_csv({p.to_string(), std::to_string(p.a_plus()), std::to_string(p.a_minus()),
                       std::to_string(p.b_plus()), std::to_string(p.b_minus()), format_number(table[p])});
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9f", table.total());
    out << "sum,,,,," << buf << "\n";
    return kExitOk;
  }
  json rows = json::array();
  for (const auto& p : all_detection_patterns())
    rows.push_back({{"pattern", p.to_string()},
                    {"counts", {p.a_plus(), p.a_minus(), p.b_plus(), p.b_minus()}},
                    {"probability", round9(table[p])}});
  json j = {{"command", "probabilities"},
            {"variant", to_string(v)},
            {"theta1", round9(t1)},
            {"theta2", round9(t2)},
            {"two_theta1", round9(2 * t1)},
            {"two_theta2", round9(2 * t2)},
            {"conditioned_on", table.conditioned_on()},
            {"probabilities", rows},
            {"sum", round9(table.total())}};
  out << j.dump(2) << "\n";
  return kExitOk;
}

inline int cmd_correlation(const RunConfig& rc, std::ostream& out) {
  const Variant v = need_variant(rc);
  const auto alpha = alpha_of(rc);
  const double t1 = need_angle(rc, rc.theta1, "--theta1");
  const double t2 = need_angle(rc, rc.theta2, "--theta2");
  const SwappingExperiment exp(v);
  const double e = correlation(exp.probabilities(t1, t2), alpha);
  std::optional<ChshResult> s;
  if (rc.theta1p.has_value() != rc.theta2p.has_value())
    throw UsageError("--theta1p and --theta2p must be given together");
  if (rc.theta1p)
    s = chsh(exp, AngleSet{t1, to_radians(rc, *rc.theta1p), t2, to_radians(rc, *rc.theta2p)}, alpha);

  if (want_csv(rc, false)) {
    std::vector<std::string> head = {"variant", "alpha", "theta1", "theta2", "two_theta1", "two_theta2", "E"};
    std::vector<std::string> row = {to_string(v), format_number(alpha.value()), format_number(t1),
                                    format_number(t2), format_number(2 * t1), format_number(2 * t2),
                                    format_number(e)};
    if (s) {
      head.insert(head.end(), {"theta1p", "theta2p", "S", "violated"});
      row.insert(row.end(), {format_number(s->angles.theta1p), format_number(s->angles.theta2p),
                             format_number(s->S), bool_str(s->violated)});
    }
    out << join_csv(head) << join_csv(row);
    return kExitOk;
  }
  json j = {{"command", "correlation"}, {"variant", to_string(v)}, {"alpha", round9(alpha.value())},
            {"theta1", round9(t1)},     {"theta2", round9(t2)},    {"two_theta1", round9(2 * t1)},
            {"two_theta2", round9(2 * t2)}, {"E", round9(e)}};
  if (s)
    j["chsh"] = {{"S", round9(s->S)}, {"violated", s->violated}, {"angles", angles_json(s->angles)}};
  out << j.dump(2) << "\n";
  return kExitOk;
}

inline OptimizerOptions optimizer_of(const RunConfig& rc) {
  if (!(rc.grid_step > 0.0) || rc.grid_step > std::numbers::pi)
    throw UsageError("--grid-step must lie in (0, pi]");
  OptimizerOptions o;
  o.grid_step = rc.grid_step;
  return o;
}

inline json chsh_json(Variant v, const ChshResult& r) {
  return {{"variant", to_string(v)},
          {"alpha", round9(r.alpha.value())},
          {"S", round9(r.S)},
          {"local_bound", kLocalBound},
          {"violated", r.violated},
          {"angles", angles_json(r.angles)}};
}

inline int cmd_chsh_max(const RunConfig& rc, std::ostream& out) {
  const Variant v = need_variant(rc);
  const auto r = maximize_chsh(v, alpha_of(rc), optimizer_of(rc));
  if (want_csv(rc, false)) {
    const auto& a = r.angles;
    out << "variant,alpha,S,violated,theta1,theta1p,theta2,theta2p,two_theta1,two_theta1p,two_theta2,two_theta2p\n";
    out << join_csv({to_string(v), format_number(r.alpha.value()), format_number(r.S), bool_str(r.violated),
                     format_number(a.theta1), format_number(a.theta1p), format_number(a.theta2),
                     format_number(a.theta2p), format_number(2 * a.theta1), format_number(2 * a.theta1p),
                     format_number(2 * a.theta2), format_number(2 * a.theta2p)});
    return kExitOk;
  }
  json j = chsh_json(v, r);
  j["command"] = "chsh-max";
  out << j.dump(2) << "\n";
  return kExitOk;
}

inline int cmd_alpha_threshold(const RunConfig& rc, std::ostream& out) {
  const Variant v = need_variant(rc);
  const auto t = alpha_threshold(v, 1e-6, optimizer_of(rc));
  const bool all = t.status == ThresholdStatus::violated_at_all_alpha;
  if (want_csv(rc, false)) {
    out << "variant,alpha_star,status,violated_at_all_alpha\n"
        << join_csv({to_string(v), format_number(t.alpha_star), to_string(t.status), bool_str(all)});
    return kExitOk;
  }
  json j = {{"command", "alpha-threshold"},
            {"variant", to_string(v)},
            {"alpha_star", round9(t.alpha_star)},
            {"status", to_string(t.status)},
            {"violated_at_all_alpha", all}};
  out << j.dump(2) << "\n";
  return kExitOk;
}

inline void emit_rows(const RunConfig& rc, std::ostream& out, const std::vector<std::string>& head,
                      const std::vector<std::vector<double>>& rows) {
  if (want_csv(rc, true)) {
    out << join_csv(head);
    for (const auto& r : rows) {
      std::vector<std::string> cells;
      for (double x : r) cells.push_back(format_number(x));
      out << join_csv(cells);
    }
    return;
  }
  json arr = json::array();
  for (const auto& r : rows) {
    json o = json::object();
    for (std::size_t k = 0; k < head.size(); ++k) o[head[k]] = round9(r[k]);
    arr.push_back(o);
  }
  out << json{{"command", "scan"}, {"which", rc.which}, {"rows", arr}}.dump(2) << "\n";
}

inline int cmd_scan(const RunConfig& rc, std::ostream& out) {
  std::vector<std::vector<double>> rows;
  if (rc.which == "hom-dip") {
    if (rc.variant && parse_variant(*rc.variant) != Variant::B)
      throw UsageError("hom-dip scan is defined for variant B only");
    const double lo = rc.range_min ? to_radians(rc, *rc.range_min) : 0.0;
    const double hi = rc.range_max ? to_radians(rc, *rc.range_max) : std::numbers::pi / 2;
    for (const auto& p : hom_scan(linspace(lo, hi, rc.points.value_or(50))))
      rows.push_back({p.theta1, 2 * p.theta1, p.coincidence});
    emit_rows(rc, out, {"theta1", "two_theta1", "p_coincidence"}, rows);
  } else if (rc.which == "chsh-vs-alpha") {
    const Variant v = need_variant(rc);
    const SwappingExperiment exp(v);
    const auto opt = optimizer_of(rc);
    const double lo = rc.range_min.value_or(0.0);
    const double hi = rc.range_max.value_or(1.0);
    for (double a : linspace(lo, hi, rc.points.value_or(11))) {
      if (!(a >= 0.0 && a <= 1.0)) throw UsageError("chsh-vs-alpha range must lie in [0, 1]");
      const auto r = maximize_chsh(exp, Distinguishability(a), opt);
      rows.push_back({a, r.S, r.violated ? 1.0 : 0.0, r.angles.theta1, r.angles.theta1p, r.angles.theta2,
                      r.angles.theta2p});
    }
    emit_rows(rc, out, {"alpha", "S", "violated", "theta1", "theta1p", "theta2", "theta2p"}, rows);
  } else if (rc.which == "fringe") {
    const Variant v = need_variant(rc);
    const SwappingExperiment exp(v);
    const auto alpha = alpha_of(rc);
    const double t2 = rc.theta2 ? to_radians(rc, *rc.theta2) : 0.0;
    const double lo = rc.range_min ? to_radians(rc, *rc.range_min) : 0.0;
    const double hi = rc.range_max ? to_radians(rc, *rc.range_max) : std::numbers::pi;
    for (double t1 : linspace(lo, hi, rc.points.value_or(50)))
      rows.push_back({t1, t2, t1 - t2, correlation(exp.probabilities(t1, t2), alpha)});
    emit_rows(rc, out, {"theta1", "theta2", "delta", "E"}, rows);
  } else {
    throw UsageError("--which must be one of chsh-vs-alpha, hom-dip, fringe");
  }
  return kExitOk;
}

inline int cmd_verify(const RunConfig& rc, std::ostream& out) {
  VerifyOptions opt;
  opt.seed = rc.seed;
  opt.perturb = rc.perturb;
  const auto report = run_verification(opt);
  std::size_t failed = 0;
  if (rc.format.value_or("text") == "json") {
    json arr = json::array();
    for (const auto& c : report.checks) {
      failed += !c.passed();
      arr.push_back({{"name", c.name},
                     {"comparisons", c.comparisons},
                     {"max_deviation", round9(c.max_deviation)},
                     {"tolerance", c.tolerance},
                     {"passed", c.passed()}});
    }
    out << json{{"command", "verify"}, {"checks", arr}, {"all_passed", report.all_passed()}}.dump(2) << "\n";
  } else {
    for (const auto& c : report.checks) {
      failed += !c.passed();
      out << (c.passed() ? "[PASS] " : "[FAIL] ") << c.name << ": " << c.comparisons
          << " comparisons, max deviation " << format_number(c.max_deviation) << " (tolerance "
          << format_number(c.tolerance) << ")\n";
    }
    out << report.checks.size() << " suites, ";
    if (failed == 0)
      out << "all checks passed\n";
    else
      out << failed << " FAILED\n";
  }
  return failed == 0 ? kExitOk : kExitCheckFailed;
}

}  // namespace detail

inline int dispatch(const RunConfig& rc, std::ostream& out) {
  if (rc.command == "probabilities") return detail::cmd_probabilities(rc, out);
  if (rc.command == "correlation") return detail::cmd_correlation(rc, out);
  if (rc.command == "chsh-max") return detail::cmd_chsh_max(rc, out);
  if (rc.command == "alpha-threshold") return detail::cmd_alpha_threshold(rc, out);
  if (rc.command == "scan") return detail::cmd_scan(rc, out);
  if (rc.command == "verify") return detail::cmd_verify(rc, out);
  throw UsageError("unknown command '" + rc.command + "'");
}

/// Parses `args` (argv without the program name) and runs the command.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig rc;
  CLI::App app{"Entanglement swapping with PDC sources: detection statistics and CHSH analysis", "pdcswap"};
  app.set_config("--config", "", "key=value file with default flag values (flags win)");
  app.add_option("--variant", rc.variant, "Set-up variant: A (plain triggers) or B (polarizer-filtered triggers)")
      ->check(CLI::IsMember({"A", "B", "a", "b"}));
  app.add_option("--alpha", rc.alpha, "Double-count distinguishability in [0, 1] (default 1)");
  app.add_option("--theta1", rc.theta1, "Analyzer angle at station a");
  app.add_option("--theta2", rc.theta2, "Analyzer angle at station b");
  app.add_option("--theta1p", rc.theta1p, "Second analyzer angle at station a (CHSH)");
  app.add_option("--theta2p", rc.theta2p, "Second analyzer angle at station b (CHSH)");
  app.add_flag("--degrees", rc.degrees, "Interpret angle flags in degrees instead of radians");
  app.add_option("--format", rc.format, "Output format")->check(CLI::IsMember({"json", "csv", "text"}));
  app.add_option("--out", rc.out_path, "Write output to PATH instead of standard output");
  app.add_option("--grid-step", rc.grid_step, "Optimizer grid step in radians (default pi/60)");
  app.add_option("--which", rc.which, "Scan kind: chsh-vs-alpha, hom-dip, fringe");
  app.add_option("--points", rc.points, "Number of scan points");
  app.add_option("--min", rc.range_min, "Scan range start");
  app.add_option("--max", rc.range_max, "Scan range end");
  app.add_option("--seed", rc.seed, "Seed for the random sample points of verify");
  app.add_flag("--inject-perturbation", rc.perturb)->group("");

  for (const auto& [name, help] : std::vector<std::pair<std::string, std::string>>{
           {"probabilities", "Detection pattern probabilities given both triggers fired"},
           {"correlation", "Correlation E(theta1, theta2); with --theta1p/--theta2p also CHSH S"},
           {"chsh-max", "Maximize CHSH S over the four analyzer angles"},
           {"alpha-threshold", "Smallest alpha for which the CHSH maximum reaches 2"},
           {"scan", "Parameter scans as CSV (chsh-vs-alpha, hom-dip, fringe)"},
           {"verify", "Cross-check the pipeline against the oracle and closed forms"}}) {
    app.add_subcommand(name, help)->fallthrough()->callback([&rc, n = name] { rc.command = n; });
  }
  app.require_subcommand(1);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return kExitUsage;
  }

  try {
    if (rc.out_path.empty()) return dispatch(rc, out);
    std::ostringstream buffer;
    const int code = dispatch(rc, buffer);
    std::ofstream file(rc.out_path);
    if (!file) throw UsageError("cannot open output file '" + rc.out_path + "'");
    file << buffer.str();
    return code;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitCheckFailed;
  }
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  return run(std::vector<std::string>(argv + 1, argv + argc), out, err);
}

}  // namespace pdcswap::cli
