#pragma once

// Command-line front end. Subcommands:
//
//   sector        <problem.json>
//   indicator     <problem.json> [--rmax R] [--samples S]
//   continue      <problem.json> <points.csv> [--tol T] [--force]
//   verify        <problem.json> [--grid G] [--tol T] [--N N]
//   residue-check <problem.json> --m M.. --z RE IM .. [--tol T]
//
// Exit codes: 0 ok, 2 input error, 3 empty domain, 4 hypothesis failure,
// 5 numerical failure.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "sectoria/continuation.hpp"
#include "sectoria/error.hpp"
#include "sectoria/geometry.hpp"
#include "sectoria/indicator.hpp"
#include "sectoria/kernel.hpp"
#include "sectoria/problem_file.hpp"

namespace sectoria {

enum ExitCode : int {
  exit_ok = 0,
  exit_input = 2,
  exit_empty_domain = 3,
  exit_hypothesis = 4,
  exit_numerical = 5,
};

inline int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::syntax:
    case ErrorKind::unknown_identifier:
    case ErrorKind::variable_range:
    case ErrorKind::dimension:
    case ErrorKind::input: return exit_input;
    case ErrorKind::domain: return exit_empty_domain;
    case ErrorKind::hypothesis: return exit_hypothesis;
    case ErrorKind::singularity:
    case ErrorKind::pole_proximity:
    case ErrorKind::quadrature: return exit_numerical;
  }
  return exit_numerical;
}

namespace detail {

inline std::string num(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  return format_real(x == 0.0 ? 0.0 : x);
}

inline std::string json_vec(const Vec& v) {
  std::string s = "[";
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? ", " : "") + num(v[k]);
  return s + "]";
}

inline bool parse_double(std::string_view text, double& out) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
  return res.ec == std::errc() && res.ptr == text.data() + text.size();
}

/// Rows of re_1,im_1,...,re_n,im_n. A first line that does not parse as
/// numbers is taken as a header.
inline std::vector<std::vector<cplx>> read_points(std::istream& in, int n) {
  std::vector<std::vector<cplx>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> vals;
    bool ok = true;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      double v = 0.0;
      if (!parse_double(cell, v)) {
        ok = false;
        break;
      }
      vals.push_back(v);
    }
    if (!ok) {
      if (rows.empty() && lineno == 1) continue;
      throw Error(ErrorKind::input, "points file line " + std::to_string(lineno) + ": expected numbers");
    }
    if (static_cast<int>(vals.size()) != 2 * n)
      throw Error(ErrorKind::input, "points file line " + std::to_string(lineno) + ": expected " +
                                        std::to_string(2 * n) + " columns");
    std::vector<cplx> z;
    for (int j = 0; j < n; ++j) z.emplace_back(vals[2 * j], vals[2 * j + 1]);
    rows.push_back(std::move(z));
  }
  return rows;
}

inline void require_sigmas_below_pi(const Majorant& m) {
  for (int l = 1; l <= m.n; ++l)
    if (sigma_l(m, l) >= std::numbers::pi)
      throw Error(ErrorKind::hypothesis, "sigma_" + std::to_string(l) + " >= pi", static_cast<std::size_t>(l));
}

inline SectorSpec file_sector(const ProblemFile& pf) {
  const double s = pf.sigma ? *pf.sigma : sigma_l(pf.problem.majorant, 1);
  if (s >= std::numbers::pi) throw Error(ErrorKind::hypothesis, "sigma >= pi: no sector to continue into", 1);
  if (s < 0.0) throw Error(ErrorKind::input, "sigma must be non-negative");
  return SectorSpec(s);
}

inline int cmd_sector(const std::string& file, std::ostream& out, std::ostream& err) {
  const auto pf = load_problem_file(file);
  const Polytope poly = build_polytope(pf.problem.majorant);
  std::vector<Vec> rays;
  Vec offsets;
  for (const auto& h : poly.halfspaces) {
    rays.push_back(h.normal);
    offsets.push_back(h.offset);
  }
  out << "{\n  \"rays\": [";
  for (std::size_t k = 0; k < rays.size(); ++k) out << (k ? ", " : "") << json_vec(rays[k]);
  out << "],\n  \"offsets\": " << json_vec(offsets) << ",\n  \"interior_point\": "
      << (poly.interior_point ? json_vec(*poly.interior_point) : std::string("null"))
      << ",\n  \"chebyshev_radius\": " << num(poly.chebyshev_radius) << "\n}\n";
  if (!poly.has_interior()) {
    err << "sector: polytope has empty interior\n";
    return exit_empty_domain;
  }
  return exit_ok;
}

inline int cmd_indicator(const std::string& file, double rmax, int samples, std::ostream& out, std::ostream& err) {
  const auto pf = load_problem_file(file);
  if (pf.problem.n() != 1) throw Error(ErrorKind::dimension, "indicator needs a one-variable problem");
  const auto thetas = default_angle_grid(65);
  const auto est = estimate_indicator(pf.problem.phi, thetas, rmax, samples);
  out << "theta,h_estimate\n";
  for (std::size_t k = 0; k < thetas.size(); ++k) {
    out << num(thetas[k]) << ',' << (est.flagged[k] ? std::string("inf") : num(est.values[k])) << '\n';
    if (est.flagged[k]) err << "warning: singularity met on the ray theta=" << num(thetas[k]) << '\n';
  }
  const auto verdict = proposition_sigma(est);
  out << "sigma=" << num(verdict.sigma) << ",R=" << num(radius_from_indicator(est.at(0.0))) << '\n';
  if (!verdict.accepted) {
    err << "indicator: sigma >= pi, sector rejected\n";
    return exit_hypothesis;
  }
  return exit_ok;
}

inline constexpr int kCliConditionSamples = 400;

inline int cmd_continue(const std::string& file, const std::string& points, double tol, bool force,
                        std::ostream& out, std::ostream& err) {
  const auto pf = load_problem_file(file);
  const Problem& p = pf.problem;
  const int n = p.n();
  std::ifstream in(points);
  if (!in) throw Error(ErrorKind::input, "cannot open points file '" + points + "'");
  const auto rows = read_points(in, n);

  std::optional<SectorSpec> sector;
  std::optional<Polytope> poly;
  if (n == 1) {
    sector = file_sector(pf);
  } else {
    require_sigmas_below_pi(p.majorant);
    poly = build_polytope(p.majorant);
    if (!poly->has_interior()) {
      err << "continue: polytope has empty interior\n";
      return exit_empty_domain;
    }
  }

  const auto c1 = check_condition_1(p, kCliConditionSamples);
  const auto c2 = check_condition_2(p, kCliConditionSamples);
  for (const auto* rep : {&c1, &c2}) {
    if (rep->pass) continue;
    const int which = rep == &c1 ? 1 : 2;
    err << (force ? "warning" : "error") << ": growth condition " << which << " fails";
    if (!rep->failure.empty()) err << " (" << rep->failure << ')';
    else err << " (violation " << num(rep->max_violation) << ')';
    err << '\n';
  }
  if (!(c1.pass && c2.pass) && !force) return exit_hypothesis;

  out << "point,value_re,value_im,quad_error,in_domain\n";
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& z = rows[r];
    bool inside = false;
    if (n == 1) {
      const double a = arg_0_2pi(z[0]);
      inside = z[0] != cplx(0.0, 0.0) && a > sector->sigma() && a < 2.0 * std::numbers::pi - sector->sigma();
    } else {
      inside = contains_arg(*poly, z);
    }
    if (!inside) {
      out << r + 1 << ",,,,false\n";
      continue;
    }
    const auto res = n == 1 ? continue_1d(p, *sector, z[0], tol) : continue_nd(p, *poly, z, tol);
    out << r + 1 << ',' << num(res.value.real()) << ',' << num(res.value.imag()) << ',' << num(res.quad_error)
        << ",true\n";
  }
  return exit_ok;
}

inline int cmd_verify(const std::string& file, int grid, double tol, int big_n, std::ostream& out,
                      std::ostream& err) {
  const auto pf = load_problem_file(file);
  const Problem& p = pf.problem;
  std::optional<SectorSpec> sector;
  if (p.n() == 1) sector = file_sector(pf);
  else require_sigmas_below_pi(p.majorant);
  const Polytope poly = build_polytope(p.majorant);
  if (!poly.has_interior()) {
    err << "verify: polytope has empty interior\n";
    return exit_empty_domain;
  }
  const auto points = overlap_grid(p, poly, grid);
  out << "point,continued_re,continued_im,direct_re,direct_im,discrepancy,tail_bound,pass\n";
  int failures = 0;
  for (std::size_t k = 0; k < points.size(); ++k) {
    const auto rep = verify_overlap(p, poly, points[k], big_n, tol, sector);
    out << k + 1 << ',' << num(rep.continued.real()) << ',' << num(rep.continued.imag()) << ','
        << num(rep.direct.real()) << ',' << num(rep.direct.imag()) << ',' << num(rep.discrepancy) << ','
        << num(rep.tail_bound) << ',' << (rep.pass ? "true" : "false") << '\n';
    if (!rep.pass) ++failures;
  }
  if (failures > 0) {
    err << "verify: " << failures << " of " << points.size() << " points exceed tolerance " << num(tol) << '\n';
    return exit_numerical;
  }
  return exit_ok;
}

inline int cmd_residue_check(const std::string& file, std::vector<int> m, const std::vector<double>& zparts,
                             double tol, std::ostream& out, std::ostream& err) {
  const auto pf = load_problem_file(file);
  const int n = pf.problem.n();
  if (static_cast<int>(zparts.size()) != 2 * n)
    throw Error(ErrorKind::input, "--z needs " + std::to_string(2 * n) + " numbers (re im per variable)");
  if (m.size() == 1) m.assign(static_cast<std::size_t>(n), m[0]);
  if (static_cast<int>(m.size()) != n) throw Error(ErrorKind::input, "--m needs 1 or n values");
  std::vector<cplx> z;
  for (int j = 0; j < n; ++j) z.emplace_back(zparts[2 * j], zparts[2 * j + 1]);
  const auto rc = residue_partial_sum_nd(pf.problem.phi, z, m, pf.problem.spec);
  out << "integral=" << num(rc.integral.real()) << ',' << num(rc.integral.imag()) << '\n'
      << "oracle=" << num(rc.oracle.real()) << ',' << num(rc.oracle.imag()) << '\n'
      << "abs_error=" << num(rc.abs_error) << '\n'
      << "rel_error=" << num(rc.rel_error) << '\n';
  if (rc.rel_error > tol) {
    err << "residue-check: relative error exceeds " << num(tol) << '\n';
    return exit_numerical;
  }
  return exit_ok;
}

}  // namespace detail

/// Runs the CLI on `args` (program name excluded).
inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Analytic continuation of power series into sectorial domains", "sectoria"};
  app.require_subcommand(1);

  std::string file, points;
  double rmax = 50.0, tol_continue = 1e-8, tol_verify = 1e-6, tol_residue = 1e-8;
  int samples = 32, grid = 3, big_n = 80;
  bool force = false;
  std::vector<int> m;
  std::vector<double> zparts;

  auto* sector = app.add_subcommand("sector", "H-representation of the continuation polytope (JSON)");
  sector->add_option("problem", file, "problem file")->required();

  auto* indicator = app.add_subcommand("indicator", "indicator estimate on 65 angles (CSV)");
  indicator->add_option("problem", file, "problem file")->required();
  indicator->add_option("--rmax", rmax, "largest sampling radius")->capture_default_str();
  indicator->add_option("--samples", samples, "radii per ray")->capture_default_str();

  auto* cont = app.add_subcommand("continue", "evaluate the continuation at points (CSV)");
  cont->add_option("problem", file, "problem file")->required();
  cont->add_option("points", points, "CSV of re_1,im_1,...,re_n,im_n")->required();
  cont->add_option("--tol", tol_continue, "truncation tail target")->capture_default_str();
  cont->add_flag("--force", force, "continue even if the growth conditions fail");

  auto* verify = app.add_subcommand("verify", "compare with the direct sum on an overlap grid");
  verify->add_option("problem", file, "problem file")->required();
  verify->add_option("--grid", grid, "grid points per direction")->capture_default_str();
  verify->add_option("--tol", tol_verify, "allowed discrepancy")->capture_default_str();
  verify->add_option("--N", big_n, "direct-sum truncation")->capture_default_str();

  auto* residue = app.add_subcommand("residue-check", "finite-contour residue identity");
  residue->add_option("problem", file, "problem file")->required();
  residue->add_option("--m", m, "partial-sum orders (one value is broadcast)")->required();
  residue->add_option("--z", zparts, "point as re im pairs")->required()->allow_extra_args();
  residue->add_option("--tol", tol_residue, "allowed relative error")->capture_default_str();

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return exit_input;
  }

  try {
    if (sector->parsed()) return detail::cmd_sector(file, out, err);
    if (indicator->parsed()) return detail::cmd_indicator(file, rmax, samples, out, err);
    if (cont->parsed()) return detail::cmd_continue(file, points, tol_continue, force, out, err);
    if (verify->parsed()) return detail::cmd_verify(file, grid, tol_verify, big_n, out, err);
    return detail::cmd_residue_check(file, m, zparts, tol_residue, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  }
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int k = 1; k < argc; ++k) args.emplace_back(argv[k]);
  return run_cli(std::move(args), out, err);
}

}  // namespace sectoria
