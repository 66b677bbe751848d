#pragma once

// Analytic continuation of sum_k phi(k) z^k by the deformed-axis integral
//   f(z) = phi(0) + integral over Gamma of phi(zeta) prod_j g(zeta_j, z_j)
// (Gamma traversed from +i inf down to -i inf, indented right around 0),
// with the sub-series where some k_j = 0 assembled by inclusion-exclusion.

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "sectoria/error.hpp"
#include "sectoria/expr.hpp"
#include "sectoria/geometry.hpp"
#include "sectoria/indicator.hpp"
#include "sectoria/kernel.hpp"
#include "sectoria/quadrature.hpp"

namespace sectoria {

struct Problem {
  InterpolantExpr phi;
  Majorant majorant;
  ContourSpec spec;

  int n() const noexcept { return majorant.n; }

  void validate() const {
    majorant.validate();
    spec.validate();
    if (phi.nvars() != majorant.n) throw Error(ErrorKind::dimension, "phi and majorant dimensions differ");
  }
};

struct ContinuationResult {
  cplx value{};
  double quad_error = 0.0;  // quadrature estimate plus tail bound
  bool in_domain = false;
  double tail_bound = 0.0;
  double truncation = 0.0;  // T used on the outermost integral
};

inline constexpr double kTailSafetyFactor = 10.0;
inline constexpr double kMaxTruncation = 5000.0;
inline constexpr double kConditionTol = 1e-9;

namespace detail {

inline cplx phi_at_origin(const InterpolantExpr& phi) {
  const std::vector<cplx> zero(static_cast<std::size_t>(phi.nvars()), cplx(0.0, 0.0));
  return phi.eval(zero);
}

// Mass of e^{-s|eta|} outside the ball of radius T in R^n (n <= 3).
inline double exp_tail_mass(int n, double s, double t) {
  const double e = std::exp(-s * t);
  switch (n) {
    case 1: return 2.0 * e / s;
    case 2: return 2.0 * std::numbers::pi * e * (t / s + 1.0 / (s * s));
    default: return 4.0 * std::numbers::pi * e * (t * t / s + 2.0 * t / (s * s) + 2.0 / (s * s * s));
  }
}

// Smallest T >= floor with scale * exp_tail_mass(n, rate, T) <= target.
inline double truncation_for(int n, double rate, double scale, double target, double floor) {
  double t = std::max(floor, 1.0);
  if (scale * exp_tail_mass(n, rate, t) <= target) return t;
  double hi = t;
  while (scale * exp_tail_mass(n, rate, hi) > target) {
    hi *= 2.0;
    if (hi > kMaxTruncation)
      throw Error(ErrorKind::quadrature, "required truncation exceeds the contour length cap");
  }
  double lo = t;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    (scale * exp_tail_mass(n, rate, mid) > target ? lo : hi) = mid;
  }
  return hi;
}

// Tensor quadrature of phi * prod kernel over (Gamma^1 truncated at T)^n,
// base rule and doubled rule.
inline std::pair<cplx, double> axis_integral(const InterpolantExpr& phi, std::span<const BranchedPower> bps,
                                             const ContourSpec& spec, double top) {
  cplx coarse = 0.0, fine = 0.0;
  for (int refine : {1, 2}) {
    const double width = panel_width(spec.nodes_per_unit, refine);
    std::vector<ContourNodes> axes;
    std::vector<std::vector<cplx>> coefs;
    for (const auto& bp : bps) {
      axes.push_back(deformed_axis(spec.indent_radius, top, width));
      coefs.push_back(kernel_coefficients(axes.back(), bp, spec.pole_exclusion));
    }
    (refine == 1 ? coarse : fine) = tensor_sum(phi, axes, coefs);
  }
  return {fine, std::abs(fine - coarse)};
}

inline double kernel_leg_factor(double indent, int n) {
  return std::pow(1.0 / (1.0 - std::exp(-2.0 * std::numbers::pi * indent)), n);
}

}  // namespace detail

/// One-variable continuation into the sector sigma < arg z < 2pi - sigma.
/// `tol` is the target for the truncation tail.
inline ContinuationResult continue_1d(const Problem& p, const SectorSpec& sector, cplx z, double tol = 1e-8) {
  p.validate();
  if (p.n() != 1) throw Error(ErrorKind::dimension, "continue_1d needs a one-variable problem");
  const BranchedPower bp(z);
  const double sigma = sector.sigma();
  const double alpha = bp.arg();
  if (!(alpha > sigma && alpha < 2.0 * std::numbers::pi - sigma))
    throw Error(ErrorKind::domain, "point outside the sector sigma < arg z < 2pi - sigma");
  const double rate = std::numbers::pi - sigma - std::abs(std::numbers::pi - alpha);
  if (!(rate > 0.0)) throw Error(ErrorKind::domain, "decay rate is not positive: tail unbounded");

  // |phi(i eta)| <= c e^{sigma |eta|}, c sampled on |eta| <= 50
  double c_phi = 0.0;
  for (int k = -200; k <= 200; ++k) {
    const double eta = 0.25 * k;
    const cplx v = p.phi.eval({cplx(0.0, eta)});
    c_phi = std::max(c_phi, std::abs(v) * std::exp(-sigma * std::abs(eta)));
  }
  const double scale = kTailSafetyFactor * c_phi * detail::kernel_leg_factor(p.spec.indent_radius, 1);

  ContinuationResult res;
  res.in_domain = true;
  res.truncation = p.spec.truncation > 0.0
                       ? p.spec.truncation
                       : detail::truncation_for(1, rate, scale, tol / 2, p.spec.indent_radius + 1.0);
  res.tail_bound = scale * detail::exp_tail_mass(1, rate, res.truncation);

  const BranchedPower bps[1] = {bp};
  const auto [integral, quad] = detail::axis_integral(p.phi, bps, p.spec, res.truncation);
  res.value = detail::phi_at_origin(p.phi) + integral;
  res.quad_error = quad + res.tail_bound;
  return res;
}

namespace detail {

inline std::vector<int> subset_indices(unsigned mask, int n) {
  std::vector<int> out;
  for (int j = 0; j < n; ++j)
    if (mask & (1u << j)) out.push_back(j);
  return out;
}

inline Problem restrict_problem(const Problem& p, const std::vector<int>& keep) {
  std::vector<std::optional<int>> mapping(static_cast<std::size_t>(p.n()));
  for (std::size_t k = 0; k < keep.size(); ++k) mapping[static_cast<std::size_t>(keep[k])] = static_cast<int>(k);
  return Problem{p.phi.substitute(mapping, static_cast<int>(keep.size())), restrict_majorant(p.majorant, keep),
                 p.spec};
}

struct SubResult {
  cplx value{};
  double quad_error = 0.0;
  double tail_bound = 0.0;
  double truncation = 0.0;
};

inline SubResult continue_restricted(const Problem& p, const Polytope* polytope, std::span<const cplx> z,
                                     unsigned keep_mask, double tol, std::map<unsigned, SubResult>& memo);

// Deformed-axis integral over all n variables (support = every variable).
inline SubResult full_support_integral(const Problem& p, const Polytope& poly, std::span<const cplx> z,
                                       double tol) {
  const int n = p.n();
  const auto bps = branched_powers(z);
  const Vec alpha = arg_vector(z);
  const double rate = min_slack(poly, alpha);
  if (!(rate > 0.0)) throw Error(ErrorKind::domain, "decay rate is not positive: point not interior");
  const double scale = kTailSafetyFactor * std::exp(offset_budget(p.majorant)) *
                       kernel_leg_factor(p.spec.indent_radius, n);
  SubResult r;
  r.truncation = p.spec.truncation > 0.0
                     ? p.spec.truncation
                     : truncation_for(n, rate, scale, tol / 2, p.spec.indent_radius + 1.0);
  r.tail_bound = scale * exp_tail_mass(n, rate, r.truncation);
  const auto [integral, quad] = axis_integral(p.phi, bps, p.spec, r.truncation);
  r.value = integral;
  r.quad_error = quad + r.tail_bound;
  return r;
}

// F(R): continuation of sum over k with k_j = 0 for j outside R.
inline SubResult continue_restricted(const Problem& p, const Polytope* polytope, std::span<const cplx> z,
                                     unsigned keep_mask, double tol, std::map<unsigned, SubResult>& memo) {
  if (auto it = memo.find(keep_mask); it != memo.end()) return it->second;
  const int n = p.n();
  const auto keep = subset_indices(keep_mask, n);
  SubResult out;
  if (keep.empty()) {
    out.value = phi_at_origin(p.phi);
  } else if (keep.size() == 1) {
    const int l = keep[0];
    const double s = sigma_l(p.majorant, l + 1);
    if (s >= std::numbers::pi)
      throw Error(ErrorKind::hypothesis, "sigma_" + std::to_string(l + 1) + " >= pi: boundary sub-series not continuable",
                  static_cast<std::size_t>(l + 1));
    const Problem sub = restrict_problem(p, keep);
    const SectorSpec sector(std::max(0.0, s));
    const double a = arg_0_2pi(z[static_cast<std::size_t>(l)]);
    if (!(a > sector.sigma() && a < 2.0 * std::numbers::pi - sector.sigma()))
      throw Error(ErrorKind::domain, "sub-problem sector violation in variable " + std::to_string(l + 1),
                  static_cast<std::size_t>(l + 1));
    const auto r = continue_1d(sub, sector, z[static_cast<std::size_t>(l)], tol);
    out = {r.value, r.quad_error, r.tail_bound, r.truncation};
  } else {
    const bool full = static_cast<int>(keep.size()) == n;
    const Problem sub = full ? p : restrict_problem(p, keep);
    std::vector<cplx> zs;
    for (int j : keep) zs.push_back(z[static_cast<std::size_t>(j)]);
    std::optional<Polytope> own;
    if (!full || polytope == nullptr) own = build_polytope(sub.majorant);
    const Polytope& poly = own ? *own : *polytope;
    if (!contains_arg(poly, zs))
      throw Error(ErrorKind::domain, full ? "point outside Arg^{-1}(P interior)" : "sub-problem sector violation");

    const auto integral = full_support_integral(sub, poly, zs, tol);
    out = integral;
    // inclusion-exclusion over the nonempty sets of variables frozen at 0
    const unsigned all = (1u << keep.size()) - 1;
    std::map<unsigned, SubResult> sub_memo;
    for (unsigned frozen = 1; frozen <= all; ++frozen) {
      const unsigned rest = all & ~frozen;
      const auto r = continue_restricted(sub, nullptr, zs, rest, tol, sub_memo);
      const double sign = (std::popcount(frozen) % 2 == 1) ? 1.0 : -1.0;
      out.value += sign * r.value;
      out.quad_error += r.quad_error;
      out.tail_bound += r.tail_bound;
    }
  }
  memo[keep_mask] = out;
  return out;
}

}  // namespace detail

/// Continuation of the multiple series into Arg^{-1}(interior of P).
inline ContinuationResult continue_nd(const Problem& p, const Polytope& polytope, std::span<const cplx> z,
                                      double tol = 1e-8) {
  p.validate();
  const int n = p.n();
  if (static_cast<int>(z.size()) != n || polytope.n != n)
    throw Error(ErrorKind::dimension, "point, problem and polytope dimensions differ");
  if (n > 3) throw Error(ErrorKind::dimension, "continuation quadrature is capped at n <= 3");
  if (!contains_arg(polytope, z)) throw Error(ErrorKind::domain, "point outside Arg^{-1}(P interior)");
  // every piece of the inclusion-exclusion gets an equal share of the budget
  const double piece_tol = tol / static_cast<double>(1u << n);
  std::map<unsigned, detail::SubResult> memo;
  const auto r = detail::continue_restricted(p, &polytope, z, (1u << n) - 1, piece_tol, memo);
  ContinuationResult res;
  res.value = r.value;
  res.quad_error = r.quad_error;
  res.tail_bound = r.tail_bound;
  res.truncation = r.truncation;
  res.in_domain = true;
  return res;
}

struct ConditionReport {
  bool pass = true;
  double max_violation = -std::numeric_limits<double>::infinity();
  std::vector<cplx> worst_point;  // zeta where the violation is largest (or the singular point)
  std::string failure;            // nonempty on singularity
  std::size_t points_checked = 0;
};

namespace detail {

template <class Bound>
void probe(const Problem& p, const std::vector<cplx>& zeta, Bound bound, ConditionReport& rep) {
  if (!rep.failure.empty()) return;
  ++rep.points_checked;
  cplx v;
  try {
    v = p.phi.eval(zeta);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::singularity) throw;
    rep.pass = false;
    rep.failure = e.what();
    rep.worst_point = zeta;
    return;
  }
  const double viol = std::log(std::abs(v)) - bound(zeta);
  if (viol > rep.max_violation) {
    rep.max_violation = viol;
    rep.worst_point = zeta;
  }
}

inline std::vector<double> sweep_radii() {
  std::vector<double> r{0.0};
  for (int k = 0; k <= 30; ++k) r.push_back(1e-3 * std::pow(5e4, k / 30.0));
  return r;
}

inline constexpr std::uint64_t kConditionSeed = 0x5ec70a1a;
inline constexpr double kConditionBox = 50.0;

}  // namespace detail

/// log|phi(i eta)| <= g~(eta) on the imaginary subspace, sampled on
/// [-50, 50]^n plus a radial sweep along the coordinate axes and fan rays.
inline ConditionReport check_condition_1(const Problem& p, int samples) {
  p.validate();
  if (samples < 100) throw Error(ErrorKind::input, "samples must be at least 100");
  const auto n = static_cast<std::size_t>(p.n());
  ConditionReport rep;
  auto bound = [&](const std::vector<cplx>& zeta) {
    Vec eta(n);
    for (std::size_t j = 0; j < n; ++j) eta[j] = zeta[j].imag();
    return eval_g_tilde(p.majorant, eta);
  };
  std::mt19937_64 rng(detail::kConditionSeed);
  std::uniform_real_distribution<double> box(-detail::kConditionBox, detail::kConditionBox);
  std::vector<cplx> zeta(n);
  for (int s = 0; s < samples; ++s) {
    for (auto& c : zeta) c = cplx(0.0, box(rng));
    detail::probe(p, zeta, bound, rep);
  }
  std::vector<Vec> directions;
  if (n <= static_cast<std::size_t>(kMaxFanDimension)) directions = build_fan(p.majorant).rays;
  for (std::size_t j = 0; j < n; ++j)
    for (double sgn : {1.0, -1.0}) {
      Vec e(n, 0.0);
      e[j] = sgn;
      directions.push_back(e);
    }
  for (const auto& d : directions)
    for (double r : detail::sweep_radii()) {
      for (std::size_t j = 0; j < n; ++j) zeta[j] = cplx(0.0, r * d[j]);
      detail::probe(p, zeta, bound, rep);
    }
  rep.pass = rep.failure.empty() && rep.max_violation <= kConditionTol;
  return rep;
}

/// log|phi(xi + i eta)| <= sum_j ((pi - delta)|eta_j| + b xi_j) + C on the
/// closed right poly-half-plane, sampled on [0, 50]^n + i[-50, 50]^n.
inline ConditionReport check_condition_2(const Problem& p, int samples) {
  p.validate();
  if (samples < 100) throw Error(ErrorKind::input, "samples must be at least 100");
  const auto n = static_cast<std::size_t>(p.n());
  const auto& m = p.majorant;
  ConditionReport rep;
  auto bound = [&](const std::vector<cplx>& zeta) {
    double s = m.bigC;
    for (const auto& c : zeta) s += (std::numbers::pi - m.delta) * std::abs(c.imag()) + m.b * c.real();
    return s;
  };
  std::mt19937_64 rng(detail::kConditionSeed + 1);
  std::uniform_real_distribution<double> re(0.0, detail::kConditionBox);
  std::uniform_real_distribution<double> im(-detail::kConditionBox, detail::kConditionBox);
  std::vector<cplx> zeta(n);
  for (int s = 0; s < samples; ++s) {
    for (auto& c : zeta) c = cplx(re(rng), im(rng));
    detail::probe(p, zeta, bound, rep);
  }
  // sweeps along each real axis, each imaginary axis and the diagonal
  for (std::size_t j = 0; j <= n; ++j)
    for (cplx dir : {cplx(1.0, 0.0), cplx(0.0, 1.0), cplx(0.0, -1.0), cplx(1.0, 1.0), cplx(1.0, -1.0)})
      for (double r : detail::sweep_radii()) {
        for (std::size_t q = 0; q < n; ++q) zeta[q] = (j == n || q == j) ? r * dir : cplx(0.0, 0.0);
        detail::probe(p, zeta, bound, rep);
      }
  rep.pass = rep.failure.empty() && rep.max_violation <= kConditionTol;
  return rep;
}

/// Sector used for a one-variable problem when no explicit sigma is given.
inline SectorSpec majorant_sector(const Majorant& m) {
  const double s = sigma_l(m, 1);
  if (s >= std::numbers::pi) throw Error(ErrorKind::hypothesis, "sigma_1 >= pi: no sector to continue into", 1);
  return SectorSpec(std::max(0.0, s));
}

struct OverlapReport {
  cplx continued{};
  cplx direct{};
  double discrepancy = 0.0;
  double quad_error = 0.0;
  double tail_bound = 0.0;  // bound on the direct sum's truncation tail
  double shell_ratio = 0.0;
  bool pass = false;
};

/// Convergence radius e^{-h_j(0)} of the series along variable j, the other
/// variables frozen at 0.
inline double axis_radius(const InterpolantExpr& phi, int j) {
  std::vector<std::optional<int>> mapping(static_cast<std::size_t>(phi.nvars()));
  mapping[static_cast<std::size_t>(j)] = 0;
  const auto axis = phi.substitute(mapping, 1);
  const double zero[1] = {0.0};
  const auto est = estimate_indicator(axis, zero, 50.0, 16);
  if (est.flagged[0]) return std::numeric_limits<double>::infinity();
  return radius_from_indicator(est.values[0]);
}

/// Compares the continuation with the truncated sum over 0 <= k_j <= N at a
/// point inside both the convergence polydisk and Arg^{-1}(interior of P).
inline OverlapReport verify_overlap(const Problem& p, const Polytope& polytope, std::span<const cplx> z, int big_n,
                                    double tol = 1e-6, std::optional<SectorSpec> sector = std::nullopt) {
  p.validate();
  const int n = p.n();
  if (static_cast<int>(z.size()) != n) throw Error(ErrorKind::dimension, "point dimension differs from problem");
  if (big_n < 2) throw Error(ErrorKind::input, "N must be at least 2");
  for (int j = 0; j < n; ++j)
    if (!(std::abs(z[static_cast<std::size_t>(j)]) < axis_radius(p.phi, j)))
      throw Error(ErrorKind::domain, "point outside the estimated convergence polydisk",
                  static_cast<std::size_t>(j + 1));

  // direct sum grouped in shells max_j k_j = s
  const auto nn = static_cast<std::size_t>(n);
  std::vector<double> shell_abs(static_cast<std::size_t>(big_n) + 1, 0.0);
  cplx direct = 0.0;
  std::vector<int> k(nn, 0);
  std::vector<cplx> point(nn);
  while (true) {
    cplx term = 1.0;
    int top = 0;
    for (std::size_t j = 0; j < nn; ++j) {
      point[j] = cplx(k[j], 0.0);
      term *= std::pow(z[j], k[j]);
      top = std::max(top, k[j]);
    }
    const cplx t = p.phi.eval(point) * term;
    direct += t;
    shell_abs[static_cast<std::size_t>(top)] += std::abs(t);
    std::size_t j = nn;
    bool done = true;
    while (j > 0) {
      --j;
      if (++k[j] <= big_n) {
        done = false;
        break;
      }
      k[j] = 0;
    }
    if (done) break;
  }
  const double last = shell_abs[static_cast<std::size_t>(big_n)];
  const double prev = shell_abs[static_cast<std::size_t>(big_n) - 1];
  const double ratio = prev > 0.0 ? last / prev : 0.0;
  if (!(ratio < 1.0)) throw Error(ErrorKind::domain, "tail bound non-convergent at this point");

  OverlapReport rep;
  rep.direct = direct;
  rep.shell_ratio = ratio;
  rep.tail_bound = kTailSafetyFactor * last * ratio / (1.0 - ratio);
  const double inner_tol = std::min(1e-8, tol / 10);
  if (n == 1) {
    const auto r = continue_1d(p, sector ? *sector : majorant_sector(p.majorant), z[0], inner_tol);
    rep.continued = r.value;
    rep.quad_error = r.quad_error;
  } else {
    const auto r = continue_nd(p, polytope, z, inner_tol);
    rep.continued = r.value;
    rep.quad_error = r.quad_error;
  }
  rep.discrepancy = std::abs(rep.continued - rep.direct);
  rep.pass = rep.discrepancy <= tol;
  return rep;
}

/// Points inside the overlap of the convergence polydisk and the sectorial
/// domain: `per_axis` moduli (0.2 .. 0.5 of the per-variable radius) times
/// `per_axis` argument offsets around the Chebyshev centre of P.
inline std::vector<std::vector<cplx>> overlap_grid(const Problem& p, const Polytope& polytope, int per_axis) {
  if (per_axis < 1) throw Error(ErrorKind::input, "grid size must be positive");
  if (!polytope.has_interior()) throw Error(ErrorKind::domain, "polytope has empty interior");
  const int n = p.n();
  std::vector<double> radius(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) radius[static_cast<std::size_t>(j)] = std::min(axis_radius(p.phi, j), 1e6);
  const Vec& center = *polytope.interior_point;
  const double cheb = polytope.chebyshev_radius;
  auto lerp = [per_axis](double a, double b, int i) { return per_axis == 1 ? 0.5 * (a + b) : a + (b - a) * i / (per_axis - 1); };
  std::vector<std::vector<cplx>> out;
  for (int mi = 0; mi < per_axis; ++mi)
    for (int ai = 0; ai < per_axis; ++ai) {
      const double frac = lerp(0.2, 0.5, mi);
      const double shift = lerp(-0.5, 0.5, ai) * cheb / std::sqrt(static_cast<double>(n));
      std::vector<cplx> z;
      for (int j = 0; j < n; ++j)
        z.push_back(std::polar(frac * radius[static_cast<std::size_t>(j)], center[static_cast<std::size_t>(j)] + shift));
      out.push_back(std::move(z));
    }
  return out;
}

}  // namespace sectoria
