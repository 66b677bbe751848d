#pragma once

// Kernels g(zeta, z) = z^zeta / (e^{2 pi i zeta} - 1) and their products,
// the contour geometry around the integer poles, and the finite-contour
// residue identity
//   integral over the boundary of G_m of phi * g = sum_{k=1}^{m} phi(k) z^k.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "sectoria/error.hpp"
#include "sectoria/expr.hpp"
#include "sectoria/geometry.hpp"
#include "sectoria/quadrature.hpp"

namespace sectoria {

/// z together with log z on the branch arg z in (0, 2pi). Positive reals
/// and 0 are rejected unless `allow_positive_real` is set; the finite residue
/// identity does not depend on the branch, so it may use arg z = 0.
class BranchedPower {
 public:
  explicit BranchedPower(cplx z, bool allow_positive_real = false) : z_(z) {
    if (z == cplx(0.0, 0.0)) throw Error(ErrorKind::domain, "z = 0 has no logarithm");
    const double a = arg_0_2pi(z);
    if (!((a > 0.0 || allow_positive_real) && a < 2.0 * std::numbers::pi))
      throw Error(ErrorKind::domain, "arg z must lie in (0, 2pi): z on the positive real axis");
    log_z_ = cplx(std::log(std::abs(z)), a);
  }

  cplx z() const noexcept { return z_; }
  cplx log_z() const noexcept { return log_z_; }
  double arg() const noexcept { return log_z_.imag(); }

 private:
  cplx z_;
  cplx log_z_;
};

inline std::vector<BranchedPower> branched_powers(std::span<const cplx> z, bool allow_positive_real = false) {
  std::vector<BranchedPower> out;
  for (std::size_t j = 0; j < z.size(); ++j) {
    try {
      out.emplace_back(z[j], allow_positive_real);
    } catch (const Error& e) {
      throw Error(e.kind(), std::string(e.what()) + " (component " + std::to_string(j + 1) + ")", j + 1);
    }
  }
  return out;
}

inline constexpr double kDefaultPoleExclusion = 0.125;

/// Deformed-axis contour parameters.
struct ContourSpec {
  double indent_radius = 0.5;
  double truncation = 0.0;  // 0 selects T from the a-priori tail bound
  int nodes_per_unit = 20;
  double pole_exclusion = kDefaultPoleExclusion;

  void validate() const {
    if (!(indent_radius > 0.0 && indent_radius <= 0.5))
      throw Error(ErrorKind::input, "indent_radius must lie in (0, 1/2]");
    if (!(truncation == 0.0 || truncation >= 1.0))
      throw Error(ErrorKind::input, "truncation must be 0 (auto) or at least 1");
    if (nodes_per_unit < 1) throw Error(ErrorKind::input, "nodes_per_unit must be positive");
    if (!(pole_exclusion > 0.0 && pole_exclusion <= kDefaultPoleExclusion))
      throw Error(ErrorKind::input, "pole_exclusion must lie in (0, 1/8]");
    if (indent_radius < pole_exclusion)
      throw Error(ErrorKind::input, "indent_radius must not be below pole_exclusion");
  }

  /// Defaults tied to the decay margin delta: indent min(1/2, delta/2) and a
  /// pole exclusion that never exceeds the indent.
  static ContourSpec for_delta(double delta) {
    ContourSpec s;
    s.indent_radius = std::min(0.5, delta / 2);
    s.pole_exclusion = std::min(kDefaultPoleExclusion, s.indent_radius);
    return s;
  }
};

inline double distance_to_integers(cplx zeta) {
  return std::abs(zeta - cplx(std::nearbyint(zeta.real()), 0.0));
}

/// 1 / (e^{2 pi i zeta} - 1) times z^zeta, evaluated without overflow in
/// either half plane.
inline cplx kernel_1d(cplx zeta, const BranchedPower& bp, double pole_exclusion = kDefaultPoleExclusion) {
  if (distance_to_integers(zeta) < pole_exclusion)
    throw Error(ErrorKind::pole_proximity, "zeta lies within the pole exclusion radius of an integer");
  const cplx w = cplx(0.0, 2.0 * std::numbers::pi) * zeta;
  const cplx power_exp = zeta * bp.log_z();
  if (w.real() > 0.0) return std::exp(power_exp - w) / (1.0 - std::exp(-w));
  return std::exp(power_exp) / (std::exp(w) - 1.0);
}

inline cplx kernel_nd(std::span<const cplx> zeta, std::span<const BranchedPower> bps,
                      double pole_exclusion = kDefaultPoleExclusion) {
  if (zeta.size() != bps.size()) throw Error(ErrorKind::dimension, "zeta and z lengths differ");
  cplx prod = 1.0;
  for (std::size_t j = 0; j < zeta.size(); ++j) {
    try {
      prod *= kernel_1d(zeta[j], bps[j], pole_exclusion);
    } catch (const Error& e) {
      throw Error(e.kind(), std::string(e.what()) + " (component " + std::to_string(j + 1) + ")", j + 1);
    }
  }
  return prod;
}

struct KernelBoundReport {
  double constant = 0.0;  // smallest C with |e^{2 pi i zeta} - 1| >= e^{pi(|Im| - Im)} / C
  double cap = 10.0;
  bool within_cap = false;
  std::size_t samples = 0;
};

/// Smallest constant C over the samples such that
///   |e^{2 pi i zeta} - 1| >= e^{pi (|Im zeta| - Im zeta)} / C.
inline KernelBoundReport check_kernel_lower_bound(std::span<const cplx> samples,
                                                  double pole_exclusion = kDefaultPoleExclusion) {
  KernelBoundReport rep;
  rep.samples = samples.size();
  for (const cplx& zeta : samples) {
    if (zeta.real() < 0.0) throw Error(ErrorKind::domain, "sample outside the closed right half-plane");
    if (distance_to_integers(zeta) < pole_exclusion)
      throw Error(ErrorKind::pole_proximity, "sample within the pole exclusion radius");
    const cplx w = cplx(0.0, 2.0 * std::numbers::pi) * zeta;
    // for Im zeta < 0 divide through by |e^w| = e^{-2 pi Im zeta}
    const double ratio = w.real() > 0.0 ? 1.0 / std::abs(1.0 - std::exp(-w)) : 1.0 / std::abs(std::exp(w) - 1.0);
    rep.constant = std::max(rep.constant, ratio);
  }
  rep.within_cap = std::isfinite(rep.constant) && rep.constant <= rep.cap;
  return rep;
}

/// Pieces of the boundary of G_m = {right of the indented axis} inside the
/// half disc of radius m + 1/2, counter-clockwise.
struct ResidueContour {
  ContourNodes legs;  // both vertical legs and the indent (Gamma_m^1)
  ContourNodes arc;   // outer half circle (Gamma_m^2)

  ContourNodes closed() const {
    ContourNodes all = arc;
    all.append(legs);
    return all;
  }
};

inline ResidueContour residue_contour(int m, const ContourSpec& spec, int refine) {
  const double radius = m + 0.5;
  const double width = panel_width(spec.nodes_per_unit, refine);
  return {deformed_axis(spec.indent_radius, radius, width), outer_arc(radius, width)};
}

struct ResidueCheck {
  cplx integral{};    // full closed-contour value (refined rule)
  cplx oracle{};      // direct partial sum
  cplx legs_part{};   // Gamma_m^1 contribution
  cplx arc_part{};    // Gamma_m^2 contribution
  double quad_error = 0.0;
  double abs_error = 0.0;
  double rel_error = 0.0;
};

inline constexpr double kResidueConvergenceTol = 1e-6;

namespace detail {

inline std::vector<cplx> kernel_coefficients(const ContourNodes& nodes, const BranchedPower& bp,
                                             double pole_exclusion) {
  std::vector<cplx> c(nodes.size());
  for (std::size_t k = 0; k < nodes.size(); ++k)
    c[k] = nodes.weights[k] * kernel_1d(nodes.points[k], bp, pole_exclusion);
  return c;
}

inline cplx partial_sum_oracle(const InterpolantExpr& phi, std::span<const cplx> z, std::span<const int> m) {
  const std::size_t n = z.size();
  std::vector<int> k(n, 1);
  std::vector<cplx> point(n);
  cplx sum = 0.0;
  while (true) {
    cplx term = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      point[j] = cplx(k[j], 0.0);
      term *= std::pow(z[j], k[j]);
    }
    sum += phi.eval(point) * term;
    std::size_t j = n;
    while (j > 0) {
      --j;
      if (++k[j] <= m[j]) break;
      k[j] = 1;
      if (j == 0) return sum;
    }
  }
}

}  // namespace detail

/// Closed-contour integral over the distinguished boundary of
/// G_{m_1} x ... x G_{m_n}, compared with the direct partial sum over
/// 1 <= k_j <= m_j. The arc/legs split is reported for n = 1.
inline ResidueCheck residue_partial_sum_nd(const InterpolantExpr& phi, std::span<const cplx> z,
                                           std::span<const int> m, const ContourSpec& spec) {
  spec.validate();
  const std::size_t n = z.size();
  if (static_cast<int>(n) != phi.nvars() || m.size() != n)
    throw Error(ErrorKind::dimension, "phi, z and m dimensions differ");
  if (n > 2) throw Error(ErrorKind::dimension, "tensor-product residue check is capped at n <= 2");
  for (int mj : m) {
    if (mj < 1) throw Error(ErrorKind::input, "m_j must be at least 1");
    if (n > 1 && mj > 8) throw Error(ErrorKind::input, "m_j must not exceed 8 for the tensor-product check");
  }
  const auto bps = branched_powers(z, true);

  ResidueCheck out;
  cplx coarse = 0.0;
  for (int refine : {1, 2}) {
    std::vector<ResidueContour> contours;
    std::vector<ContourNodes> axes;
    std::vector<std::vector<cplx>> coefs;
    for (std::size_t j = 0; j < n; ++j) {
      contours.push_back(residue_contour(m[j], spec, refine));
      axes.push_back(contours.back().closed());
      coefs.push_back(detail::kernel_coefficients(axes.back(), bps[j], spec.pole_exclusion));
    }
    const cplx value = tensor_sum(phi, axes, coefs);
    if (refine == 1) {
      coarse = value;
      continue;
    }
    out.integral = value;
    if (n == 1) {
      const auto& c = contours[0];
      const std::vector<ContourNodes> leg_axis{c.legs}, arc_axis{c.arc};
      const std::vector<std::vector<cplx>> leg_coef{detail::kernel_coefficients(c.legs, bps[0], spec.pole_exclusion)};
      const std::vector<std::vector<cplx>> arc_coef{detail::kernel_coefficients(c.arc, bps[0], spec.pole_exclusion)};
      out.legs_part = tensor_sum(phi, leg_axis, leg_coef);
      out.arc_part = tensor_sum(phi, arc_axis, arc_coef);
    }
  }
  out.quad_error = std::abs(out.integral - coarse);
  out.oracle = detail::partial_sum_oracle(phi, z, m);
  out.abs_error = std::abs(out.integral - out.oracle);
  out.rel_error = out.abs_error / std::max(std::abs(out.oracle), 1e-300);
  if (out.quad_error > kResidueConvergenceTol * (1.0 + std::abs(out.integral)))
    throw Error(ErrorKind::quadrature, "residue contour quadrature did not converge");
  return out;
}

inline ResidueCheck residue_partial_sum_1d(const InterpolantExpr& phi, cplx z, int m, const ContourSpec& spec) {
  const cplx zs[1] = {z};
  const int ms[1] = {m};
  return residue_partial_sum_nd(phi, zs, ms, spec);
}

}  // namespace sectoria
