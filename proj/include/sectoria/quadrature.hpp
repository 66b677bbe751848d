#pragma once

// Composite Gauss-Legendre discretisation of the contour pieces used by the
// continuation integrals, plus a tensor-product summation helper.

#include <algorithm>
#include <array>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

#include "sectoria/error.hpp"
#include "sectoria/expr.hpp"
#include "sectoria/parallel.hpp"

namespace sectoria {

inline constexpr int kPanelOrder = 20;

/// Nodes zeta_k and oriented weights w_k (dzeta included) of a contour piece.
struct ContourNodes {
  std::vector<cplx> points;
  std::vector<cplx> weights;

  std::size_t size() const noexcept { return points.size(); }

  void append(const ContourNodes& other) {
    points.insert(points.end(), other.points.begin(), other.points.end());
    weights.insert(weights.end(), other.weights.begin(), other.weights.end());
  }
};

namespace detail {

struct GaussRule {
  std::array<double, kPanelOrder> x;
  std::array<double, kPanelOrder> w;
};

inline const GaussRule& gauss_rule() {
  static const GaussRule rule = [] {
    using G = boost::math::quadrature::gauss<double, kPanelOrder>;
    const auto& xs = G::abscissa();
    const auto& ws = G::weights();
    GaussRule r{};
    constexpr int half = kPanelOrder / 2;
    for (int k = 0; k < half; ++k) {
      r.x[static_cast<std::size_t>(half - 1 - k)] = -xs[static_cast<std::size_t>(k)];
      r.w[static_cast<std::size_t>(half - 1 - k)] = ws[static_cast<std::size_t>(k)];
      r.x[static_cast<std::size_t>(half + k)] = xs[static_cast<std::size_t>(k)];
      r.w[static_cast<std::size_t>(half + k)] = ws[static_cast<std::size_t>(k)];
    }
    return r;
  }();
  return rule;
}

// Appends Gauss nodes of [a, b] mapped through a parametrisation:
// point(t) and dpoint(t) (derivative), scaled by `orientation`.
template <class Point, class Deriv>
void add_panel(ContourNodes& out, double a, double b, Point point, Deriv dpoint, cplx orientation) {
  const auto& rule = gauss_rule();
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (int k = 0; k < kPanelOrder; ++k) {
    const double t = mid + half * rule.x[static_cast<std::size_t>(k)];
    out.points.push_back(point(t));
    out.weights.push_back(orientation * dpoint(t) * (half * rule.w[static_cast<std::size_t>(k)]));
  }
}

}  // namespace detail

/// Panel width for a density of `nodes_per_unit` nodes per unit length,
/// refined by `refine` (1 for the base rule, 2 for the doubled rule).
inline double panel_width(int nodes_per_unit, int refine) {
  return static_cast<double>(kPanelOrder) / (static_cast<double>(nodes_per_unit) * refine);
}

/// Vertical segment {i eta : lo <= eta <= hi} traversed downward. Panels are
/// graded near the pole at the origin: a panel never exceeds its distance
/// to 0 in width.
inline ContourNodes vertical_leg(double lo, double hi, double width) {
  ContourNodes out;
  auto point = [](double eta) { return cplx(0.0, eta); };
  auto deriv = [](double) { return cplx(0.0, 1.0); };
  const cplx downward(-1.0, 0.0);
  if (lo >= 0.0) {
    for (double a = lo; a < hi;) {
      const double b = std::min(hi, a + std::min(width, a));
      detail::add_panel(out, a, b, point, deriv, downward);
      a = b;
    }
  } else {
    for (double b = hi; b > lo;) {
      const double a = std::max(lo, b - std::min(width, -b));
      detail::add_panel(out, a, b, point, deriv, downward);
      b = a;
    }
  }
  return out;
}

/// Right half circle of radius r around 0, from +ir down to -ir.
inline ContourNodes indent_arc(double r, double width) {
  ContourNodes out;
  const double half = std::numbers::pi / 2;
  const int panels = std::max(2, static_cast<int>(std::ceil(std::numbers::pi * r / width)));
  auto point = [r](double t) { return std::polar(r, t); };
  auto deriv = [r](double t) { return cplx(0.0, 1.0) * std::polar(r, t); };
  for (int p = panels; p-- > 0;) {
    const double a = -half + std::numbers::pi * p / panels;
    const double b = -half + std::numbers::pi * (p + 1) / panels;
    detail::add_panel(out, a, b, point, deriv, cplx(-1.0, 0.0));
  }
  return out;
}

/// Right half circle of radius R traversed counter-clockwise (-iR to +iR).
inline ContourNodes outer_arc(double radius, double width) {
  ContourNodes out;
  const double half = std::numbers::pi / 2;
  const int panels = std::max(2, static_cast<int>(std::ceil(std::numbers::pi * radius / width)));
  auto point = [radius](double t) { return std::polar(radius, t); };
  auto deriv = [radius](double t) { return cplx(0.0, 1.0) * std::polar(radius, t); };
  for (int p = 0; p < panels; ++p) {
    const double a = -half + std::numbers::pi * p / panels;
    const double b = -half + std::numbers::pi * (p + 1) / panels;
    detail::add_panel(out, a, b, point, deriv, cplx(1.0, 0.0));
  }
  return out;
}

/// Deformed imaginary axis from +i*top down to -i*top, indented to the right
/// around 0 by a half circle of radius `indent`.
inline ContourNodes deformed_axis(double indent, double top, double width) {
  ContourNodes out = vertical_leg(indent, top, width);
  out.append(indent_arc(indent, width));
  out.append(vertical_leg(-top, -indent, width));
  return out;
}

/// sum over the tensor grid of phi(zeta) * prod_j coef_j[k_j]. Rows of the
/// first axis are computed independently and reduced in order.
inline cplx tensor_sum(const InterpolantExpr& phi, std::span<const ContourNodes> axes,
                       std::span<const std::vector<cplx>> coefs) {
  const std::size_t n = axes.size();
  if (n == 0) return phi.eval(std::span<const cplx>{});
  const std::size_t rows = axes[0].size();
  std::vector<cplx> row_sums(rows);
  parallel_for(rows, [&](std::size_t r) {
    std::vector<std::size_t> idx(n, 0);
    idx[0] = r;
    std::vector<cplx> zeta(n);
    cplx acc = 0.0;
    bool done = false;
    while (!done) {
      cplx c = 1.0;
      for (std::size_t j = 0; j < n; ++j) {
        zeta[j] = axes[j].points[idx[j]];
        c *= coefs[j][idx[j]];
      }
      if (c != cplx(0.0, 0.0)) acc += c * phi.eval(zeta);
      done = true;
      for (std::size_t j = n - 1; j >= 1; --j) {
        if (++idx[j] < axes[j].size()) {
          done = false;
          break;
        }
        idx[j] = 0;
      }
    }
    row_sums[r] = acc;
  });
  cplx total = 0.0;
  for (const auto& s : row_sums) total += s;
  return total;
}

}  // namespace sectoria
