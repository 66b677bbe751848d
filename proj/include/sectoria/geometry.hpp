#pragma once

// Piece-wise linear growth majorants, the fan cut out by their
// non-smoothness hyperplanes, and the polar polytope
//   P = { alpha : <mu, alpha> >= g(mu) for every ray mu of the fan }.
// The continuation domain is the set of z whose argument vector (each
// argument taken in (0, 2pi)) lies in the interior of P.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "sectoria/error.hpp"

namespace sectoria {

using Vec = std::vector<double>;

struct MajorantTerm {
  int eps = 1;  // +1 or -1
  Vec a;        // slopes, length n
  double a0 = 0.0;
};

/// g~(eta) = sum_p eps_p |<a_p, eta> + a0_p| together with the budget
/// constants of the right half-space growth bound
///   log|phi(xi + i eta)| <= sum_j ((pi - delta)|eta_j| + b xi_j) + C.
struct Majorant {
  std::vector<MajorantTerm> terms;
  int n = 1;
  double delta = 0.5;
  double b = 0.0;
  double bigC = 0.0;

  void validate() const {
    if (n < 1) throw Error(ErrorKind::input, "majorant dimension must be at least 1");
    if (!(delta > 0.0)) throw Error(ErrorKind::input, "majorant delta must be positive");
    for (const auto& t : terms) {
      if (t.eps != 1 && t.eps != -1) throw Error(ErrorKind::input, "majorant eps must be +1 or -1");
      if (static_cast<int>(t.a.size()) != n)
        throw Error(ErrorKind::dimension, "majorant slope vector length differs from n");
    }
  }
};

inline double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) s += x[k] * y[k];
  return s;
}

inline double norm(std::span<const double> x) { return std::sqrt(dot(x, x)); }

inline bool is_zero(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return v == 0.0; });
}

inline double eval_g_tilde(const Majorant& m, std::span<const double> eta) {
  if (static_cast<int>(eta.size()) != m.n) throw Error(ErrorKind::dimension, "eta length differs from n");
  double s = 0.0;
  for (const auto& t : m.terms) s += t.eps * std::abs(dot(t.a, eta) + t.a0);
  return s;
}

/// g(eta) = sum_p eps_p |<a_p, eta>| + pi sum_k (eta_k - |eta_k|).
inline double eval_g(const Majorant& m, std::span<const double> eta) {
  if (static_cast<int>(eta.size()) != m.n) throw Error(ErrorKind::dimension, "eta length differs from n");
  double s = 0.0;
  for (const auto& t : m.terms) s += t.eps * std::abs(dot(t.a, eta));
  for (double e : eta) s += std::numbers::pi * (e - std::abs(e));
  return s;
}

/// sigma_l = sum_p eps_p |a_p^l|, l 1-based.
inline double sigma_l(const Majorant& m, int l) {
  if (l < 1 || l > m.n) throw Error(ErrorKind::dimension, "variable index out of range");
  double s = 0.0;
  for (const auto& t : m.terms) s += t.eps * std::abs(t.a[static_cast<std::size_t>(l - 1)]);
  return s;
}

/// Sum of |a0_p|; bounds g~ - (g - pi sum(eta - |eta|)) uniformly.
inline double offset_budget(const Majorant& m) {
  double s = 0.0;
  for (const auto& t : m.terms) s += std::abs(t.a0);
  return s;
}

/// Majorant of phi restricted to the coordinates in `keep` (others frozen at 0).
inline Majorant restrict_majorant(const Majorant& m, const std::vector<int>& keep) {
  Majorant out;
  out.n = static_cast<int>(keep.size());
  out.delta = m.delta;
  out.b = m.b;
  out.bigC = m.bigC;
  for (const auto& t : m.terms) {
    MajorantTerm r{t.eps, {}, t.a0};
    for (int k : keep) r.a.push_back(t.a[static_cast<std::size_t>(k)]);
    out.terms.push_back(std::move(r));
  }
  return out;
}

struct Fan {
  std::vector<Vec> rays;             // unit vectors, both orientations
  std::vector<Vec> defining_normals; // nonzero a_p followed by e_1..e_n
};

inline constexpr int kMaxFanDimension = 3;

inline Fan build_fan(const Majorant& m) {
  m.validate();
  if (m.n > kMaxFanDimension) throw Error(ErrorKind::dimension, "ray enumeration is capped at n <= 3");
  const auto n = static_cast<std::size_t>(m.n);
  Fan fan;
  for (const auto& t : m.terms)
    if (!is_zero(t.a)) fan.defining_normals.push_back(t.a);
  for (std::size_t k = 0; k < n; ++k) {
    Vec e(n, 0.0);
    e[k] = 1.0;
    fan.defining_normals.push_back(std::move(e));
  }

  auto add_ray = [&](Vec v) {
    const double len = norm(v);
    if (len <= 1e-12) return;
    for (auto& x : v) x /= len;
    for (double sign : {1.0, -1.0}) {
      Vec u = v;
      for (auto& x : u) x *= sign;
      const bool seen = std::any_of(fan.rays.begin(), fan.rays.end(), [&](const Vec& r) {
        double d = 0.0;
        for (std::size_t k = 0; k < n; ++k) d += (r[k] - u[k]) * (r[k] - u[k]);
        return std::sqrt(d) <= 1e-9;
      });
      if (!seen) fan.rays.push_back(std::move(u));
    }
  };

  const auto& normals = fan.defining_normals;
  if (n == 1) {
    add_ray({1.0});
  } else if (n == 2) {
    for (const auto& a : normals) add_ray({-a[1], a[0]});
  } else {
    for (std::size_t i = 0; i < normals.size(); ++i)
      for (std::size_t j = i + 1; j < normals.size(); ++j) {
        const auto& a = normals[i];
        const auto& b = normals[j];
        add_ray({a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]});
      }
  }
  std::sort(fan.rays.begin(), fan.rays.end(), std::greater<>());
  return fan;
}

struct Halfspace {
  Vec normal;     // mu
  double offset;  // g(mu); the constraint is <mu, alpha> >= offset
};

struct Polytope {
  int n = 1;
  std::vector<Halfspace> halfspaces;
  std::optional<Vec> interior_point;
  double chebyshev_radius = 0.0;

  bool has_interior() const noexcept { return interior_point.has_value(); }
};

namespace detail {

// Solves the square system a x = b in place; false when (near) singular.
inline bool solve_dense(std::vector<Vec>& a, Vec& b, Vec& x) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    if (std::abs(a[piv][c]) < 1e-12) return false;
    std::swap(a[piv], a[c]);
    std::swap(b[piv], b[c]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  x.assign(n, 0.0);
  for (std::size_t c = n; c-- > 0;) {
    double s = b[c];
    for (std::size_t k = c + 1; k < n; ++k) s -= a[c][k] * x[k];
    x[c] = s / a[c][c];
  }
  return true;
}

}  // namespace detail

inline constexpr double kInteriorRadiusThreshold = 1e-9;

/// Chebyshev centre of { alpha : <mu, alpha> >= offset }: maximises r subject
/// to <mu, alpha> - r |mu| >= offset, by enumerating the vertices of the
/// (n+1)-dimensional feasible region.
inline std::pair<Vec, double> chebyshev_center(const std::vector<Halfspace>& hs, int dim) {
  const auto n = static_cast<std::size_t>(dim);
  const std::size_t m = hs.size();
  const std::size_t k = n + 1;
  if (m < k) throw Error(ErrorKind::domain, "too few half-spaces for a bounded polytope");

  std::vector<Vec> rows(m, Vec(k));
  Vec rhs(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t c = 0; c < n; ++c) rows[i][c] = hs[i].normal[c];
    rows[i][n] = -norm(hs[i].normal);
    rhs[i] = hs[i].offset;
  }

  double best_r = -std::numeric_limits<double>::infinity();
  Vec best;
  std::vector<std::size_t> pick(k);
  for (std::size_t i = 0; i < k; ++i) pick[i] = i;
  std::size_t visited = 0;
  while (true) {
    if (++visited > 20'000'000) throw Error(ErrorKind::dimension, "too many half-spaces for vertex enumeration");
    std::vector<Vec> a(k);
    Vec b(k), x;
    for (std::size_t i = 0; i < k; ++i) a[i] = rows[pick[i]], b[i] = rhs[pick[i]];
    if (detail::solve_dense(a, b, x) && x[n] > best_r + 1e-13) {
      bool feasible = true;
      for (std::size_t i = 0; i < m && feasible; ++i)
        feasible = dot(rows[i], x) >= rhs[i] - 1e-9 * (1.0 + std::abs(rhs[i]));
      if (feasible) best_r = x[n], best = x;
    }
    // next combination in lexicographic order
    std::size_t pos = k;
    while (pos > 0 && pick[pos - 1] == m - k + pos - 1) --pos;
    if (pos == 0) break;
    ++pick[pos - 1];
    for (std::size_t i = pos; i < k; ++i) pick[i] = pick[i - 1] + 1;
  }
  if (best.empty()) throw Error(ErrorKind::domain, "Chebyshev LP has no vertex");
  best.resize(n);
  return {best, best_r};
}

inline Polytope build_polytope(const Majorant& m) {
  const Fan fan = build_fan(m);
  Polytope p;
  p.n = m.n;
  for (const auto& mu : fan.rays) p.halfspaces.push_back({mu, eval_g(m, mu)});
  auto [center, r] = chebyshev_center(p.halfspaces, m.n);
  if (r > kInteriorRadiusThreshold) {
    p.interior_point = std::move(center);
    p.chebyshev_radius = r;
  } else {
    p.chebyshev_radius = std::min(r, 0.0);
  }
  return p;
}

/// Argument of z in (0, 2pi]; 0 is returned for the positive real axis.
inline double arg_0_2pi(std::complex<double> z) {
  double a = std::atan2(z.imag(), z.real());
  if (a < 0.0) a += 2.0 * std::numbers::pi;
  if (z.imag() == 0.0 && z.real() > 0.0) a = 0.0;
  return a;
}

inline Vec arg_vector(std::span<const std::complex<double>> z) {
  Vec alpha;
  for (std::size_t j = 0; j < z.size(); ++j) {
    if (z[j] == std::complex<double>(0.0, 0.0))
      throw Error(ErrorKind::domain, "zero component has no argument", j + 1);
    alpha.push_back(arg_0_2pi(z[j]));
  }
  return alpha;
}

/// Smallest normalised slack (<mu, alpha> - offset) / |mu| over all half-spaces.
inline double min_slack(const Polytope& p, std::span<const double> alpha) {
  double s = std::numeric_limits<double>::infinity();
  for (const auto& h : p.halfspaces) s = std::min(s, (dot(h.normal, alpha) - h.offset) / norm(h.normal));
  return s;
}

inline constexpr double kStrictSlack = 1e-12;

inline bool contains_arg(const Polytope& p, std::span<const std::complex<double>> z) {
  if (static_cast<int>(z.size()) != p.n) throw Error(ErrorKind::dimension, "point dimension differs from polytope");
  const Vec alpha = arg_vector(z);
  if (!p.has_interior()) return false;
  if (std::any_of(alpha.begin(), alpha.end(), [](double a) { return a == 0.0; })) return false;
  return min_slack(p, alpha) > kStrictSlack;
}

}  // namespace sectoria
