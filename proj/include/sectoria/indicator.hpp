#pragma once

// Growth indicator h(theta) = limsup ln|phi(r e^{i theta})| / r of a
// one-variable interpolant, and the sector hypotheses built on it.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "sectoria/error.hpp"
#include "sectoria/expr.hpp"
#include "sectoria/parallel.hpp"

namespace sectoria {

enum class SlopeMethod { max_slope, regression };

struct IndicatorEstimate {
  std::vector<double> thetas;
  std::vector<double> values;      // +inf on flagged rays
  std::vector<bool> flagged;       // singularity met on the ray
  std::vector<double> radii_used;
  SlopeMethod slope_method = SlopeMethod::max_slope;

  /// Value at an angle present in the grid (matched to 1e-12).
  double at(double theta) const {
    for (std::size_t k = 0; k < thetas.size(); ++k)
      if (std::abs(thetas[k] - theta) <= 1e-12) return values[k];
    throw Error(ErrorKind::domain, "angle not present in indicator grid");
  }
};

/// Half-opening angle sigma of the excluded sector {|arg z| <= sigma}.
class SectorSpec {
 public:
  explicit SectorSpec(double sigma) : sigma_(sigma) {
    if (!(sigma >= 0.0 && sigma < std::numbers::pi))
      throw Error(ErrorKind::domain, "sector sigma must lie in [0, pi)");
  }
  double sigma() const noexcept { return sigma_; }

 private:
  double sigma_;
};

/// `count` equispaced angles on [-pi/2, pi/2]; odd counts contain 0.
inline std::vector<double> default_angle_grid(int count = 65) {
  if (count < 2) throw Error(ErrorKind::input, "angle grid needs at least two points");
  std::vector<double> out(static_cast<std::size_t>(count));
  const double half = std::numbers::pi / 2;
  for (int k = 0; k < count; ++k)
    out[static_cast<std::size_t>(k)] = -half + std::numbers::pi * k / (count - 1);
  out.front() = -half;
  out.back() = half;
  if (count % 2 == 1) out[static_cast<std::size_t>(count / 2)] = 0.0;
  return out;
}

/// Geometric radius grid of `samples` points on [r_max/4, r_max]. The
/// limsup is read off the upper half of the grid (r >= r_max/2).
inline std::vector<double> indicator_radius_grid(double r_max, int samples) {
  std::vector<double> radii(static_cast<std::size_t>(samples));
  for (int k = 0; k < samples; ++k)
    radii[static_cast<std::size_t>(k)] = r_max * std::pow(0.25, double(samples - 1 - k) / (samples - 1));
  return radii;
}

inline IndicatorEstimate estimate_indicator(const InterpolantExpr& phi, std::span<const double> thetas,
                                            double r_max, int samples,
                                            SlopeMethod method = SlopeMethod::max_slope) {
  if (phi.nvars() != 1) throw Error(ErrorKind::dimension, "indicator needs a one-variable interpolant");
  if (samples < 8) throw Error(ErrorKind::input, "samples must be at least 8");
  if (!(r_max >= 10.0)) throw Error(ErrorKind::input, "r_max must be at least 10");
  for (std::size_t k = 1; k < thetas.size(); ++k)
    if (!(thetas[k] > thetas[k - 1])) throw Error(ErrorKind::input, "angles must be strictly increasing");

  IndicatorEstimate est;
  est.thetas.assign(thetas.begin(), thetas.end());
  est.values.assign(thetas.size(), 0.0);
  est.flagged.assign(thetas.size(), false);
  est.radii_used = indicator_radius_grid(r_max, samples);
  est.slope_method = method;

  const std::size_t first = est.radii_used.size() / 2;
  std::vector<char> flags(thetas.size(), 0);
  parallel_for(thetas.size(), [&](std::size_t k) {
    const cplx dir = std::polar(1.0, thetas[k]);
    std::vector<double> rs, logs;
    try {
      for (std::size_t j = first; j < est.radii_used.size(); ++j) {
        const double r = est.radii_used[j];
        const cplx arg = r * dir;
        rs.push_back(r);
        logs.push_back(std::log(std::abs(phi.eval({arg}))));
      }
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::singularity) throw;
      flags[k] = 1;
      est.values[k] = std::numeric_limits<double>::infinity();
      return;
    }
    double h = -std::numeric_limits<double>::infinity();
    if (method == SlopeMethod::max_slope) {
      for (std::size_t j = 0; j < rs.size(); ++j) h = std::max(h, logs[j] / rs[j]);
    } else {
      // least-squares slope over finite samples
      double sr = 0, sl = 0, srr = 0, srl = 0, cnt = 0;
      for (std::size_t j = 0; j < rs.size(); ++j) {
        if (!std::isfinite(logs[j])) continue;
        sr += rs[j], sl += logs[j], srr += rs[j] * rs[j], srl += rs[j] * logs[j], cnt += 1;
      }
      if (cnt >= 2) h = (cnt * srl - sr * sl) / (cnt * srr - sr * sr);
    }
    est.values[k] = h;
  });
  for (std::size_t k = 0; k < flags.size(); ++k) est.flagged[k] = flags[k] != 0;
  return est;
}

/// Convergence radius e^{-h(0)} of the interpolated series.
inline double radius_from_indicator(double h0) { return std::exp(-h0); }

struct SigmaVerdict {
  bool accepted = false;
  double sigma = 0.0;  // clamped below at 0; the offending value when rejected
  // Holomorphy on the closed right half-plane cannot be sampled.
  std::string note = "conditional on phi being holomorphic on Re(zeta) >= 0";

  SectorSpec sector() const {
    if (!accepted) throw Error(ErrorKind::hypothesis, "sector rejected: sigma >= pi");
    return SectorSpec(sigma);
  }
};

inline SigmaVerdict proposition_sigma(const IndicatorEstimate& est) {
  const double half = std::numbers::pi / 2;
  const double top = est.at(half);
  const double bottom = est.at(-half);
  SigmaVerdict v;
  v.sigma = std::max({top, bottom, 0.0});
  v.accepted = v.sigma < std::numbers::pi;
  return v;
}

struct ArakelianViolation {
  double theta, h, bound;
};

struct ArakelianReport {
  bool holds = true;
  std::vector<ArakelianViolation> violations;
};

/// Checks h(theta) <= sigma |sin theta| + tol on every sampled |theta| < pi/2.
inline ArakelianReport check_arakelian(const IndicatorEstimate& est, const SectorSpec& sector,
                                       double tol = 1e-9) {
  ArakelianReport rep;
  for (std::size_t k = 0; k < est.thetas.size(); ++k) {
    const double t = est.thetas[k];
    if (!(std::abs(t) < std::numbers::pi / 2 - 1e-12)) continue;
    const double bound = sector.sigma() * std::abs(std::sin(t));
    if (!(est.values[k] <= bound + tol)) rep.violations.push_back({t, est.values[k], bound});
  }
  rep.holds = rep.violations.empty();
  return rep;
}

struct ConvexityReport {
  bool holds = true;
  double worst_excess = -std::numeric_limits<double>::infinity();
  std::size_t triples_checked = 0;
};

/// Trigonometric convexity on every triple a1 < t < a2 with a2 - a1 < pi:
/// h(t) sin(a2-a1) <= h(a1) sin(a2-t) + h(a2) sin(t-a1) + tol.
inline ConvexityReport check_trig_convexity(const IndicatorEstimate& est, double tol = 0.1) {
  ConvexityReport rep;
  const auto& th = est.thetas;
  const auto& h = est.values;
  const std::size_t n = th.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (est.flagged[i]) continue;
    for (std::size_t k = i + 2; k < n; ++k) {
      if (est.flagged[k] || !(th[k] - th[i] < std::numbers::pi - 1e-12)) continue;
      for (std::size_t j = i + 1; j < k; ++j) {
        if (est.flagged[j]) continue;
        const double lhs = h[j] * std::sin(th[k] - th[i]);
        const double rhs = h[i] * std::sin(th[k] - th[j]) + h[k] * std::sin(th[j] - th[i]);
        rep.worst_excess = std::max(rep.worst_excess, lhs - rhs);
        ++rep.triples_checked;
      }
    }
  }
  rep.holds = !(rep.worst_excess > tol);
  return rep;
}

}  // namespace sectoria
