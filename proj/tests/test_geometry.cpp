#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "sectoria/geometry.hpp"

using namespace sectoria;

namespace {

constexpr double kPi = std::numbers::pi;

Majorant make(int n, std::vector<MajorantTerm> terms) {
  Majorant m;
  m.n = n;
  m.terms = std::move(terms);
  return m;
}

Majorant coordinate_2d() { return make(2, {{1, {1, 0}, 0}, {1, {0, 1}, 0}}); }

bool has_ray(const Fan& f, const Vec& v) {
  for (const auto& r : f.rays) {
    double d = 0;
    for (std::size_t k = 0; k < v.size(); ++k) d += std::abs(r[k] - v[k]);
    if (d < 1e-12) return true;
  }
  return false;
}

// Hand-computed H-representation: offset of the half-space with normal `mu`.
double offset_for(const Polytope& p, const Vec& mu) {
  for (const auto& h : p.halfspaces) {
    double d = 0;
    for (std::size_t k = 0; k < mu.size(); ++k) d += std::abs(h.normal[k] - mu[k]);
    if (d < 1e-12) return h.offset;
  }
  FAIL("normal not found");
  return 0;
}

std::vector<Majorant> corpus() {
  std::vector<Majorant> ms;
  for (double s : {0.0, 0.5, 1.0, 3.0}) ms.push_back(make(1, {{1, {s}, 0}}));
  ms.push_back(coordinate_2d());
  ms.push_back(make(2, {{1, {1, 0}, 0}, {1, {0, 1}, 0}, {1, {1, 1}, 0}}));
  ms.push_back(make(2, {{1, {0.5, 0.25}, 0.3}, {-1, {0.1, 0.1}, 0}}));
  ms.push_back(make(3, {{1, {0.5, 0, 0}, 0}, {1, {0, 0.5, 0}, 0}, {1, {0, 0, 0.5}, 0}, {1, {0.2, 0.2, 0.2}, 0}}));
  return ms;
}

}  // namespace

TEST_CASE("g tilde") {
  CHECK(eval_g_tilde(make(1, {{1, {1}, 0}}), Vec{2}) == 2.0);
  CHECK(eval_g_tilde(coordinate_2d(), Vec{1, -2}) == 3.0);
  CHECK(eval_g_tilde(make(2, {{1, {1, 1}, 0.5}, {-1, {1, 0}, 0}}), Vec{1, 1}) == 1.5);
  CHECK_THROWS_AS(eval_g_tilde(coordinate_2d(), Vec{1}), Error);
}

TEST_CASE("g") {
  const double s = 0.7;
  const auto m = make(1, {{1, {s}, 0}});
  CHECK(eval_g(m, Vec{1}) == s);
  CHECK(std::abs(eval_g(m, Vec{-1}) - (s - 2 * kPi)) < 1e-15);
  CHECK(eval_g(m, Vec{0}) == 0.0);
  CHECK(eval_g(coordinate_2d(), Vec{0, 0}) == 0.0);
  CHECK(std::abs(eval_g(coordinate_2d(), Vec{-1, 1}) - (2 - 2 * kPi)) < 1e-15);
}

TEST_CASE("sigma_l") {
  CHECK(sigma_l(coordinate_2d(), 1) == 1.0);
  CHECK(sigma_l(make(2, {{1, {2, 1}, 0}, {-1, {1, 1}, 0}}), 1) == 1.0);
  CHECK(sigma_l(make(2, {{1, {0, 3}, 0}}), 1) == 0.0);
  CHECK_THROWS_AS(sigma_l(coordinate_2d(), 3), Error);
}

TEST_CASE("fan rays") {
  const auto f1 = build_fan(make(1, {{1, {2}, 0}}));
  REQUIRE(f1.rays.size() == 2);
  CHECK(has_ray(f1, {1}));
  CHECK(has_ray(f1, {-1}));

  const auto f2 = build_fan(make(2, {{1, {1, 0}, 0}, {1, {0, 1}, 0}, {1, {1, 1}, 0}}));
  CHECK(f2.rays.size() == 6);
  const double h = 1 / std::sqrt(2.0);
  for (const Vec& v : {Vec{1, 0}, Vec{-1, 0}, Vec{0, 1}, Vec{0, -1}, Vec{h, -h}, Vec{-h, h}}) CHECK(has_ray(f2, v));

  const auto f3 = build_fan(coordinate_2d());
  CHECK(f3.rays.size() == 4);

  // all-zero slopes leave the coordinate arrangement
  const auto f4 = build_fan(make(2, {{1, {0, 0}, 1}}));
  CHECK(f4.rays.size() == 4);
  CHECK(f4.defining_normals.size() == 2);

  CHECK_THROWS_AS(build_fan(make(4, {})), Error);
}

TEST_CASE("fan invariants") {
  for (const auto& m : corpus()) {
    const auto fan = build_fan(m);
    for (std::size_t i = 0; i < fan.rays.size(); ++i) {
      CHECK(std::abs(norm(fan.rays[i]) - 1.0) < 1e-12);
      for (std::size_t j = i + 1; j < fan.rays.size(); ++j) {
        double d = 0;
        for (std::size_t k = 0; k < fan.rays[i].size(); ++k) d += std::abs(fan.rays[i][k] - fan.rays[j][k]);
        CHECK(d > 1e-9);
      }
      if (m.n >= 2) {
        int orthogonal = 0;
        for (const auto& a : fan.defining_normals)
          if (std::abs(dot(a, fan.rays[i])) < 1e-12 * norm(a)) ++orthogonal;
        CHECK(orthogonal >= m.n - 1);
      }
    }
  }
}

TEST_CASE("one-variable polytopes are intervals") {
  for (double s : {0.0, 0.5, 1.0, 3.0}) {
    INFO("sigma " << s);
    const auto p = build_polytope(make(1, {{1, {s}, 0}}));
    REQUIRE(p.halfspaces.size() == 2);
    CHECK(std::abs(offset_for(p, {1}) - s) <= 1e-9);
    CHECK(std::abs(offset_for(p, {-1}) - (s - 2 * kPi)) <= 1e-9);
    REQUIRE(p.has_interior());
    CHECK(std::abs((*p.interior_point)[0] - kPi) <= 1e-9);
    CHECK(std::abs(p.chebyshev_radius - (kPi - s)) <= 1e-9);
  }
}

TEST_CASE("coordinate square") {
  const auto p = build_polytope(coordinate_2d());
  CHECK(std::abs(offset_for(p, {1, 0}) - 1) <= 1e-9);
  CHECK(std::abs(offset_for(p, {0, 1}) - 1) <= 1e-9);
  CHECK(std::abs(offset_for(p, {-1, 0}) - (1 - 2 * kPi)) <= 1e-9);
  CHECK(std::abs(offset_for(p, {0, -1}) - (1 - 2 * kPi)) <= 1e-9);
  REQUIRE(p.has_interior());
  CHECK(std::abs((*p.interior_point)[0] - kPi) <= 1e-9);
  CHECK(std::abs((*p.interior_point)[1] - kPi) <= 1e-9);
  CHECK(std::abs(p.chebyshev_radius - (kPi - 1)) <= 1e-9);
}

TEST_CASE("empty interior at sigma pi") {
  const auto p = build_polytope(make(1, {{1, {kPi}, 0}}));
  CHECK_FALSE(p.has_interior());
  CHECK(p.chebyshev_radius <= 0.0);
  CHECK_FALSE(contains_arg(p, std::vector<std::complex<double>>{-1.0}));
}

TEST_CASE("argument membership") {
  const auto p = build_polytope(make(1, {{1, {1}, 0}}));
  using c = std::complex<double>;
  CHECK(contains_arg(p, std::vector<c>{-1.0}));
  CHECK_FALSE(contains_arg(p, std::vector<c>{std::polar(1.0, 0.5)}));
  CHECK_FALSE(contains_arg(p, std::vector<c>{std::polar(1.0, 2 * kPi - 0.5)}));
  CHECK_FALSE(contains_arg(p, std::vector<c>{std::polar(1.0, 1.0)}));  // boundary
  CHECK_FALSE(contains_arg(build_polytope(make(1, {{1, {0}, 0}})), std::vector<c>{2.0}));
  CHECK_THROWS_AS(contains_arg(p, std::vector<c>{0.0}), Error);
  CHECK(arg_0_2pi(c(0, -1)) == 1.5 * kPi);
  CHECK(arg_0_2pi(c(3, 0)) == 0.0);
}

TEST_CASE("polytope soundness") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> ang(0.0, 2 * kPi);
  for (const auto& m : corpus()) {
    const auto p = build_polytope(m);
    if (!p.has_interior()) continue;
    const Vec& c = *p.interior_point;
    for (const auto& h : p.halfspaces) {
      CHECK(dot(h.normal, c) > h.offset);
      CHECK(dot(h.normal, c) - h.offset >= p.chebyshev_radius * norm(h.normal) - 1e-9);
    }
    // sampled points of P respect the sigma_l lower bound
    for (int s = 0; s < 2000; ++s) {
      Vec a(static_cast<std::size_t>(m.n));
      for (auto& x : a) x = ang(rng);
      if (min_slack(p, a) < 0) continue;
      for (int l = 1; l <= m.n; ++l) CHECK(a[static_cast<std::size_t>(l - 1)] >= sigma_l(m, l) - 1e-9);
    }
  }
}

TEST_CASE("g is positively homogeneous") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-5, 5), t(0.01, 10);
  for (const auto& m : corpus()) {
    Vec eta(static_cast<std::size_t>(m.n));
    for (int s = 0; s < 100; ++s) {
      for (auto& x : eta) x = u(rng);
      const double k = t(rng);
      Vec scaled = eta;
      for (auto& x : scaled) x *= k;
      CHECK(std::abs(eval_g(m, scaled) - k * eval_g(m, eta)) <= 1e-12 * (1 + std::abs(k * eval_g(m, eta))));
    }
  }
}

TEST_CASE("offsets shift g tilde by a bounded amount") {
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> u(-50, 50);
  for (const auto& m : corpus()) {
    Vec eta(static_cast<std::size_t>(m.n));
    for (int s = 0; s < 200; ++s) {
      for (auto& x : eta) x = u(rng);
      double correction = 0;
      for (double e : eta) correction += kPi * (std::abs(e) - e);
      CHECK(std::abs(eval_g_tilde(m, eta) - eval_g(m, eta) - correction) <= offset_budget(m) + 1e-9);
    }
  }
}

TEST_CASE("restricted majorant") {
  const auto m = make(3, {{1, {1, 2, 3}, 0.5}, {-1, {0, 1, 0}, 0}});
  const auto r = restrict_majorant(m, {0, 2});
  CHECK(r.n == 2);
  CHECK(r.terms[0].a == Vec{1, 3});
  CHECK(r.terms[1].a == Vec{0, 0});
  CHECK(r.terms[0].a0 == 0.5);
  CHECK(sigma_l(r, 2) == sigma_l(m, 3));
}
