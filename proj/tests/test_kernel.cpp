#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "sectoria/kernel.hpp"

using namespace sectoria;

namespace {

constexpr double kPi = std::numbers::pi;

cplx oracle_1d(const InterpolantExpr& phi, cplx z, int m) {
  cplx s = 0;
  for (int k = 1; k <= m; ++k) s += phi.eval({double(k)}) * std::pow(z, k);
  return s;
}

// sum_t w_t exp(c_t . zeta) with |c_t| <= 1 and |w_t| <= 1
std::string random_exp_poly(std::mt19937& rng, int nvars) {
  std::uniform_real_distribution<double> u(-1.0, 1.0), r(0.0, 1.0), a(-kPi, kPi);
  std::uniform_int_distribution<int> terms(1, 3);
  std::ostringstream s;
  s.precision(17);
  const int count = terms(rng);
  for (int t = 0; t < count; ++t) {
    if (t) s << "+";
    s << "(" << u(rng) << ")*exp(";
    for (int j = 1; j <= nvars; ++j) {
      const cplx c = std::polar(r(rng) / std::sqrt(double(nvars)), a(rng));
      s << (j > 1 ? "+" : "") << "((" << c.real() << ")+(" << c.imag() << ")*i)*z" << j;
    }
    s << ")";
  }
  return s.str();
}

cplx random_point(std::mt19937& rng) {
  std::uniform_real_distribution<double> r(0.05, 0.3), a(kPi / 2 + 0.01, 1.5 * kPi - 0.01);
  return std::polar(r(rng), a(rng));
}

}  // namespace

TEST_CASE("branched power") {
  CHECK_THROWS_AS(BranchedPower(1.0), Error);
  CHECK_THROWS_AS(BranchedPower(0.0), Error);
  CHECK_NOTHROW(BranchedPower(1.0, true));
  CHECK(std::abs(BranchedPower(-1.0).log_z() - cplx(0, kPi)) < 1e-15);
  CHECK(std::abs(BranchedPower(cplx(0, -2)).arg() - 1.5 * kPi) < 1e-15);
  // just below the positive real axis the argument is close to 2 pi
  CHECK(BranchedPower(cplx(1, -1e-12)).arg() > 2 * kPi - 1e-11);
  const std::vector<cplx> zs{-1.0, 2.0};
  try {
    (void)branched_powers(zs);
    FAIL("expected a domain error");
  } catch (const Error& e) {
    CHECK(e.position() == 2);
  }
}

TEST_CASE("kernel values") {
  const BranchedPower minus_one(-1.0);
  CHECK(std::abs(kernel_1d(0.5, minus_one) - cplx(0, -0.5)) < 1e-15);
  CHECK(std::abs((kernel_1d(0.5, minus_one) * cplx(0, 1)).imag()) < 1e-15);
  CHECK_THROWS_AS(kernel_1d(2.0, minus_one), Error);
  CHECK_THROWS_AS(kernel_1d(cplx(2.05, 0.05), minus_one), Error);
  CHECK_NOTHROW(kernel_1d(cplx(2.0, 0.2), minus_one));

  const std::vector<cplx> half{0.5, 0.5};
  const std::vector<BranchedPower> bps{minus_one, minus_one};
  CHECK(std::abs(kernel_nd(half, bps) - cplx(-0.25, 0)) < 1e-15);

  const std::vector<cplx> pole{0.5, 3.0};
  try {
    (void)kernel_nd(pole, bps);
    FAIL("expected pole proximity");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::pole_proximity);
    CHECK(e.position() == 2);
  }
}

TEST_CASE("kernel is stable far from the real axis") {
  const BranchedPower bp(std::polar(2.0, 1.0));
  for (double eta : {-300.0, -50.0, 50.0, 300.0}) {
    const cplx k = kernel_1d(cplx(0.3, eta), bp);
    CHECK(std::isfinite(k.real()));
    CHECK(std::isfinite(k.imag()));
  }
  // direct formula where it does not overflow
  const cplx zeta(0.3, -2.0);
  const cplx direct = std::exp(zeta * bp.log_z()) / (std::exp(cplx(0, 2 * kPi) * zeta) - 1.0);
  CHECK(std::abs(kernel_1d(zeta, bp) - direct) < 1e-12 * std::abs(direct));
}

TEST_CASE("one-factor product reduces to the scalar kernel") {
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(0.2, 4.0), v(-5, 5), a(0.1, 2 * kPi - 0.1);
  for (int t = 0; t < 10; ++t) {
    const cplx zeta(u(rng) + 0.5, v(rng));
    const std::vector<BranchedPower> bp{BranchedPower(std::polar(u(rng), a(rng)))};
    const std::vector<cplx> zs{zeta};
    CHECK(std::abs(kernel_nd(zs, bp) - kernel_1d(zeta, bp[0])) <= 1e-15 * std::abs(kernel_1d(zeta, bp[0])));
  }
}

TEST_CASE("kernel lower bound constant") {
  const std::vector<cplx> s1{0.5};
  CHECK(std::abs(check_kernel_lower_bound(s1).constant - 0.5) < 1e-15);
  const std::vector<cplx> s2{cplx(0, 10)};
  CHECK(std::abs(check_kernel_lower_bound(s2).constant - 1.0) < 1e-12);
  const std::vector<cplx> s3{cplx(0, -10)};
  CHECK(std::abs(check_kernel_lower_bound(s3).constant - 1.0) < 1e-12);
  const std::vector<cplx> bad{cplx(-1, 0.5)};
  CHECK_THROWS_AS(check_kernel_lower_bound(bad), Error);
  const std::vector<cplx> near{cplx(1.01, 0)};
  CHECK_THROWS_AS(check_kernel_lower_bound(near), Error);
}

TEST_CASE("contour spec") {
  ContourSpec s;
  CHECK_NOTHROW(s.validate());
  s.indent_radius = 0.6;
  CHECK_THROWS_AS(s.validate(), Error);
  const auto d = ContourSpec::for_delta(0.1);
  CHECK(d.indent_radius == 0.05);
  CHECK(d.pole_exclusion == 0.05);
  CHECK_NOTHROW(d.validate());
  CHECK(ContourSpec::for_delta(3.0).indent_radius == 0.5);
}

TEST_CASE("contour pieces integrate dzeta exactly") {
  // integral of 1 over a piece = end - start; of zeta^2 = (end^3 - start^3)/3
  const double w = panel_width(20, 1);
  auto check = [](const ContourNodes& c, cplx start, cplx end) {
    cplx one = 0, sq = 0;
    for (std::size_t k = 0; k < c.size(); ++k) {
      one += c.weights[k];
      sq += c.weights[k] * c.points[k] * c.points[k];
    }
    CHECK(std::abs(one - (end - start)) < 1e-12);
    CHECK(std::abs(sq - (std::pow(end, 3) - std::pow(start, 3)) / 3.0) < 1e-10);
  };
  check(vertical_leg(0.5, 7.0, w), cplx(0, 7), cplx(0, 0.5));
  check(vertical_leg(-7.0, -0.5, w), cplx(0, -0.5), cplx(0, -7));
  check(indent_arc(0.5, w), cplx(0, 0.5), cplx(0, -0.5));
  check(outer_arc(3.5, w), cplx(0, -3.5), cplx(0, 3.5));
  check(deformed_axis(0.25, 9.0, w), cplx(0, 9), cplx(0, -9));
}

TEST_CASE("legs are graded toward the origin") {
  const auto leg = vertical_leg(0.01, 5.0, panel_width(20, 1));
  // the panel touching the lower end is no wider than its distance to 0
  double lowest_top = 1e300;
  for (std::size_t k = 0; k < leg.size(); k += kPanelOrder) {
    double top = 0;
    for (int j = 0; j < kPanelOrder; ++j) top = std::max(top, leg.points[k + j].imag());
    double bottom = 1e300;
    for (int j = 0; j < kPanelOrder; ++j) bottom = std::min(bottom, leg.points[k + j].imag());
    if (bottom < 0.011) lowest_top = std::min(lowest_top, top);
  }
  CHECK(lowest_top <= 0.02);
  CHECK(leg.size() % kPanelOrder == 0);
}

TEST_CASE("residue identity examples") {
  const ContourSpec spec;
  const auto one = InterpolantExpr::parse("1", 1);
  const auto e = InterpolantExpr::parse("exp(z1)", 1);

  const auto r1 = residue_partial_sum_1d(one, 0.5, 3, spec);
  CHECK(r1.oracle == cplx(0.875, 0));
  CHECK(std::abs(r1.integral - 0.875) <= 1e-8);

  const auto r2 = residue_partial_sum_1d(e, -1.0, 2, spec);
  CHECK(std::abs(r2.oracle - cplx(4.670774270471604, 0)) < 1e-12);
  CHECK(r2.rel_error <= 1e-8);

  const auto r3 = residue_partial_sum_1d(e, -0.2, 5, spec);
  CHECK(std::abs(r3.oracle - oracle_1d(e, -0.2, 5)) < 1e-15);
  CHECK(std::abs(r3.integral - r3.oracle) <= 1e-8);
  CHECK(std::abs(r3.legs_part + r3.arc_part - r3.integral) < 1e-12);

  const std::vector<cplx> z2{0.5, 0.5};
  const std::vector<int> m2{2, 2};
  const auto r4 = residue_partial_sum_nd(InterpolantExpr::parse("1", 2), z2, m2, spec);
  CHECK(std::abs(r4.integral - 0.5625) <= 1e-8);

  const std::vector<cplx> z3{-0.3, -0.3};
  const std::vector<int> m3{3, 3};
  const auto r5 = residue_partial_sum_nd(InterpolantExpr::parse("exp(z1+z2)", 2), z3, m3, spec);
  const cplx single = oracle_1d(e, -0.3, 3);
  CHECK(std::abs(r5.oracle - single * single) < 1e-14);
  CHECK(r5.rel_error <= 1e-8);

  const std::vector<cplx> z4{-0.2, -0.2};
  const auto r6 = residue_partial_sum_nd(InterpolantExpr::parse("exp(z1*z2)", 2), z4, m2, spec);
  const cplx four = std::exp(1.0) * 0.04 + 2.0 * std::exp(2.0) * -0.008 + std::exp(4.0) * 0.0016;
  CHECK(std::abs(r6.oracle - four) < 1e-15);
  CHECK(r6.rel_error <= 1e-8);
}

TEST_CASE("residue identity on random one-variable problems") {
  std::mt19937 rng(101);
  std::uniform_int_distribution<int> mm(1, 12);
  for (int t = 0; t < 20; ++t) {
    const std::string src = random_exp_poly(rng, 1);
    const auto phi = InterpolantExpr::parse(src, 1);
    const cplx z = random_point(rng);
    const int m = mm(rng);
    INFO(src << " z=" << z << " m=" << m);
    const auto r = residue_partial_sum_1d(phi, z, m, ContourSpec{});
    CHECK(std::abs(r.integral - r.oracle) <= 1e-8 * (1 + std::abs(r.oracle)));
  }
}

TEST_CASE("residue identity on random two-variable problems") {
  std::mt19937 rng(202);
  std::uniform_int_distribution<int> mm(1, 8);
  for (int t = 0; t < 5; ++t) {
    const std::string src = random_exp_poly(rng, 2);
    const auto phi = InterpolantExpr::parse(src, 2);
    const std::vector<cplx> z{random_point(rng), random_point(rng)};
    const std::vector<int> m{mm(rng), mm(rng)};
    INFO(src);
    const auto r = residue_partial_sum_nd(phi, z, m, ContourSpec{});
    CHECK(std::abs(r.integral - r.oracle) <= 1e-8 * (1 + std::abs(r.oracle)));
  }
}

TEST_CASE("residue check argument validation") {
  const auto phi = InterpolantExpr::parse("1", 2);
  const std::vector<cplx> z{0.5, 0.5};
  const std::vector<int> big{9, 2}, zero{0, 2}, shortm{2};
  CHECK_THROWS_AS(residue_partial_sum_nd(phi, z, big, ContourSpec{}), Error);
  CHECK_THROWS_AS(residue_partial_sum_nd(phi, z, zero, ContourSpec{}), Error);
  CHECK_THROWS_AS(residue_partial_sum_nd(phi, z, shortm, ContourSpec{}), Error);
}

TEST_CASE("integrand decays along the imaginary axis") {
  // sigma = 0 for exp; arg z = sigma + delta + 0.1 with delta = 0.5
  const double delta = 0.5;
  const auto phi = InterpolantExpr::parse("exp(z1)", 1);
  for (double alpha : {delta + 0.1, kPi, 2 * kPi - delta - 0.1}) {
    const BranchedPower bp(std::polar(1.7, alpha));
    for (double sgn : {1.0, -1.0}) {
      // least-squares slope of log|phi k| against |eta| on [5, 40]
      double sx = 0, sy = 0, sxx = 0, sxy = 0, cnt = 0;
      for (double r = 5; r <= 40; r += 0.5) {
        const cplx zeta(0, sgn * r);
        const double y = std::log(std::abs(phi.eval({zeta}) * kernel_1d(zeta, bp)));
        sx += r, sy += y, sxx += r * r, sxy += r * y, cnt += 1;
      }
      const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
      INFO("alpha " << alpha << " sign " << sgn);
      CHECK(-slope >= 0.9 * delta);
    }
  }
}
