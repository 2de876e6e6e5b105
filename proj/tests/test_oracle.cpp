#include <catch_amalgamated.hpp>

#include <cmath>

#include "mcfem/fem1d.hpp"
#include "mcfem/oracle.hpp"

using namespace mcfem;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

struct Case {
  Scheme scheme;
  double pe;
  double dz;
  PulseLayout layout;
};

const Case kPrinted[] = {
    {Scheme::Galerkin, 200.0, 0.20, {38, 12, 38}},
    {Scheme::ElementAveraged, 2.0, 0.25, {30, 9, 30}},
    {Scheme::ElementAveraged, 400.0, 0.17, {46, 15, 46}},
};

double max_rel(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0, s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d = std::max(d, std::abs(a[i] - b[i]));
    s = std::max(s, std::abs(b[i]));
  }
  return d / s;
}

// Interior residual of the difference equation with weights applied directly
// to the nodal input, independent of the element assembly.
double interior_residual(const AnalyticSolution& s, const Mesh1D& mesh, const FieldProfile& p) {
  const auto& q = s.params();
  const auto y = s.nodal();
  double worst = 0.0;
  for (std::size_t n = 1; n + 1 < y.size(); ++n) {
    const double bm = p.sample({mesh.node(n - 1), 0}), b0 = p.sample({mesh.node(n), 0}),
                 bp = p.sample({mesh.node(n + 1), 0});
    const double rhs = q.scheme == Scheme::Galerkin ? 2.0 * q.pe * q.dz * (bm + 4.0 * b0 + bp) / 6.0
                                                    : 2.0 * q.pe * q.dz * (bm + 2.0 * b0 + bp) / 4.0;
    const double lhs = (-1.0 - q.pe) * y[n - 1] + 2.0 * y[n] + (-1.0 + q.pe) * y[n + 1];
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

}  // namespace

TEST_CASE("closed form matches the FEM solution node by node") {
  for (const auto& c : kPrinted) {
    const Mesh1D mesh = c.layout.mesh(c.dz);
    const FieldProfile p = c.layout.profile(c.dz, 1.0);
    const auto fem = solve_1d(assemble_1d(mesh, Material::for_peclet(1.0, 1.0, c.pe, c.dz), p, c.scheme));
    const auto exact = analytic_solve(c.pe, c.dz, 1.0, c.layout, c.scheme);
    CHECK(max_rel(fem.a_y, exact.nodal()) <= 1e-8);
  }
}

TEST_CASE("closed form satisfies the difference equation and boundary conditions") {
  for (Scheme s : {Scheme::Galerkin, Scheme::ElementAveraged})
    for (double pe : {1.05, 1.5, 2.0, 7.0, 200.0, 400.0, 1e4}) {
      const PulseLayout L{30, 12, 30};
      const double dz = 0.2, B = 1.3;
      const auto sol = analytic_solve(pe, dz, B, L, s);
      const auto y = sol.nodal();
      CHECK(interior_residual(sol, L.mesh(dz), L.profile(dz, B)) <= 1e-9 * B * dz * std::max(1.0, pe));
      CHECK(y.front() == 0.0);
      CHECK_THAT(y[y.size() - 1], WithinAbs(y[y.size() - 2], 1e-12 * B * dz * 60));
    }
}

TEST_CASE("residual budget at modest Pe") {
  for (Scheme s : {Scheme::Galerkin, Scheme::ElementAveraged})
    for (double pe : {1.2, 2.0, 3.0, 10.0}) {
      const PulseLayout L{25, 10, 25};
      const auto sol = analytic_solve(pe, 0.1, 1.0, L, s);
      CHECK(interior_residual(sol, L.mesh(0.1), L.profile(0.1, 1.0)) <= 1e-9 * 0.1 * pe);
    }
}

TEST_CASE("constants and region evaluators") {
  const PulseLayout L{38, 12, 38};
  const auto sol = analytic_solve(200.0, 0.2, 1.0, L, Scheme::Galerkin);
  const auto k = sol.constants();
  CHECK(k.d2 == 0.0);
  CHECK_THAT(k.b1, WithinAbs(-k.b2, 1e-300 + 1e-12 * std::abs(k.b2)));
  // junction continuity
  CHECK_THAT(sol.y_b(L.m_b), WithinAbs(sol.y_f(0), 1e-12));
  CHECK_THAT(sol.y_f(3), WithinAbs(sol.y_c(0), 1e-12));
  CHECK_THAT(sol.y_c(L.m_c), WithinAbs(sol.y_g(0), 1e-12));
  CHECK_THAT(sol.y_g(3), WithinAbs(sol.y_d(0), 1e-12));
  CHECK(sol.params().r == (-1.0 - 200.0) / (-1.0 + 200.0));
  CHECK_THAT(sol.params().lambda, WithinRel(0.2, 1e-15));
}

TEST_CASE("c2-based error equals the closed-form error formulas") {
  for (Scheme s : {Scheme::Galerkin, Scheme::ElementAveraged})
    for (double pe : {2.0, 10.0, 100.0, 1000.0})
      for (std::size_t mc : {8u, 12u, 21u}) {
        const auto sol = analytic_solve(pe, 0.1, 1.0, PulseLayout{30, mc, 30}, s);
        CHECK_THAT(sol.plateau_error(), WithinRel(peak_error(s, pe, 1.0), 1e-9));
        CHECK_THAT(peak_error_in_r(s, pe, 1.0), WithinRel(peak_error(s, pe, 1.0), 1e-10));
      }
}

TEST_CASE("peak error values") {
  CHECK_THAT(peak_error(Scheme::ElementAveraged, 2.0, 1.0), WithinRel(-1.0 / 27.0, 1e-15));
  CHECK_THAT(peak_error(Scheme::ElementAveraged, 2.0, 2.5), WithinRel(-2.5 / 27.0, 1e-15));
  CHECK(peak_error(Scheme::ElementAveraged, 1.0, 1.0) == 0.0);
  CHECK(peak_error(Scheme::Galerkin, 1.0, 1.0) == 0.0);
  CHECK_THAT(peak_error(Scheme::Galerkin, 1e6, 1.0), WithinRel(1.0 / 3.0, 1e-5));
  CHECK_THAT(peak_error(Scheme::ElementAveraged, 1.0 + 1e-9, 1.0), WithinAbs(0.0, 1e-9));
  CHECK_THAT(peak_error(Scheme::Galerkin, 1.0 + 1e-9, 1.0), WithinAbs(0.0, 1e-9));
  CHECK_THROWS_AS(peak_error(Scheme::Galerkin, 0.5, 1.0), OutOfValidity);
}

TEST_CASE("analytic solve requires Pe > 1") {
  CHECK_THROWS_AS(analytic_solve(1.0, 0.1, 1.0, PulseLayout{10, 5, 10}, Scheme::Galerkin), OutOfValidity);
  CHECK_THROWS_AS(analytic_solve(0.3, 0.1, 1.0, PulseLayout{10, 5, 10}, Scheme::ElementAveraged), OutOfValidity);
}

TEST_CASE("error extremum") {
  const auto a = error_extremum(Scheme::ElementAveraged);
  CHECK_FALSE(a.asymptotic);
  CHECK_THAT(a.pe, WithinAbs(2.0, 1e-10));
  CHECK_THAT(std::abs(a.error), WithinRel(1.0 / 27.0, 1e-12));
  CHECK(peak_error_slope(Scheme::ElementAveraged, 2.0) == 0.0);

  const auto g = error_extremum(Scheme::Galerkin);
  CHECK(g.asymptotic);
  CHECK(g.error == Catch::Approx(1.0 / 3.0));
  // monotone growth beyond the shallow dip near Pe = 1.3
  double prev = peak_error(Scheme::Galerkin, 1.4, 1.0);
  for (double pe = 1.5; pe <= 1e4; pe *= 1.1) {
    const double e = peak_error(Scheme::Galerkin, pe, 1.0);
    CHECK(e > prev);
    CHECK(e < 1.0 / 3.0);
    prev = e;
  }
}

TEST_CASE("slopes agree with finite differences") {
  for (Scheme s : {Scheme::Galerkin, Scheme::ElementAveraged})
    for (double pe : {1.3, 2.0, 5.0, 40.0}) {
      const double h = 1e-6 * pe;
      const double fd = (peak_error(s, pe + h, 1.0) - peak_error(s, pe - h, 1.0)) / (2 * h);
      CHECK_THAT(peak_error_slope(s, pe), WithinAbs(fd, 1e-7));
    }
}

TEST_CASE("averaged-to-Galerkin error ratio vanishes as Pe grows") {
  double prev = 1e300;
  for (double pe : {10.0, 100.0, 1e3, 1e4, 1e5}) {
    const double ratio = std::abs(peak_error(Scheme::ElementAveraged, pe, 1.0) / peak_error(Scheme::Galerkin, pe, 1.0));
    CHECK(ratio < prev);
    prev = ratio;
  }
  CHECK(prev < 1e-9);
}
