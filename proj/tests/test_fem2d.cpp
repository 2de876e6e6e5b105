#include <catch_amalgamated.hpp>

#include <cmath>

#include "mcfem/fem2d.hpp"
#include "mcfem/ztan/transfer.hpp"

using namespace mcfem;
using ztan::Poly2;
using ztan::Rational;

namespace {

constexpr Field kFields[3] = {Field::Phi, Field::Ay, Field::Az};

// Uniform unit grid, all conductor, mu = sigma = 1 so that u = 2 Pe.
Mesh2D unit_patch() { return Mesh2D(5, 1.0, std::vector<double>(4, 1.0), 0.0, 0.0); }

Poly2 as_poly(const std::map<std::array<unsigned, 2>, Rational>& st) {
  Poly2 p;
  for (const auto& [e, v] : st) p += Poly2::monomial(e, v);
  return p;
}

SheetGeometry small_sheet(std::size_t nz = 41) {
  SheetGeometry g;
  g.conductor_rows = 6;
  g.air_rows = 5;
  g.air_growth = 1.4;
  g.air_factor = 2.0;
  g.axial_length = 6.0;
  g.nz = nz;
  return g;
}

}  // namespace

TEST_CASE("interior rows equal the Z-domain polynomials exactly on a 5x5 patch") {
  const Mesh2D mesh = unit_patch();
  const auto regions = RegionMap2D::all_conductor(mesh);
  const FieldProfile prof(RectPulse2D{100.0, 100.0, 1.0});
  for (int pe_twice : {4, 7, 13}) {
    const Rational pe = ztan::canonical(Rational(pe_twice, 2));
    const double u = static_cast<double>(pe_twice);
    const Material mat(1.0, 1.0, u);
    const Rational ur(pe_twice);
    const Rational row_scale[3] = {ur, 1, 1};
    const Rational col_scale[3] = {1 / ur, 1, 1};
    for (Scheme s : {Scheme::Galerkin, Scheme::ElementAveraged}) {
      const auto sys = assemble_2d<Rational>(mesh, mat, regions, prof, s);
      const auto z = ztan::z_system_2d(s);
      for (std::size_t i = 1; i <= 3; ++i)
        for (std::size_t j = 1; j <= 3; ++j)
          for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) {
              const Poly2 got = as_poly(row_stencil(sys, kFields[r], kFields[c], i, j));
              const Poly2 want = ztan::drop_last(z.a[r][c].substitute(2, pe)) * (row_scale[r] * col_scale[c]);
              CHECK(got == want);
            }
            const Poly2 load = as_poly(row_stencil(sys, kFields[r], Field::Phi, i, j, true));
            CHECK(load == ztan::drop_last(z.b[r].substitute(2, pe)) * row_scale[r]);
          }
    }
  }
}

TEST_CASE("A_z row couples to phi with weights Pe/(6u) (+-1, +-4, +-1)") {
  const Mesh2D mesh = unit_patch();
  const auto sys = assemble_2d<Rational>(mesh, Material(1.0, 1.0, 4.0), RegionMap2D::all_conductor(mesh),
                                         FieldProfile(RectPulse2D{9, 9, 1}), Scheme::Galerkin);
  const auto st = row_stencil(sys, Field::Az, Field::Phi, 2, 2);
  const Rational w = Rational(2) / (6 * 4);  // Pe / (6 u)
  CHECK(st.size() == 6);
  CHECK(st.at({2, 2}) == w);
  CHECK(st.at({0, 2}) == -w);
  CHECK(st.at({2, 1}) == 4 * w);
  CHECK(st.at({0, 1}) == -4 * w);
  CHECK(st.at({2, 0}) == w);
  CHECK(st.at({0, 0}) == -w);
}

TEST_CASE("averaged A_y load is the (1,2,1) x (1,2,1)/16 stencil times 2 Pe dz") {
  const Mesh2D mesh = unit_patch();
  const auto sys = assemble_2d<Rational>(mesh, Material(1.0, 1.0, 4.0), RegionMap2D::all_conductor(mesh),
                                         FieldProfile(RectPulse2D{9, 9, 1}), Scheme::ElementAveraged);
  const auto st = row_stencil(sys, Field::Ay, Field::Phi, 2, 2, true);
  const int w[3] = {1, 2, 1};
  for (unsigned a = 0; a < 3; ++a)
    for (unsigned b = 0; b < 3; ++b) CHECK(st.at({a, b}) == ztan::canonical(Rational(w[a] * w[b], 16)) * 2 * 2);
}

TEST_CASE("constant input gives identical right-hand sides under both schemes") {
  const auto g = small_sheet(9);
  const Mesh2D mesh = g.mesh();
  const auto regions = g.regions(mesh);
  const FieldProfile flat(RectPulse2D{1e3, 1e3, 0.75});
  const Material mat(2.0, 0.5, 3.0);
  const auto a = assemble_2d<Rational>(mesh, mat, regions, flat, Scheme::Galerkin);
  const auto b = assemble_2d<Rational>(mesh, mat, regions, flat, Scheme::ElementAveraged);
  REQUIRE(a.rhs.size() == b.rhs.size());
  for (std::size_t k = 0; k < a.rhs.size(); ++k) CHECK(a.rhs[k] == b.rhs[k]);
}

TEST_CASE("zero input gives the zero solution") {
  const auto g = small_sheet();
  const Mesh2D mesh = g.mesh();
  const FieldProfile zero(SmoothCircle2D{0.5, 0.0});
  for (Scheme s : {Scheme::Galerkin, Scheme::ElementAveraged}) {
    const auto sol = solve_2d(assemble_2d(mesh, Material::for_peclet(1.0, 1.0, 60.0, mesh.dz()), g.regions(mesh),
                                          zero, s));
    for (double v : sol.a_y) CHECK(v == 0.0);
    for (double v : sol.phi) CHECK(v == 0.0);
    for (const auto& p : axis_profile(sol, mesh)) CHECK(p.b_x == 0.0);
  }
}

TEST_CASE("solve meets the residual budget") {
  const auto g = small_sheet();
  const Mesh2D mesh = g.mesh();
  const FieldProfile prof(SmoothCircle2D{0.5, 1.0});
  for (double pe : {0.5, 2.0, 60.0, 2000.0})
    for (Scheme s : {Scheme::Galerkin, Scheme::ElementAveraged}) {
      const auto sol = solve_2d(assemble_2d(mesh, Material::for_peclet(7.21e6, kMu0, pe, mesh.dz()),
                                            g.regions(mesh), prof, s));
      CHECK(sol.residual <= sol.budget);
      CHECK(sol.budget > 0.0);
    }
}

TEST_CASE("inputs even in y give b_x even in y") {
  const auto g = small_sheet();
  const Mesh2D mesh = g.mesh();
  const FieldProfile prof(SmoothCircle2D{0.5, 1.0});
  for (Scheme s : {Scheme::Galerkin, Scheme::ElementAveraged}) {
    const auto sol = solve_2d(assemble_2d(mesh, Material::for_peclet(1.0, 1.0, 5.0, mesh.dz()), g.regions(mesh),
                                          prof, s));
    double peak = 0.0, asym = 0.0;
    const std::size_t rows = mesh.ny() - 1;
    for (std::size_t j = 0; j < rows; ++j)
      for (std::size_t i = 0; i + 1 < mesh.nz(); ++i) {
        const double a = sol.b_x[mesh.element(i, j)], b = sol.b_x[mesh.element(i, rows - 1 - j)];
        peak = std::max(peak, std::abs(a));
        asym = std::max(asym, std::abs(a - b));
      }
    CHECK(asym <= 1e-8 * peak);
  }
}

TEST_CASE("sheet regions") {
  const auto g = small_sheet();
  const Mesh2D mesh = g.mesh();
  const auto reg = g.regions(mesh);
  std::size_t conducting_rows = 0;
  double thickness = 0.0;
  for (std::size_t j = 0; j + 1 < mesh.ny(); ++j)
    if (reg.at(mesh.element(0, j)) > 0.0) {
      ++conducting_rows;
      thickness += mesh.row_heights()[j];
    }
  CHECK(conducting_rows == g.conductor_rows);
  CHECK(thickness == Catch::Approx(g.thickness));
  CHECK(mesh.y(mesh.ny() - 1) == Catch::Approx(0.5 * g.thickness + g.air_factor * g.thickness));
  CHECK(mesh.centerline_row().has_value());
  CHECK_THROWS_AS(assemble_2d(mesh, Material(1, 1, 1), RegionMap2D(std::vector<double>(3, 1.0)),
                              FieldProfile(SmoothCircle2D{1, 1}), Scheme::Galerkin),
                  InvalidArgument);
  CHECK_THROWS_AS(RegionMap2D(std::vector<double>{1.0, -1.0}), InvalidArgument);
}

TEST_CASE("axis profile needs a centreline row") {
  const Mesh2D mesh(4, 1.0, {1.0, 1.0, 1.0}, 0.0, -1.5);
  REQUIRE_FALSE(mesh.centerline_row().has_value());
  Solution2D sol;
  sol.b_x.assign(mesh.element_count(), 0.0);
  CHECK_THROWS_AS(axis_profile(sol, mesh), InvalidArgument);
}

TEST_CASE("oscillation metric") {
  std::vector<TracePoint> lin, alt;
  for (int n = 0; n < 20; ++n) {
    lin.push_back({double(n), 0.3 * n - 1.0});
    alt.push_back({double(n), n % 2 ? 0.01 : -0.01});
  }
  CHECK(oscillation_metric(lin, 1.0) == Catch::Approx(0.0).margin(1e-15));
  CHECK(oscillation_metric(alt, 2.0) == Catch::Approx(0.01));
  CHECK_THROWS_AS(oscillation_metric(lin, 0.0), InvalidArgument);
  CHECK_THROWS_AS(oscillation_metric(std::vector<TracePoint>(2), 1.0), InvalidArgument);
}

TEST_CASE("on a coarse grid the averaged scheme oscillates less than Galerkin at high Pe") {
  auto g = small_sheet(31);
  g.axial_length = 12.0;
  const Mesh2D mesh = g.mesh();
  const FieldProfile prof(SmoothCircle2D{0.5, 1.0});
  const Material mat = Material::for_peclet(1.0, 1.0, 2000.0, mesh.dz());
  const auto tg = axis_profile(solve_2d(assemble_2d(mesh, mat, g.regions(mesh), prof, Scheme::Galerkin)), mesh);
  const auto ta = axis_profile(solve_2d(assemble_2d(mesh, mat, g.regions(mesh), prof, Scheme::ElementAveraged)), mesh);
  CHECK(oscillation_metric(ta, 1.0) < oscillation_metric(tg, 1.0));
}
