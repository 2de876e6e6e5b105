#include <catch_amalgamated.hpp>

#include <random>

#include "mcfem/tridiagonal.hpp"

using namespace mcfem;

namespace {

double residual_inf(const Tridiagonal& a, const std::vector<double>& x, const std::vector<double>& b) {
  const auto ax = a.multiply(x);
  double m = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) m = std::max(m, std::abs(ax[i] - b[i]));
  return m;
}

double norm_inf(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST_CASE("solves a small system exactly") {
  Tridiagonal a(3);
  a.diag = {2.0, 2.0, 2.0};
  a.lower = {0.0, -1.0, -1.0};
  a.upper = {-1.0, -1.0, 0.0};
  const auto s = solve_tridiagonal(a, std::vector<double>{1.0, 0.0, 1.0});
  CHECK(s.x[0] == Catch::Approx(1.0));
  CHECK(s.x[1] == Catch::Approx(1.0));
  CHECK(s.x[2] == Catch::Approx(1.0));
}

TEST_CASE("convection-dominated stencils need pivoting and still meet the residual budget") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double pe : {0.5, 2.0, 50.0, 2000.0, 1e6}) {
    const std::size_t n = 400;
    Tridiagonal a(n);
    for (std::size_t i = 0; i < n; ++i) {
      a.diag[i] = 2.0;
      if (i > 0) a.lower[i] = -1.0 - pe;
      if (i + 1 < n) a.upper[i] = -1.0 + pe;
    }
    a.diag[0] = 1.0;
    a.upper[0] = 0.0;
    std::vector<double> b(n);
    for (auto& v : b) v = u(rng);
    const auto s = solve_tridiagonal(a, b);
    CHECK(residual_inf(a, s.x, b) <= 1e-10 * (a.norm_inf() * norm_inf(s.x) + norm_inf(b)));
  }
}

TEST_CASE("singular matrix is reported") {
  Tridiagonal a(3);
  a.diag = {1.0, 1.0, 0.0};
  a.upper = {1.0, 1.0, 0.0};
  a.lower = {0.0, 1.0, 0.0};
  // rows 1 and 2 are dependent on row 0 after elimination
  a.lower[2] = 0.0;
  a.diag[2] = 0.0;
  CHECK_THROWS_AS(solve_tridiagonal(a, std::vector<double>{1.0, 1.0, 1.0}), NumericalFailure);
}

TEST_CASE("size mismatch") {
  CHECK_THROWS_AS(solve_tridiagonal(Tridiagonal(3), std::vector<double>{1.0}), InvalidArgument);
}
