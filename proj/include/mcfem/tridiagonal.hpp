#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <sstream>
#include <vector>

#include "mcfem/errors.hpp"

namespace mcfem {

/// N x N tridiagonal matrix; lower[0] and upper[N-1] are unused.
struct Tridiagonal {
  std::vector<double> lower;
  std::vector<double> diag;
  std::vector<double> upper;

  explicit Tridiagonal(std::size_t n = 0) : lower(n, 0.0), diag(n, 0.0), upper(n, 0.0) {}

  std::size_t size() const noexcept { return diag.size(); }

  std::vector<double> multiply(std::span<const double> x) const {
    const std::size_t n = size();
    std::vector<double> y(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double s = diag[i] * x[i];
      if (i > 0) s += lower[i] * x[i - 1];
      if (i + 1 < n) s += upper[i] * x[i + 1];
      y[i] = s;
    }
    return y;
  }

  double norm_inf() const {
    double m = 0.0;
    for (std::size_t i = 0; i < size(); ++i) {
      double s = std::abs(diag[i]);
      if (i > 0) s += std::abs(lower[i]);
      if (i + 1 < size()) s += std::abs(upper[i]);
      m = std::max(m, s);
    }
    return m;
  }
};

struct TridiagonalSolve {
  std::vector<double> x;
  /// min |pivot| / max |pivot| of the LU factors.
  double pivot_ratio;
};

/// Gaussian elimination with partial pivoting (the dgtsv scheme). The
/// matrices produced by convection-dominated stencils are not diagonally
/// dominant, so plain Thomas elimination is not safe here.
inline TridiagonalSolve solve_tridiagonal(const Tridiagonal& a, std::span<const double> rhs) {
  const std::size_t n = a.size();
  if (rhs.size() != n || n == 0) throw InvalidArgument("solve_tridiagonal: size mismatch");

  std::vector<double> dl(a.lower.begin(), a.lower.end());
  std::vector<double> d(a.diag.begin(), a.diag.end());
  std::vector<double> du(a.upper.begin(), a.upper.end());
  std::vector<double> du2(n, 0.0);
  std::vector<double> b(rhs.begin(), rhs.end());

  // dl[i+1] is the subdiagonal entry of row i+1.
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double sub = dl[i + 1];
    if (std::abs(d[i]) >= std::abs(sub)) {
      if (d[i] == 0.0) continue;  // whole column is zero; caught below
      const double f = sub / d[i];
      d[i + 1] -= f * du[i];
      b[i + 1] -= f * b[i];
      dl[i + 1] = 0.0;
    } else {
      const double f = d[i] / sub;
      d[i] = sub;
      const double t = d[i + 1];
      d[i + 1] = du[i] - f * t;
      if (i + 2 < n) {
        du2[i] = du[i + 1];
        du[i + 1] = -f * du2[i];
      }
      du[i] = t;
      std::swap(b[i], b[i + 1]);
      b[i + 1] -= f * b[i];
      dl[i + 1] = 0.0;
    }
  }

  double pmin = std::numeric_limits<double>::infinity();
  double pmax = 0.0;
  for (double p : d) {
    pmin = std::min(pmin, std::abs(p));
    pmax = std::max(pmax, std::abs(p));
  }
  const double ratio = pmax > 0.0 ? pmin / pmax : 0.0;
  if (ratio <= std::numeric_limits<double>::epsilon()) {
    std::ostringstream os;
    os << "tridiagonal matrix is singular or ill-conditioned (pivot ratio " << ratio << ")";
    throw NumericalFailure(os.str(), ratio);
  }

  std::vector<double> x(n);
  x[n - 1] = b[n - 1] / d[n - 1];
  if (n > 1) x[n - 2] = (b[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
  for (std::size_t k = n - 2; k-- > 0;)
    x[k] = (b[k] - du[k] * x[k + 1] - du2[k] * x[k + 2]) / d[k];

  return {std::move(x), ratio};
}

}  // namespace mcfem
