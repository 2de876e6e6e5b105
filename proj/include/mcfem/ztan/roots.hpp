#pragma once

// Roots of exact univariate polynomials. The input is first split into
// square-free factors, so numeric rooting never sees repeated roots; real
// roots that are small-denominator rationals are then confirmed exactly.

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include "mcfem/ztan/poly.hpp"

namespace mcfem::ztan {

struct Root {
  std::complex<double> value;
  unsigned multiplicity = 1;
  std::optional<Rational> exact;  ///< set when p(exact) == 0 holds in Q
  std::size_t variable = 0;       ///< which indeterminate (0 = Z_n, 1 = Z_m)
  double residual = 0.0;          ///< |p(value)| / scale, before exact confirmation

  double magnitude() const { return exact ? std::abs(exact->get_d()) : std::abs(value); }
  bool is_real() const { return exact.has_value() || value.imag() == 0.0; }
};

namespace detail {

/// Best rational approximation with denominator <= max_den (continued fractions).
inline Rational rationalize(double x, long max_den = 1000000) {
  long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double v = x;
  for (int it = 0; it < 64; ++it) {
    const double a = std::floor(v);
    if (std::abs(a) > 1e15) break;
    const long ai = static_cast<long>(a);
    const long p2 = ai * p1 + p0, q2 = ai * q1 + q0;
    if (q2 > max_den) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    const double frac = v - a;
    if (frac < 1e-15) break;
    v = 1.0 / frac;
  }
  if (q1 == 0) return Rational(static_cast<long>(std::llround(x)));
  Rational r(p1, q1);
  r.canonicalize();
  return r;
}

/// sum |a_k| |z|^k: the natural magnitude of the terms summed in p(z).
inline double evaluation_scale(const UPoly& p, std::complex<double> z) {
  double s = 0.0, zk = 1.0;
  for (const auto& c : p.coeffs()) {
    s += std::abs(c.get_d()) * zk;
    zk *= std::abs(z);
  }
  return s;
}

inline std::vector<std::complex<double>> companion_roots(const UPoly& p) {
  const int n = p.degree();
  if (n < 1) return {};
  if (n == 1) return {std::complex<double>(Rational(-p.coeff(0) / p.coeff(1)).get_d(), 0.0)};
  const UPoly m = p.monic();
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) c(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) c(i, n - 1) = -m.coeff(static_cast<std::size_t>(i)).get_d();
  Eigen::EigenSolver<Eigen::MatrixXd> es(c, false);
  if (es.info() != Eigen::Success) throw NumericalFailure("companion eigenvalues did not converge", n);
  std::vector<std::complex<double>> out;
  for (int i = 0; i < n; ++i) out.push_back(es.eigenvalues()[i]);
  return out;
}

inline std::complex<double> polish(const UPoly& p, std::complex<double> z0) {
  using C = std::complex<long double>;
  const UPoly dp = p.derivative();
  C z(z0.real(), z0.imag());
  for (int it = 0; it < 50; ++it) {
    const C f = p.eval_as<C>(z);
    const C d = dp.eval_as<C>(z);
    if (std::abs(d) == 0.0L) break;
    const C step = f / d;
    z -= step;
    if (std::abs(step) <= 1e-19L * std::max(1.0L, std::abs(z))) break;
  }
  return {static_cast<double>(z.real()), static_cast<double>(z.imag())};
}

}  // namespace detail

/// All roots of p with multiplicities. Throws NumericalFailure if a polished
/// root's residual exceeds 1e-12 of the evaluation scale.
inline std::vector<Root> find_roots(const UPoly& p, std::size_t variable = 0) {
  std::vector<Root> out;
  for (const auto& [factor, mult] : square_free(p)) {
    UPoly rest = factor;
    // Peel off exact rational roots first.
    for (const auto& z0 : detail::companion_roots(factor)) {
      if (std::abs(z0.imag()) > 1e-6 * std::max(1.0, std::abs(z0))) continue;
      const Rational q = detail::rationalize(detail::polish(factor, z0).real());
      if (rest.degree() >= 1 && rest.eval(q) == 0) {
        rest = exact_quotient(rest, UPoly::linear(q));
        out.push_back({{q.get_d(), 0.0}, mult, q, variable, 0.0});
      }
    }
    for (const auto& z0 : detail::companion_roots(rest)) {
      std::complex<double> z = detail::polish(rest, z0);
      if (std::abs(z.imag()) <= 1e-14 * std::max(1.0, std::abs(z))) z.imag(0.0);
      const double scale = detail::evaluation_scale(rest, z);
      const double res = std::abs(rest.eval_as<std::complex<long double>>({z.real(), z.imag()})) /
                         (scale > 0.0 ? scale : 1.0);
      if (res > 1e-12) throw NumericalFailure("root residual above 1e-12 for " + rest.to_string(), res);
      out.push_back({z, mult, std::nullopt, variable, res});
    }
  }
  std::sort(out.begin(), out.end(), [](const Root& a, const Root& b) {
    if (a.variable != b.variable) return a.variable < b.variable;
    if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
    return a.value.imag() < b.value.imag();
  });
  return out;
}

}  // namespace mcfem::ztan
