#pragma once

// Closed-form nodal solution of the 1D difference equation for a
// rectangular-pulse input, region by region:
//
//   B: y = b1 + b2 r^n                 0 <= n <= m_b
//   F: y = f1 + f2 r^n + y_pf(n)       0 <= n <= 3   (rising edge)
//   C: y = c1 + c2 r^n + lambda n      0 <= n <= m_c (plateau)
//   G: y = g1 + g2 r^n + y_pg(n)       0 <= n <= 3   (falling edge)
//   D: y = d1 + d2 r^n                 0 <= n <= m_d
//
// with r = (-1-Pe)/(-1+Pe) and lambda = B dz. The quartic particular
// solutions on F and G absorb the three-node weighting of the input.
//
// For Pe > 1, |r| > 1 and r^m overflows quickly for the longer regions, so
// each homogeneous coefficient is kept scaled by r^(region length): the
// evaluators only ever form r^(n - m) with n <= m.

#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "mcfem/core.hpp"
#include "mcfem/errors.hpp"

namespace mcfem {

struct AnalyticParams {
  double pe;
  double r;
  double lambda;
  double amplitude;
  double dz;
  PulseLayout layout;
  Scheme scheme;
};

namespace detail {

/// Neumaier-compensated sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

template <typename... Ts>
double csum(Ts... xs) {
  CompensatedSum s;
  (s.add(xs), ...);
  return s.value();
}

struct Quartic {
  double c4, c3, c2, c1;
  double operator()(double n) const { return n * (c1 + n * (c2 + n * (c3 + n * c4))); }
};

/// Particular solutions on the rising (F) and falling (G) edges.
inline std::pair<Quartic, Quartic> edge_particulars(Scheme scheme, double r, double lambda) {
  const double q = r - 1.0;
  if (scheme == Scheme::Galerkin) {
    const double c3 = lambda * (r - 2.0) / (6.0 * q);
    const double c2 = lambda * (r * r - 5.0) / (8.0 * q * q);
    Quartic f{-lambda / 24.0, c3, c2,
              -lambda * (r * r * r - 10.0 * r * r + 17.0 * r + 4.0) / (12.0 * q * q * q)};
    Quartic g{lambda / 24.0, -c3, -c2,
              lambda * (13.0 * r * r * r - 46.0 * r * r + 53.0 * r - 8.0) / (12.0 * q * q * q)};
    return {f, g};
  }
  const double c3 = lambda * (r - 2.0) / (12.0 * q);
  const double c2 = lambda * (7.0 * r * r - 8.0 * r - 11.0) / (48.0 * q * q);
  Quartic f{-lambda / 48.0, c3, c2,
            lambda * (r * r * r + 8.0 * r * r - 19.0 * r - 2.0) / (24.0 * q * q * q)};
  Quartic g{lambda / 48.0, -c3, -c2,
            lambda * (23.0 * r * r * r - 80.0 * r * r + 91.0 * r - 22.0) / (24.0 * q * q * q)};
  return {f, g};
}

}  // namespace detail

class AnalyticSolution {
 public:
  struct Constants {
    double b1, b2, f1, f2, c1, c2, g1, g2, d1, d2;
  };

  const AnalyticParams& params() const noexcept { return p_; }

  /// Coefficients as printed: b2 multiplies r^n on region B, etc. Some of
  /// these underflow or overflow for long regions; the evaluators do not use them.
  Constants constants() const {
    const auto& L = p_.layout;
    const double r = p_.r;
    return {b1_,
            b2s_ * std::pow(r, -static_cast<double>(L.m_b)),
            f1_,
            f2s_ * std::pow(r, -3.0),
            c1_,
            c2s_ * std::pow(r, -static_cast<double>(L.m_c)),
            g1_,
            g2s_ * std::pow(r, -3.0),
            d1_,
            0.0};
  }

  /// c2 * r^m_c, the plateau oscillation amplitude at the end of the plateau.
  double c2_scaled() const noexcept { return c2s_; }

  double y_b(std::size_t n) const { return detail::csum(b1_, b2s_ * rpow(n, p_.layout.m_b)); }
  double y_f(std::size_t n) const { return detail::csum(f1_, f2s_ * rpow(n, 3), pf_(double(n))); }
  double y_c(std::size_t n) const {
    return detail::csum(c1_, c2s_ * rpow(n, p_.layout.m_c), p_.lambda * double(n));
  }
  double y_g(std::size_t n) const { return detail::csum(g1_, g2s_ * rpow(n, 3), pg_(double(n))); }
  double y_d(std::size_t) const { return d1_; }

  /// Value at a global node index of the concatenated mesh.
  double at(std::size_t node) const {
    const auto& L = p_.layout;
    if (node < L.f_start()) return y_b(node);
    if (node < L.c_start()) return y_f(node - L.f_start());
    if (node < L.g_start()) return y_c(node - L.c_start());
    if (node < L.d_start()) return y_g(node - L.g_start());
    if (node < L.node_count()) return y_d(node - L.d_start());
    throw InvalidArgument("AnalyticSolution::at: node outside layout");
  }

  std::vector<double> nodal() const {
    std::vector<double> y(p_.layout.node_count());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = at(i);
    return y;
  }

  /// Spurious flux density on the last plateau element,
  /// c2 (r^(m_c - 1) - r^m_c) / dz.
  double plateau_error() const { return c2s_ * (1.0 / p_.r - 1.0) / p_.dz; }

 private:
  friend AnalyticSolution analytic_solve(double, double, double, const PulseLayout&, Scheme);

  double rpow(std::size_t n, std::size_t m) const {
    return std::pow(p_.r, static_cast<double>(n) - static_cast<double>(m));
  }

  AnalyticParams p_{};
  detail::Quartic pf_{}, pg_{};
  double b1_ = 0, b2s_ = 0, f1_ = 0, f2s_ = 0, c1_ = 0, c2s_ = 0, g1_ = 0, g2s_ = 0, d1_ = 0;
};

inline AnalyticSolution analytic_solve(double pe, double dz, double amplitude,
                                       const PulseLayout& layout, Scheme scheme) {
  if (!(pe > 1.0)) throw OutOfValidity("analytic_solve: closed form requires Pe > 1");
  if (!(dz > 0.0)) throw InvalidArgument("analytic_solve: dz must be > 0");
  layout.validate();

  AnalyticSolution s;
  const double r = (-1.0 - pe) / (-1.0 + pe);
  const double lambda = amplitude * dz;
  s.p_ = {pe, r, lambda, amplitude, dz, layout, scheme};
  auto [pf, pg] = detail::edge_particulars(scheme, r, lambda);
  s.pf_ = pf;
  s.pg_ = pg;

  const double mc = static_cast<double>(layout.m_c);
  const double rm1 = r - 1.0;
  const double pow_mc = std::pow(r, -mc);
  const double pow_mb = std::pow(r, -static_cast<double>(layout.m_b));
  const double pow3 = 1.0 / (r * r * r);
  auto ypc = [lambda](double n) { return lambda * n; };

  // Scaled coefficients: X2s = X2 * r^(region length).
  s.g2s_ = r * (pg(2.0) - pg(3.0)) / rm1;
  const double g2 = s.g2s_ * pow3;
  s.c2s_ = detail::csum(r * (ypc(mc - 1.0) - ypc(mc)) / rm1, g2, pg(1.0) / rm1, lambda);
  const double c2 = s.c2s_ * pow_mc;
  s.f2s_ = detail::csum(r * (pf(2.0) - pf(3.0)) / rm1, c2, ypc(1.0) / rm1, lambda);
  const double f2 = s.f2s_ * pow3;
  s.b2s_ = detail::csum(f2, pf(1.0) / rm1);
  const double b2 = s.b2s_ * pow_mb;

  s.b1_ = -b2;
  s.f1_ = detail::csum(s.b1_, s.b2s_, -f2);
  s.c1_ = detail::csum(s.f1_, s.f2s_, pf(3.0), -c2);
  s.g1_ = detail::csum(s.c1_, s.c2s_, ypc(mc), -g2);
  s.d1_ = detail::csum(s.g1_, s.g2s_, pg(3.0));
  return s;
}

/// Closed-form peak spurious flux density (signed) for Pe > 1:
///   averaged:  B (1 - Pe) / (1 + Pe)^3
///   Galerkin:  B (Pe^2 - 3)(Pe - 1) / (3 (1 + Pe)^3)
inline double peak_error(Scheme scheme, double pe, double amplitude) {
  if (!(pe >= 1.0)) throw OutOfValidity("peak_error: formula holds for Pe >= 1");
  const double d = (1.0 + pe) * (1.0 + pe) * (1.0 + pe);
  if (scheme == Scheme::ElementAveraged) return amplitude * (1.0 - pe) / d;
  return amplitude * (pe * pe - 3.0) * (pe - 1.0) / (3.0 * d);
}

/// The same quantity written in r = (1+Pe)/(1-Pe):
///   averaged B (r^2 + 2r + 1)/(4 r^3),  Galerkin B (r^2 + 4r + 1)/(6 r^3).
inline double peak_error_in_r(Scheme scheme, double pe, double amplitude) {
  if (!(pe > 1.0)) throw OutOfValidity("peak_error_in_r: requires Pe > 1");
  const double r = (1.0 + pe) / (1.0 - pe);
  if (scheme == Scheme::ElementAveraged)
    return amplitude * (r * r + 2.0 * r + 1.0) / (4.0 * r * r * r);
  return amplitude * (r * r + 4.0 * r + 1.0) / (6.0 * r * r * r);
}

struct ErrorExtremum {
  double pe;
  double error;     ///< signed peak error at pe (amplitude 1)
  bool asymptotic;  ///< supremum approached only as Pe -> infinity
};

/// d/dPe of peak_error for unit amplitude:
///   averaged  (2Pe - 4)/(1 + Pe)^4,  Galerkin  4(Pe^2 + Pe - 3)/(3 (1 + Pe)^4).
inline double peak_error_slope(Scheme scheme, double pe) {
  const double d = std::pow(1.0 + pe, 4);
  if (scheme == Scheme::ElementAveraged) return (2.0 * pe - 4.0) / d;
  return 4.0 * (pe * pe + pe - 3.0) / (3.0 * d);
}

/// Maximiser over Pe > 1 of |peak_error|. The averaged error has a single
/// interior extremum, located by bisection on the sign of the slope. The
/// Galerkin error only has a shallow local extremum near Pe = 1.3 and then
/// grows monotonically toward 1/3, so its supremum is asymptotic.
inline ErrorExtremum error_extremum(Scheme scheme) {
  if (scheme == Scheme::Galerkin)
    return {std::numeric_limits<double>::infinity(), 1.0 / 3.0, true};

  double lo = 1.0 + 1e-9, hi = 1.0e4;
  while (hi - lo > 1e-12 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (peak_error_slope(scheme, mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  const double pe = 0.5 * (lo + hi);
  return {pe, peak_error(scheme, pe, 1.0), false};
}

}  // namespace mcfem
