#pragma once

// Z-domain transfer functions A_y/B_x of the discrete moving-conductor
// equations, their exact reduction and the pole-zero stability report.

#include <array>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mcfem/core.hpp"
#include "mcfem/ztan/identities.hpp"
#include "mcfem/ztan/poly.hpp"
#include "mcfem/ztan/roots.hpp"

namespace mcfem::ztan {

/// c * p(Zn) * q(Zm) with p, q monic.
struct SeparableForm {
  Rational c;
  UPoly p;
  UPoly q;
};

/// Split a bivariate polynomial into univariate factors, if it is separable.
inline std::optional<SeparableForm> separate(const Poly2& a) {
  if (a.is_zero()) return std::nullopt;
  const auto s = slices(a, 0);
  UPoly p;
  for (const auto& [k, u] : s) p = gcd(p, u);
  std::vector<Rational> qc(a.degree(1) + 1, 0);
  for (const auto& [k, u] : s) {
    auto [quot, rem] = divmod(u, p);
    if (!rem.is_zero() || quot.degree() != 0) return std::nullopt;
    qc[k] = quot.coeff(0);
  }
  UPoly q(std::move(qc));
  const Rational c = q.lead();
  return SeparableForm{c, p, q.monic()};
}

/// Numerator over denominator, reduced by exact GCD. In two variables the
/// reduction requires a separable denominator; otherwise the pair is kept
/// as given and separable() is false. The removed common factor is kept
/// so that cancelled pole-zero pairs can be reported.
template <std::size_t N>
class RationalFunction {
  static_assert(N == 1 || N == 2, "RationalFunction supports one or two variables");

 public:
  RationalFunction(Poly<N> num, Poly<N> den) : num_(std::move(num)), den_(std::move(den)) {
    if (den_.is_zero()) throw InvalidArgument("RationalFunction: zero denominator");
    if constexpr (N == 1) reduce_1();
    else reduce_2();
  }

  const Poly<N>& numerator() const noexcept { return num_; }
  const Poly<N>& denominator() const noexcept { return den_; }
  bool separable() const noexcept { return separable_; }
  /// Univariate common factors removed per variable (monic; 1 when none).
  const std::array<UPoly, N>& cancelled() const noexcept { return cancelled_; }
  /// Denominator factor per variable after reduction (two-variable case).
  const std::array<UPoly, N>& denominator_parts() const noexcept { return den_parts_; }

  template <typename T>
  T eval_as(const std::array<T, N>& z) const {
    return num_.template eval_as<T>(z) / den_.template eval_as<T>(z);
  }

  std::string to_string(const std::array<std::string_view, N>& names) const {
    return "(" + num_.to_string(names) + ") / (" + den_.to_string(names) + ")";
  }

 private:
  void reduce_1() {
    const UPoly n = as_univariate(num_, 0), d = as_univariate(den_, 0);
    const UPoly g = n.is_zero() ? UPoly(1) : gcd(n, d);
    UPoly nr = exact_quotient(n, g), dr = exact_quotient(d, g);
    const Rational l = dr.lead();
    nr = nr * UPoly(Rational(1) / l);
    dr = dr.monic();
    num_ = embed<1>(nr, 0);
    den_ = embed<1>(dr, 0);
    cancelled_[0] = g;
    den_parts_[0] = dr;
  }

  void reduce_2() {
    cancelled_ = {UPoly(1), UPoly(1)};
    const auto sep = separate(den_);
    if (!sep) {
      separable_ = false;
      return;
    }
    UPoly parts[2] = {sep->p, sep->q};
    Poly2 n = num_ * (Rational(1) / sep->c);
    for (std::size_t v = 0; v < 2; ++v) {
      UPoly g = parts[v];
      for (const auto& [k, u] : slices(n, v)) g = gcd(g, u);
      if (n.is_zero()) g = UPoly(1);
      if (g.degree() > 0) {
        parts[v] = exact_quotient(parts[v], g);
        n = divmod_in(n, g, v).first;
      }
      cancelled_[v] = g.monic();
    }
    num_ = n;
    den_ = zn(parts[0]) * zm(parts[1]);
    den_parts_ = {parts[0], parts[1]};
  }

  Poly<N> num_;
  Poly<N> den_;
  bool separable_ = true;
  std::array<UPoly, N> cancelled_{};
  std::array<UPoly, N> den_parts_{};
};

/// H ~ dz * Pe^pe_order * shape as Pe -> infinity.
template <std::size_t N>
struct LimitForm {
  RationalFunction<N> shape;
  int pe_order;
};

/// Leading behaviour in the last variable (Pe) of num/den over N+1 variables.
template <std::size_t N>
LimitForm<N> pe_limit(const Poly<N + 1>& num, const Poly<N + 1>& den) {
  const unsigned dn = num.degree(N), dd = den.degree(N);
  return {RationalFunction<N>(drop_last(num.coeff_in(N, dn)), drop_last(den.coeff_in(N, dd))),
          static_cast<int>(dn) - static_cast<int>(dd)};
}

namespace detail {

/// Unnormalised 1D transfer function in (Z, Pe), per unit dz:
/// num = 2 Pe w(Z), den = (Pe - 1) Z^2 + 2 Z - (1 + Pe).
inline std::pair<Poly<2>, Poly<2>> tf_1d_parts(Scheme scheme) {
  using P = Poly<2>;
  const P z = P::var(0), pe = P::var(1);
  const P w = scheme == Scheme::Galerkin ? (z * z + P(4) * z + P(1)) * Rational(1, 6)
                                         : (z + P(1)).pow(2) * Rational(1, 4);
  P num = P(2) * pe * w;
  P den = (pe - P(1)) * z * z + P(2) * z - (P(1) + pe);
  return {num, den};
}

}  // namespace detail

/// Transfer function of the 1D difference equation at an exact Peclet number,
/// normalised so the denominator is monic: Z^2 + 2Z/(Pe-1) - (1+Pe)/(Pe-1).
inline RationalFunction<1> tf_1d(Scheme scheme, const Rational& pe, const Rational& dz) {
  auto [num, den] = detail::tf_1d_parts(scheme);
  const Poly<1> n = drop_last(num.substitute(1, pe)) * dz;
  const Poly<1> d = drop_last(den.substitute(1, pe));
  if (pe == 1) {
    throw SingularNormalization("tf_1d: Pe = 1 makes the Z^2 coefficient vanish; unreduced form (" +
                                n.to_string({"Z"}) + ") / (" + d.to_string({"Z"}) + ")");
  }
  return RationalFunction<1>(n, d);
}

inline RationalFunction<1> tf_1d(Scheme scheme, Peclet pe, double dz) {
  return tf_1d(scheme, Rational(pe.value()), Rational(dz));
}

/// Pe -> infinity form of tf_1d, per unit dz.
inline LimitForm<1> tf_1d_limit(Scheme scheme) {
  auto [num, den] = detail::tf_1d_parts(scheme);
  return pe_limit<1>(num, den);
}

/// Z-domain system of the 2D equations on a uniform all-conductor grid, in
/// variables (Zn, Zm, Pe), per unit dz and with u_z = 1. Unknowns are
/// (phi/u_z, A_y, A_z); rows are current continuity (divided by u_z), A_y, A_z.
struct ZSystem2D {
  std::array<std::array<Poly<3>, 3>, 3> a;
  std::array<Poly<3>, 3> b;
};

inline ZSystem2D z_system_2d(Scheme scheme, const Polys2D& p = polys_2d()) {
  using P = Poly<3>;
  const P pe = P::var(2);
  const P S1 = lift(p.S1), S2 = lift(p.S2), S3 = lift(p.S3), Q1 = lift(p.Q1), Q2 = lift(p.Q2);
  const bool gal = scheme == Scheme::Galerkin;
  ZSystem2D s;
  s.a[0] = {S1 * Rational(1, 3), S2 * Rational(1, 4), S3 * Rational(-1, 6)};
  s.a[1] = {pe * Q1 * Rational(1, 6), S1 * Rational(-1, 3) + pe * Q2 * Rational(1, 6),
            pe * Q1 * Rational(-1, 6)};
  s.a[2] = {pe * Q2 * Rational(1, 6), P(), S1 * Rational(-1, 3)};
  s.b[0] = gal ? Q1 * Rational(1, 12) : lift(p.R1) * Rational(1, 8);
  s.b[1] = gal ? pe * lift(p.M1) * Rational(1, 18) : pe * lift(p.N1) * Rational(1, 8);
  s.b[2] = P();
  return s;
}

template <typename P>
P det3(const std::array<std::array<P, 3>, 3>& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

struct TransferFunction2D {
  Scheme scheme;
  /// A_y/B_x ~ dz * Pe^pe_order * shape, from exact elimination of all three fields.
  LimitForm<2> limit;
  /// Leading-order elimination of phi and A_z (A_z row, then the current
  /// continuity row without its phi term): den * A_y = dz * num * B_x.
  Poly2 elimination_numerator;
  Poly2 elimination_denominator;
  bool elimination_degenerate;
};

inline TransferFunction2D tf_2d(Scheme scheme, const Polys2D& p = polys_2d()) {
  const ZSystem2D s = z_system_2d(scheme, p);
  auto ay = s.a;
  for (std::size_t r = 0; r < 3; ++r) ay[r][1] = s.b[r];
  const Poly<3> det = det3(s.a), det_y = det3(ay);

  // Q2 A_y - Q1 A_z = 6 r_y B and S2/4 A_y - S3/6 A_z = r_phi B, with r_y the
  // A_y-row load per unit Pe, give (2 S3 Q2 - 3 Q1 S2) A_y = 12 (S3 r_y - Q1 r_phi) B.
  const Poly2 r_phi = drop_last(s.b[0]);
  const Poly2 r_y = drop_last(s.b[1].coeff_in(2, 1));
  const Poly2 en = Rational(12) * (p.S3 * r_y - p.Q1 * r_phi);
  const Poly2 ed = Rational(2) * p.S3 * p.Q2 - Rational(3) * p.Q1 * p.S2;
  return {scheme, pe_limit<2>(det_y, det), en, ed, en.is_zero()};
}

enum class Stability { Stable, MarginallyStable, OscillatoryMarginal, Unstable };

inline std::string_view to_string(Stability s) {
  switch (s) {
    case Stability::Stable: return "stable";
    case Stability::MarginallyStable: return "marginally-stable";
    case Stability::OscillatoryMarginal: return "oscillatory-marginal";
    case Stability::Unstable: return "unstable";
  }
  return "?";
}

struct PoleZeroReport {
  std::size_t variables = 1;
  std::vector<Root> poles;
  std::vector<Root> zeros;
  std::vector<Root> cancelled_pairs;
  Stability classification = Stability::Stable;
  /// A negative real pole on or outside the unit circle (node-to-node alternation).
  bool oscillatory = false;
  /// False when a bivariate numerator is not separable; its zeros are then omitted.
  bool zeros_complete = true;

  bool has_pole(const Rational& z, std::size_t var = 0) const {
    for (const auto& r : poles)
      if (r.variable == var && r.exact && *r.exact == z) return true;
    return false;
  }
  bool has_cancelled(const Rational& z, std::size_t var = 0) const {
    for (const auto& r : cancelled_pairs)
      if (r.variable == var && r.exact && *r.exact == z) return true;
    return false;
  }

  std::string to_text() const {
    static constexpr std::array<std::string_view, 2> names{"Zn", "Zm"};
    auto fmt = [&](const Root& r) {
      std::ostringstream os;
      os << (variables == 1 ? "Z" : names[r.variable]) << " = ";
      if (r.exact)
        os << r.exact->get_str();
      else if (r.value.imag() == 0.0)
        os << r.value.real();
      else
        os << r.value.real() << (r.value.imag() < 0 ? " - " : " + ") << std::abs(r.value.imag()) << "i";
      if (r.multiplicity > 1) os << " (x" << r.multiplicity << ")";
      return os.str();
    };
    std::ostringstream os;
    os.precision(12);
    auto list = [&](const char* label, const std::vector<Root>& v) {
      os << "  " << label << ":";
      if (v.empty()) os << " none";
      for (const auto& r : v) os << "\n    " << fmt(r) << "   |.| = " << r.magnitude();
      os << '\n';
    };
    list("poles", poles);
    list("zeros", zeros);
    if (!zeros_complete) os << "    (numerator not separable; zeros not listed)\n";
    list("cancelled pole-zero pairs", cancelled_pairs);
    os << "  classification: " << to_string(classification) << (oscillatory ? " (oscillatory)" : "")
       << '\n';
    return os.str();
  }
};

namespace detail {

inline void classify(PoleZeroReport& rep) {
  bool outside = false, minus_one = false, on_circle = false;
  for (const auto& r : rep.poles) {
    const double m = r.magnitude();
    const bool exact_unit = r.exact && (*r.exact == 1 || *r.exact == -1);
    if (r.exact && *r.exact == -1) minus_one = true;
    if (exact_unit || (!r.exact && std::abs(m - 1.0) <= 1e-12)) {
      on_circle = true;
    } else if (m > 1.0) {
      outside = true;
    }
    if (r.is_real() && r.value.real() < 0.0 && (m > 1.0 || exact_unit || std::abs(m - 1.0) <= 1e-12))
      rep.oscillatory = true;
  }
  rep.classification = outside      ? Stability::Unstable
                       : minus_one  ? Stability::OscillatoryMarginal
                       : on_circle  ? Stability::MarginallyStable
                                    : Stability::Stable;
}

inline void append(std::vector<Root>& dst, std::vector<Root> src) {
  dst.insert(dst.end(), src.begin(), src.end());
}

}  // namespace detail

inline PoleZeroReport analyze(const RationalFunction<1>& rf) {
  PoleZeroReport rep;
  rep.poles = find_roots(as_univariate(rf.denominator(), 0));
  rep.zeros = find_roots(as_univariate(rf.numerator(), 0));
  rep.cancelled_pairs = find_roots(rf.cancelled()[0]);
  detail::classify(rep);
  return rep;
}

inline PoleZeroReport analyze(const RationalFunction<2>& rf) {
  if (!rf.separable())
    throw UnsupportedStructure("analyze: bivariate denominator is not separable");
  PoleZeroReport rep;
  rep.variables = 2;
  for (std::size_t v = 0; v < 2; ++v) {
    detail::append(rep.poles, find_roots(rf.denominator_parts()[v], v));
    detail::append(rep.cancelled_pairs, find_roots(rf.cancelled()[v], v));
  }
  if (!rf.numerator().is_zero()) {
    if (auto sep = separate(rf.numerator())) {
      detail::append(rep.zeros, find_roots(sep->p, 0));
      detail::append(rep.zeros, find_roots(sep->q, 1));
    } else {
      rep.zeros_complete = false;
    }
  }
  detail::classify(rep);
  return rep;
}

/// Exact pole-zero certificates for the 1D and 2D transfer functions in the
/// Pe -> infinity limit. Each check is decided in exact arithmetic; the
/// numeric root values are reported alongside.
inline ProofReport certify_transfer_functions(const Polys2D& p = polys_2d()) {
  ProofReport r;
  r.name = "pole-zero certificates (Pe -> infinity)";
  auto line = [&](const std::string& s) { r.notes.push_back(s); };

  {
    const auto lim = tf_1d_limit(Scheme::Galerkin);
    const auto rep = analyze(lim.shape);
    const UPoly num = as_univariate(lim.shape.numerator(), 0);
    line("1D Galerkin: H/dz = " + lim.shape.to_string({"Z"}));
    for (const auto& t : split_lines(rep.to_text())) line(t);
    r.check(rep.poles.size() == 2 && rep.has_pole(1) && rep.has_pole(-1), "1D Galerkin poles are exactly {+1, -1}");
    r.check(num.monic() == quad_141(), "1D Galerkin zeros are the roots of Z^2 + 4Z + 1, i.e. -2 +- sqrt(3)");
    bool two_dec = rep.zeros.size() == 2;
    for (const auto& z : rep.zeros) {
      const double v = z.value.real();
      two_dec = two_dec && (std::abs(std::round(v * 100.0) / 100.0 + 0.27) < 1e-9 ||
                            std::abs(std::round(v * 100.0) / 100.0 + 3.73) < 1e-9);
    }
    r.check(two_dec, "1D Galerkin zeros round to -0.27 and -3.73");
    r.check(rep.classification == Stability::OscillatoryMarginal, "1D Galerkin classified oscillatory-marginal");
  }
  {
    const auto lim = tf_1d_limit(Scheme::ElementAveraged);
    const auto rep = analyze(lim.shape);
    line("1D averaged: H/dz = " + lim.shape.to_string({"Z"}));
    for (const auto& t : split_lines(rep.to_text())) line(t);
    r.check(rep.has_cancelled(-1), "1D averaged: pole-zero pair at Z = -1 cancelled exactly");
    r.check(rep.poles.size() == 1 && rep.has_pole(1), "1D averaged: remaining pole set is {+1}");
  }
  for (Scheme s : {Scheme::Galerkin, Scheme::ElementAveraged}) {
    const auto tf = tf_2d(s, p);
    const auto rep = analyze(tf.limit.shape);
    const std::string tag = std::string("2D ") + (s == Scheme::Galerkin ? "Galerkin" : "averaged");
    line(tag + ": A_y/B_x ~ dz * Pe^" + std::to_string(tf.limit.pe_order) + " * " +
         tf.limit.shape.to_string(kZNames));
    for (const auto& t : split_lines(rep.to_text())) line(t);
    line(tag + ": leading-order elimination numerator = " + tf.elimination_numerator.to_string(kZNames) +
         (tf.elimination_degenerate ? "  (identically zero)" : ""));
    if (s == Scheme::Galerkin)
      r.check(rep.has_pole(-1, 0), "2D Galerkin retains a Zn = -1 pole");
    else
      r.check(!rep.has_pole(-1, 0), "2D averaged has no Zn = -1 pole");
  }
  return r;
}

}  // namespace mcfem::ztan
