#pragma once

// The bivariate stencil polynomials of the 2D moving-conductor equations and
// exact checks of the factorisation identities used in the elimination.
// Variable 0 is Z_n (along z, the flow), variable 1 is Z_m (along y).
// A monomial Z_n^i Z_m^j stands for the node at offset (i-1, j-1).

#include <initializer_list>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mcfem/ztan/poly.hpp"

namespace mcfem::ztan {

using Poly2 = Poly<2>;

inline constexpr std::array<std::string_view, 2> kZNames{"Zn", "Zm"};

struct Term2 {
  int c;
  unsigned i, j;
};

/// sum c * Zn^i * Zm^j
inline Poly2 poly2(std::initializer_list<Term2> terms) {
  Poly2 p;
  for (const auto& t : terms) p += Poly2::monomial({t.i, t.j}, t.c);
  return p;
}

inline Poly2 zn(const UPoly& u) { return embed<2>(u, 0); }
inline Poly2 zm(const UPoly& u) { return embed<2>(u, 1); }

struct Polys2D {
  Poly2 S1, S2, S3, Q1, Q2, M1, R1, N1;

  std::vector<std::pair<std::string, const Poly2*>> named() const {
    return {{"S1", &S1}, {"S2", &S2}, {"S3", &S3}, {"Q1", &Q1},
            {"Q2", &Q2}, {"M1", &M1}, {"R1", &R1}, {"N1", &N1}};
  }

  Poly2* by_name(std::string_view name) {
    for (const auto& [n, ptr] : named())
      if (n == name) return const_cast<Poly2*>(ptr);
    return nullptr;
  }
};

/// The eight polynomials, transcribed term by term from their printed forms.
inline Polys2D polys_2d() {
  Polys2D p;
  p.S1 = poly2({{1, 2, 2}, {1, 1, 2}, {1, 0, 2}, {1, 2, 1}, {-8, 1, 1}, {1, 0, 1}, {1, 2, 0}, {1, 1, 0}, {1, 0, 0}});
  p.Q2 = poly2({{1, 2, 2}, {-1, 0, 2}, {4, 2, 1}, {-4, 0, 1}, {1, 2, 0}, {-1, 0, 0}});
  p.S2 = poly2({{1, 2, 2}, {-1, 0, 2}, {-1, 2, 0}, {1, 0, 0}});
  p.S3 = poly2({{1, 2, 2}, {4, 1, 2}, {1, 0, 2}, {-2, 2, 1}, {-8, 1, 1}, {-2, 0, 1}, {1, 2, 0}, {4, 1, 0}, {1, 0, 0}});
  p.Q1 = poly2({{1, 2, 2}, {4, 1, 2}, {1, 0, 2}, {-1, 2, 0}, {-4, 1, 0}, {-1, 0, 0}});
  p.M1 = poly2({{1, 2, 2}, {4, 1, 2}, {1, 0, 2}, {4, 2, 1}, {16, 1, 1}, {4, 0, 1}, {1, 2, 0}, {4, 1, 0}, {1, 0, 0}});
  p.R1 = poly2({{1, 2, 2}, {2, 1, 2}, {1, 0, 2}, {-1, 2, 0}, {-2, 1, 0}, {-1, 0, 0}});
  p.N1 = poly2({{1, 2, 2}, {2, 1, 2}, {1, 0, 2}, {2, 2, 1}, {4, 1, 1}, {2, 0, 1}, {1, 2, 0}, {2, 1, 0}, {1, 0, 0}});
  return p;
}

/// Printed Z_m factors: f1 = 2(Zm^2-2Zm+1)(Zm^2+4Zm+1) - 3(Zm^2-1)^2,
/// f2 = -(Zm-1)^4, f3 = (Zm^2-2Zm+1)(Zm^2+2Zm+1) - (Zm^2-1)^2.
inline UPoly printed_f1() {
  const UPoly a = UPoly::from_descending({1, -2, 1}), b = UPoly::from_descending({1, 4, 1});
  const UPoly c = UPoly::from_descending({1, 0, -1});
  return UPoly(2) * a * b - UPoly(3) * c * c;
}
inline UPoly printed_f2() { return -UPoly::from_descending({1, -1}).pow(4); }
inline UPoly printed_f3() {
  const UPoly c = UPoly::from_descending({1, 0, -1});
  return UPoly::from_descending({1, -2, 1}) * UPoly::from_descending({1, 2, 1}) - c * c;
}

/// Z_n^2 + 4 Z_n + 1, Z_n^2 + 2 Z_n + 1 = (Z_n + 1)^2, Z_n^2 - 1
inline UPoly quad_141() { return UPoly::from_descending({1, 4, 1}); }
inline UPoly quad_121() { return UPoly::from_descending({1, 2, 1}); }
inline UPoly quad_10m1() { return UPoly::from_descending({1, 0, -1}); }

inline std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  for (std::string line; std::getline(is, line);) out.push_back(line);
  return out;
}

struct ProofReport {
  struct Item {
    std::string label;
    Poly2 poly;
  };

  std::string name;
  bool passed = true;
  std::vector<Item> items;
  std::vector<std::string> notes;

  void add(std::string label, Poly2 p) { items.push_back({std::move(label), std::move(p)}); }

  void check(bool ok, const std::string& what) {
    notes.push_back(std::string(ok ? "[ok]   " : "[FAIL] ") + what);
    passed = passed && ok;
  }

  std::string to_text() const {
    std::ostringstream os;
    os << "== " << name << ": " << (passed ? "PASS" : "FAIL") << '\n';
    for (const auto& it : items) {
      os << "  " << it.label << " (" << it.poly.term_count() << " terms)\n"
         << "    = " << it.poly.to_string(kZNames) << '\n'
         << "    coefficients (Zn,Zm): " << it.poly.coefficient_list() << '\n';
    }
    for (const auto& n : notes) os << "  " << n << '\n';
    return os.str();
  }
};

/// 2 S3 Q2 - 3 Q1 S2 = (Zn^2 + 4Zn + 1)(Zn^2 - 1) f2(Zm) with f2 = -(Zm - 1)^4.
inline ProofReport verify_identity_denominator(const Polys2D& p = polys_2d()) {
  ProofReport r;
  r.name = "denominator identity 2*S3*Q2 - 3*Q1*S2 = (Zn^2+4Zn+1)(Zn^2-1) f2(Zm)";
  const Poly2 lhs = Rational(2) * p.S3 * p.Q2 - Rational(3) * p.Q1 * p.S2;
  const Poly2 rhs = zn(quad_141() * quad_10m1()) * zm(printed_f2());
  const Poly2 diff = lhs - rhs;
  r.add("LHS expanded", lhs);
  r.add("RHS expanded", rhs);
  r.add("LHS - RHS", diff);
  r.check(diff.is_zero(), "LHS - RHS is the zero polynomial");

  const std::array<Rational, 2> at{2, 3};
  const Rational l = lhs.eval(at), rr = rhs.eval(at);
  r.check(l == rr, "spot value at (Zn, Zm) = (2, 3): LHS = " + l.get_str() + ", RHS = " + rr.get_str());
  const Poly2 l1 = lhs.substitute(0, 1), r1 = rhs.substitute(0, 1);
  r.check(l1.is_zero() && r1.is_zero(), "both sides vanish identically at Zn = 1");
  return r;
}

/// S3 N1 - Q1 R1 and its divisibility by (Zn + 1)^2 and Zn^2 + 4Zn + 1.
/// The Z_m cofactor is obtained by exact division and reported as is.
inline ProofReport verify_identity_numerator(const Polys2D& p = polys_2d()) {
  ProofReport r;
  r.name = "numerator identity S3*N1 - Q1*R1 = (Zn^2+4Zn+1)(Zn^2+2Zn+1) f3(Zm)";
  const Poly2 lhs = p.S3 * p.N1 - p.Q1 * p.R1;
  r.add("S3*N1", p.S3 * p.N1);
  r.add("Q1*R1", p.Q1 * p.R1);
  r.add("S3*N1 - Q1*R1", lhs);

  const auto [q1, rem1] = divmod_in(lhs, quad_121(), 0);
  r.add("remainder mod (Zn+1)^2", rem1);
  r.check(rem1.is_zero(), "(Zn+1)^2 divides S3*N1 - Q1*R1 exactly");
  const auto [q2, rem2] = divmod_in(lhs, quad_141(), 0);
  r.add("remainder mod (Zn^2+4Zn+1)", rem2);
  r.check(rem2.is_zero(), "(Zn^2+4Zn+1) divides S3*N1 - Q1*R1 exactly");

  const auto [cof, rem3] = divmod_in(lhs, quad_141() * quad_121(), 0);
  r.add("derived cofactor f3(Zm)", cof);
  const bool univariate = !cof.depends_on(0);
  r.check(rem3.is_zero() && univariate, "quotient by (Zn^2+4Zn+1)(Zn+1)^2 is a polynomial in Zm alone");

  const Poly2 f3 = zm(printed_f3());
  r.add("printed f3 expanded", f3);
  r.check(cof == f3, "derived cofactor equals printed f3");
  if (lhs.is_zero())
    r.notes.push_back(
        "note: S3*N1 - Q1*R1 is identically zero, so the cofactor is 0 and the elimination "
        "route yields a vanishing leading-order numerator");
  return r;
}

/// 2 S3 M1 - 3 Q1^2 = (Zn^2 + 4Zn + 1)^2 f1(Zm), and the printed f1 against f2.
inline ProofReport verify_identity_galerkin(const Polys2D& p = polys_2d()) {
  ProofReport r;
  r.name = "Galerkin numerator identity 2*S3*M1 - 3*Q1^2 = (Zn^2+4Zn+1)^2 f1(Zm)";
  const Poly2 lhs = Rational(2) * p.S3 * p.M1 - Rational(3) * p.Q1 * p.Q1;
  r.add("2*S3*M1 - 3*Q1^2", lhs);
  const auto [cof, rem] = divmod_in(lhs, quad_141().pow(2), 0);
  r.add("derived cofactor f1(Zm)", cof);
  r.check(rem.is_zero() && !cof.depends_on(0), "(Zn^2+4Zn+1)^2 divides exactly with a Zm-only cofactor");
  const Poly2 f1 = zm(printed_f1());
  r.add("printed f1 expanded", f1);
  r.check(cof == f1, "derived cofactor equals printed f1");
  r.check(f1 == zm(printed_f2()), "printed f1 expands to f2 = -(Zm-1)^4");
  return r;
}

/// N1 = (Zn + 1)^2 (Zm + 1)^2
inline ProofReport verify_n1_factorization(const Polys2D& p = polys_2d()) {
  ProofReport r;
  r.name = "factorisation N1 = (Zn+1)^2 (Zm+1)^2";
  const Poly2 f = zn(quad_121()) * zm(quad_121());
  r.add("N1", p.N1);
  r.add("(Zn+1)^2 (Zm+1)^2", f);
  r.add("difference", p.N1 - f);
  r.check(p.N1 == f, "N1 equals (Zn+1)^2 (Zm+1)^2");
  return r;
}

/// Remaining separable factorisations of the stencil polynomials.
inline ProofReport verify_factorizations(const Polys2D& p = polys_2d()) {
  ProofReport r;
  r.name = "separable factorisations of M1, R1, Q1, S2, S3, Q2";
  const UPoly m1 = UPoly::from_descending({1, -1});
  const UPoly sq_m1 = m1 * m1;
  struct Case {
    const char* name;
    const Poly2* poly;
    Poly2 expected;
  };
  const Case cases[] = {
      {"M1 = (Zn^2+4Zn+1)(Zm^2+4Zm+1)", &p.M1, zn(quad_141()) * zm(quad_141())},
      {"R1 = (Zn+1)^2 (Zm^2-1)", &p.R1, zn(quad_121()) * zm(quad_10m1())},
      {"Q1 = (Zn^2+4Zn+1)(Zm^2-1)", &p.Q1, zn(quad_141()) * zm(quad_10m1())},
      {"S2 = (Zn^2-1)(Zm^2-1)", &p.S2, zn(quad_10m1()) * zm(quad_10m1())},
      {"S3 = (Zn^2+4Zn+1)(Zm-1)^2", &p.S3, zn(quad_141()) * zm(sq_m1)},
      {"Q2 = (Zn^2-1)(Zm^2+4Zm+1)", &p.Q2, zn(quad_10m1()) * zm(quad_141())},
  };
  for (const auto& c : cases) r.check(*c.poly == c.expected, c.name);
  return r;
}

}  // namespace mcfem::ztan
