#include <catch_amalgamated.hpp>

#include <cmath>

#include "mcfem/ztan/transfer.hpp"

using namespace mcfem;
using namespace mcfem::ztan;

namespace {

UPoly num1(const RationalFunction<1>& f) { return as_univariate(f.numerator(), 0); }
UPoly den1(const RationalFunction<1>& f) { return as_univariate(f.denominator(), 0); }

}  // namespace

TEST_CASE("1D Galerkin limit") {
  const auto lim = tf_1d_limit(Scheme::Galerkin);
  CHECK(lim.pe_order == 0);
  CHECK(den1(lim.shape) == UPoly::from_descending({1, 0, -1}));
  CHECK(num1(lim.shape) == UPoly::from_descending({1, 4, 1}) * Rational(1, 3));
  const auto rep = analyze(lim.shape);
  CHECK(rep.has_pole(1));
  CHECK(rep.has_pole(-1));
  CHECK(rep.classification == Stability::OscillatoryMarginal);
  CHECK(rep.cancelled_pairs.empty());
  REQUIRE(rep.zeros.size() == 2);
  std::vector<double> z{rep.zeros[0].value.real(), rep.zeros[1].value.real()};
  std::sort(z.begin(), z.end());
  CHECK(z[0] == Catch::Approx(-2.0 - std::sqrt(3.0)).epsilon(1e-14));
  CHECK(z[1] == Catch::Approx(-2.0 + std::sqrt(3.0)).epsilon(1e-14));
  CHECK(std::round(z[0] * 100) / 100 == -3.73);
  CHECK(std::round(z[1] * 100) / 100 == -0.27);
}

TEST_CASE("1D averaged limit cancels the Z = -1 pole") {
  const auto lim = tf_1d_limit(Scheme::ElementAveraged);
  CHECK(lim.pe_order == 0);
  CHECK(den1(lim.shape) == UPoly::linear(1));
  CHECK(num1(lim.shape) == UPoly::linear(-1) * Rational(1, 2));
  CHECK(lim.shape.cancelled()[0] == UPoly::linear(-1));
  const auto rep = analyze(lim.shape);
  CHECK(rep.has_cancelled(-1));
  CHECK(rep.poles.size() == 1);
  CHECK(rep.has_pole(1));
  CHECK(rep.classification == Stability::MarginallyStable);
  CHECK_FALSE(rep.oscillatory);
}

TEST_CASE("1D transfer function at finite Pe") {
  const auto a = tf_1d(Scheme::ElementAveraged, Rational(2), Rational(1, 4));
  const auto rep = analyze(a);
  CHECK(rep.has_pole(-3));
  CHECK(rep.has_pole(1));
  CHECK(rep.classification == Stability::Unstable);
  CHECK(rep.oscillatory);
  CHECK(num1(a) == UPoly::linear(-1).pow(2) * Rational(1, 4));  // dz * 2Pe/4 / (Pe - 1)

  CHECK_THROWS_AS(tf_1d(Scheme::Galerkin, Rational(1), Rational(1)), SingularNormalization);
  try {
    tf_1d(Scheme::ElementAveraged, Rational(1), Rational(1));
  } catch (const SingularNormalization& e) {
    CHECK(std::string(e.what()).find("2*Z - 2") != std::string::npos);
  }
}

TEST_CASE("denominator factors as (Z - 1)(Z - r) for every Pe > 1") {
  for (const Rational& pe : {Rational(3, 2), Rational(2), Rational(7), Rational(401, 2), Rational(100000)}) {
    const Rational r = (-1 - pe) / (-1 + pe);
    for (Scheme s : {Scheme::Galerkin, Scheme::ElementAveraged}) {
      const auto f = tf_1d(s, pe, Rational(1, 5));
      const UPoly expected = UPoly::linear(1) * UPoly::linear(r);
      CHECK(den1(f) == expected);
      const auto rep = analyze(f);
      CHECK(rep.oscillatory);
      bool found = false;
      for (const auto& p : rep.poles)
        if (p.exact && *p.exact == r) found = std::abs(p.magnitude() - Rational((pe + 1) / (pe - 1)).get_d()) < 1e-14;
      CHECK(found);
    }
    // no accidental cancellation for Galerkin
    CHECK(num1(tf_1d(Scheme::Galerkin, pe, 1)).eval(r) != 0);
  }
}

TEST_CASE("averaged cancellation is asymptotic") {
  double prev = 1e300;
  for (int pe : {2, 10, 100, 1000, 100000}) {
    const Rational r = canonical(Rational(-1 - pe, -1 + pe));
    const double gap = std::abs(Rational(r + 1).get_d());
    CHECK(gap < prev);
    prev = gap;
    CHECK(num1(tf_1d(Scheme::ElementAveraged, Rational(pe), 1)).eval(r) != 0);
  }
  CHECK(prev < 1e-4);
}

TEST_CASE("trivial reduction") {
  const Poly<1> p = Poly<1>::var(0) - Poly<1>(Rational(1, 2));
  const RationalFunction<1> f(p, p);
  const auto rep = analyze(f);
  CHECK(rep.poles.empty());
  CHECK(rep.zeros.empty());
  CHECK(rep.has_cancelled(Rational(1, 2)));
  CHECK(rep.classification == Stability::Stable);
}

TEST_CASE("2D Galerkin transfer function") {
  const auto tf = tf_2d(Scheme::Galerkin);
  CHECK(tf.limit.pe_order == 0);
  REQUIRE(tf.limit.shape.separable());
  CHECK(tf.limit.shape.denominator_parts()[0].monic() == UPoly::from_descending({1, 0, -1}));
  const auto rep = analyze(tf.limit.shape);
  CHECK(rep.has_pole(-1, 0));
  CHECK(rep.has_pole(1, 0));
  CHECK(rep.zeros_complete);
  CHECK(separate(tf.limit.shape.numerator()).has_value());
  // the leading-order elimination route gives the same ratio
  CHECK_FALSE(tf.elimination_degenerate);
  CHECK(tf.elimination_numerator * tf.limit.shape.denominator() ==
        tf.elimination_denominator * tf.limit.shape.numerator());
}

TEST_CASE("2D averaged transfer function has no Zn = -1 pole") {
  const auto tf = tf_2d(Scheme::ElementAveraged);
  REQUIRE(tf.limit.shape.separable());
  const auto rep = analyze(tf.limit.shape);
  CHECK_FALSE(rep.has_pole(-1, 0));
  for (const auto& p : rep.poles)
    if (p.variable == 0) CHECK(std::abs(p.value + 1.0) > 1e-3);
  CHECK(tf.limit.pe_order == -1);
  CHECK(tf.limit.shape.denominator_parts()[0].monic() == UPoly::from_descending({1, 4, 1}));
  CHECK(tf.elimination_degenerate);
}

TEST_CASE("limit forms agree with exact evaluation at large Pe") {
  for (Scheme s : {Scheme::Galerkin, Scheme::ElementAveraged}) {
    const auto sys = z_system_2d(s);
    auto ay = sys.a;
    for (std::size_t r = 0; r < 3; ++r) ay[r][1] = sys.b[r];
    const Poly<3> det = det3(sys.a), det_y = det3(ay);
    const auto tf = tf_2d(s);
    const Rational pe(1000000000);
    for (const auto& z : {std::array<Rational, 2>{Rational(3, 10), Rational(7, 10)},
                          std::array<Rational, 2>{Rational(-2, 5), Rational(1, 3)}}) {
      const std::array<Rational, 3> at{z[0], z[1], pe};
      const Rational exact = det_y.eval(at) / det.eval(at);
      Rational scale = 1;
      for (int k = 0; k < std::abs(tf.limit.pe_order); ++k) scale *= pe;
      if (tf.limit.pe_order < 0) scale = 1 / scale;
      const Rational lim = scale * tf.limit.shape.numerator().eval(z) / tf.limit.shape.denominator().eval(z);
      CHECK(std::abs(Rational((exact - lim) / lim).get_d()) < 1e-6);
    }
  }
}

TEST_CASE("non-separable bivariate denominators are rejected") {
  const Poly2 x = Poly2::var(0), y = Poly2::var(1);
  const RationalFunction<2> f(Poly2(1), x + y);
  CHECK_FALSE(f.separable());
  CHECK_THROWS_AS(analyze(f), UnsupportedStructure);
}

TEST_CASE("separation of products") {
  const Poly2 p = zn(quad_141()) * zm(quad_10m1()) * Rational(-3, 2);
  const auto s = separate(p);
  REQUIRE(s.has_value());
  CHECK(s->c == Rational(-3, 2));
  CHECK(s->p == quad_141());
  CHECK(s->q == quad_10m1());
  CHECK_FALSE(separate(Poly2::var(0) + Poly2::var(1)).has_value());
}

TEST_CASE("certificates pass and fail under perturbation") {
  CHECK(certify_transfer_functions().passed);
}
