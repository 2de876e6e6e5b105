#pragma once

// Exact polynomials over Q. Poly<N> is sparse in N indeterminates; UPoly is
// the dense univariate form used for division, GCD and root finding.

#include <gmpxx.h>

#include <algorithm>
#include <array>
#include <complex>
#include <cstddef>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mcfem/errors.hpp"

namespace mcfem::ztan {

using Rational = mpq_class;

/// mpq_class(n, d) is not reduced; arithmetic and == assume reduced operands.
inline Rational canonical(Rational q) {
  q.canonicalize();
  return q;
}

inline std::string rational_text(const Rational& q) { return q.get_str(); }

template <std::size_t N>
class Poly {
 public:
  using Exponent = std::array<unsigned, N>;
  using Terms = std::map<Exponent, Rational>;

  Poly() = default;
  Poly(const Rational& c) {  // NOLINT: implicit constant promotion is intended
    if (c != 0) terms_[Exponent{}] = canonical(c);
  }
  Poly(int c) : Poly(Rational(c)) {}  // NOLINT

  static Poly var(std::size_t i, unsigned power = 1) {
    if (i >= N) throw InvalidArgument("Poly::var: index out of range");
    Exponent e{};
    e[i] = power;
    return monomial(e, 1);
  }

  static Poly monomial(const Exponent& e, const Rational& c) {
    Poly p;
    if (c != 0) p.terms_[e] = canonical(c);
    return p;
  }

  const Terms& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  std::size_t term_count() const noexcept { return terms_.size(); }

  Rational coeff(const Exponent& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? Rational(0) : it->second;
  }

  unsigned degree(std::size_t var) const {
    unsigned d = 0;
    for (const auto& [e, c] : terms_) d = std::max(d, e[var]);
    return d;
  }

  bool depends_on(std::size_t var) const {
    return std::any_of(terms_.begin(), terms_.end(), [var](const auto& t) { return t.first[var] != 0; });
  }

  /// Coefficient of var^k, as a polynomial with var removed (exponent zeroed).
  Poly coeff_in(std::size_t var, unsigned k) const {
    Poly out;
    for (const auto& [e, c] : terms_) {
      if (e[var] != k) continue;
      Exponent f = e;
      f[var] = 0;
      out.terms_[f] = c;
    }
    return out;
  }

  Poly& operator+=(const Poly& o) {
    for (const auto& [e, c] : o.terms_) accumulate(e, c);
    return *this;
  }
  Poly& operator-=(const Poly& o) {
    for (const auto& [e, c] : o.terms_) accumulate(e, -c);
    return *this;
  }
  Poly& operator*=(const Rational& s) {
    if (s == 0) {
      terms_.clear();
      return *this;
    }
    const Rational q = canonical(s);
    for (auto& [e, c] : terms_) c *= q;
    return *this;
  }

  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator-(Poly a) { return a *= Rational(-1); }
  friend Poly operator*(Poly a, const Rational& s) { return a *= s; }
  friend Poly operator*(const Rational& s, Poly a) { return a *= s; }

  friend Poly operator*(const Poly& a, const Poly& b) {
    Poly out;
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_) {
        Exponent e;
        for (std::size_t i = 0; i < N; ++i) e[i] = ea[i] + eb[i];
        out.accumulate(e, ca * cb);
      }
    return out;
  }
  Poly& operator*=(const Poly& o) { return *this = *this * o; }

  friend bool operator==(const Poly& a, const Poly& b) { return a.terms_ == b.terms_; }

  Poly pow(unsigned k) const {
    Poly out(1), base = *this;
    while (k) {
      if (k & 1u) out *= base;
      k >>= 1u;
      if (k) base *= base;
    }
    return out;
  }

  Rational eval(std::array<Rational, N> x) const {
    for (auto& v : x) v.canonicalize();
    Rational s = 0;
    for (const auto& [e, c] : terms_) {
      Rational t = c;
      for (std::size_t i = 0; i < N; ++i)
        for (unsigned k = 0; k < e[i]; ++k) t *= x[i];
      s += t;
    }
    return s;
  }

  template <typename T>
  T eval_as(const std::array<T, N>& x) const {
    T s{};
    for (const auto& [e, c] : terms_) {
      T t = static_cast<T>(c.get_d());
      for (std::size_t i = 0; i < N; ++i)
        for (unsigned k = 0; k < e[i]; ++k) t *= x[i];
      s += t;
    }
    return s;
  }

  /// Substitute var := value exactly; the variable disappears.
  Poly substitute(std::size_t var, const Rational& v) const {
    const Rational value = canonical(v);
    Poly out;
    for (const auto& [e, c] : terms_) {
      Exponent f = e;
      f[var] = 0;
      Rational t = c;
      for (unsigned k = 0; k < e[var]; ++k) t *= value;
      out.accumulate(f, t);
    }
    return out;
  }

  std::string to_string(const std::array<std::string_view, N>& names) const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
      const auto& [e, c] = *it;
      const bool constant = std::all_of(e.begin(), e.end(), [](unsigned k) { return k == 0; });
      Rational mag = abs(c);
      if (first)
        os << (c < 0 ? "-" : "");
      else
        os << (c < 0 ? " - " : " + ");
      first = false;
      bool need_star = false;
      if (constant || mag != 1) {
        os << mag.get_str();
        need_star = true;
      }
      for (std::size_t i = 0; i < N; ++i) {
        if (e[i] == 0) continue;
        if (need_star) os << '*';
        os << names[i];
        if (e[i] > 1) os << '^' << e[i];
        need_star = true;
      }
    }
    return os.str();
  }

  /// Full coefficient list, "(e0,e1,...): c" entries in descending order.
  std::string coefficient_list() const {
    std::ostringstream os;
    os << '[';
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
      if (!first) os << ", ";
      first = false;
      os << '(';
      for (std::size_t i = 0; i < N; ++i) os << (i ? "," : "") << it->first[i];
      os << "): " << it->second.get_str();
    }
    os << ']';
    return os.str();
  }

 private:
  void accumulate(const Exponent& e, const Rational& c) {
    if (c == 0) return;
    const Rational q = canonical(c);
    auto [it, inserted] = terms_.try_emplace(e, q);
    if (!inserted) {
      it->second += q;
      if (it->second == 0) terms_.erase(it);
    }
  }

  Terms terms_;
};

/// Dense univariate polynomial; c[k] multiplies x^k, no trailing zeros.
class UPoly {
 public:
  UPoly() = default;
  explicit UPoly(std::vector<Rational> c) : c_(std::move(c)) {
    for (auto& v : c_) v.canonicalize();
    trim();
  }
  UPoly(const Rational& c) : c_{canonical(c)} { trim(); }  // NOLINT
  UPoly(int c) : UPoly(Rational(c)) {}           // NOLINT

  /// From coefficients listed highest degree first, as polynomials are usually printed.
  static UPoly from_descending(std::initializer_list<Rational> hi_to_lo) {
    std::vector<Rational> c(hi_to_lo.begin(), hi_to_lo.end());
    std::reverse(c.begin(), c.end());
    return UPoly(std::move(c));
  }

  static UPoly x(unsigned power = 1) {
    std::vector<Rational> c(power + 1, 0);
    c[power] = 1;
    return UPoly(std::move(c));
  }

  /// x - root
  static UPoly linear(const Rational& root) { return UPoly(std::vector<Rational>{-root, 1}); }

  bool is_zero() const noexcept { return c_.empty(); }
  /// -1 for the zero polynomial.
  int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }
  const std::vector<Rational>& coeffs() const noexcept { return c_; }
  Rational coeff(std::size_t k) const { return k < c_.size() ? c_[k] : Rational(0); }
  Rational lead() const { return c_.empty() ? Rational(0) : c_.back(); }

  UPoly monic() const {
    if (is_zero()) return *this;
    UPoly out = *this;
    const Rational l = lead();
    for (auto& v : out.c_) v /= l;
    return out;
  }

  UPoly derivative() const {
    if (c_.size() <= 1) return {};
    std::vector<Rational> d(c_.size() - 1);
    for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = c_[k] * static_cast<long>(k);
    return UPoly(std::move(d));
  }

  friend UPoly operator+(const UPoly& a, const UPoly& b) {
    std::vector<Rational> c(std::max(a.c_.size(), b.c_.size()), 0);
    for (std::size_t k = 0; k < a.c_.size(); ++k) c[k] += a.c_[k];
    for (std::size_t k = 0; k < b.c_.size(); ++k) c[k] += b.c_[k];
    return UPoly(std::move(c));
  }
  friend UPoly operator-(const UPoly& a) {
    UPoly out = a;
    for (auto& v : out.c_) v = -v;
    return out;
  }
  friend UPoly operator-(const UPoly& a, const UPoly& b) { return a + (-b); }
  friend UPoly operator*(const UPoly& a, const UPoly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<Rational> c(a.c_.size() + b.c_.size() - 1, 0);
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
    return UPoly(std::move(c));
  }
  friend bool operator==(const UPoly& a, const UPoly& b) { return a.c_ == b.c_; }

  UPoly pow(unsigned k) const {
    UPoly out(1);
    for (unsigned i = 0; i < k; ++i) out = out * *this;
    return out;
  }

  /// Quotient and remainder of Euclidean division.
  friend std::pair<UPoly, UPoly> divmod(const UPoly& a, const UPoly& b) {
    if (b.is_zero()) throw InvalidArgument("UPoly: division by zero polynomial");
    std::vector<Rational> r = a.c_;
    const int db = b.degree();
    if (a.degree() < db) return {UPoly(), a};
    std::vector<Rational> q(static_cast<std::size_t>(a.degree() - db + 1), 0);
    const Rational lb = b.lead();
    for (int k = a.degree(); k >= db; --k) {
      const Rational t = r[static_cast<std::size_t>(k)] / lb;
      q[static_cast<std::size_t>(k - db)] = t;
      if (t == 0) continue;
      for (int j = 0; j <= db; ++j) r[static_cast<std::size_t>(k - db + j)] -= t * b.c_[static_cast<std::size_t>(j)];
    }
    return {UPoly(std::move(q)), UPoly(std::move(r))};
  }

  Rational eval(const Rational& v) const {
    const Rational x = canonical(v);
    Rational s = 0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) s = s * x + *it;
    return s;
  }

  template <typename T>
  T eval_as(const T& x) const {
    T s{};
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) s = s * x + static_cast<T>(it->get_d());
    return s;
  }

  std::string to_string(std::string_view name = "Z") const {
    Poly<1> p;
    for (std::size_t k = 0; k < c_.size(); ++k) p += Poly<1>::monomial({static_cast<unsigned>(k)}, c_[k]);
    return p.to_string({name});
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }
  std::vector<Rational> c_;
};

/// Monic greatest common divisor; gcd(0, 0) = 0.
inline UPoly gcd(UPoly a, UPoly b) {
  while (!b.is_zero()) {
    auto r = divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return a.monic();
}

inline UPoly exact_quotient(const UPoly& a, const UPoly& b) {
  auto [q, r] = divmod(a, b);
  if (!r.is_zero()) throw InvalidArgument("exact_quotient: remainder " + r.to_string());
  return q;
}

/// Yun's square-free decomposition: a = lead * prod f_k^k with each f_k
/// monic, square-free and pairwise coprime. Returns (f_k, k) for f_k != 1.
inline std::vector<std::pair<UPoly, unsigned>> square_free(const UPoly& a) {
  std::vector<std::pair<UPoly, unsigned>> out;
  if (a.degree() < 1) return out;
  const UPoly f = a.monic();
  UPoly g = gcd(f, f.derivative());
  UPoly b = exact_quotient(f, g);
  UPoly c = exact_quotient(f.derivative(), g);
  UPoly d = c - b.derivative();
  unsigned k = 1;
  while (b.degree() > 0) {
    UPoly h = gcd(b, d);
    if (h.degree() > 0) out.emplace_back(h, k);
    b = exact_quotient(b, h);
    c = exact_quotient(d, h);
    d = c - b.derivative();
    ++k;
  }
  return out;
}

/// Read a polynomial that depends only on `var` as a UPoly.
template <std::size_t N>
UPoly as_univariate(const Poly<N>& p, std::size_t var) {
  std::vector<Rational> c(p.degree(var) + 1, 0);
  for (const auto& [e, v] : p.terms()) {
    for (std::size_t i = 0; i < N; ++i)
      if (i != var && e[i] != 0) throw InvalidArgument("as_univariate: polynomial depends on other variables");
    c[e[var]] = v;
  }
  return UPoly(std::move(c));
}

template <std::size_t N>
Poly<N> embed(const UPoly& u, std::size_t var) {
  Poly<N> p;
  for (std::size_t k = 0; k < u.coeffs().size(); ++k) {
    typename Poly<N>::Exponent e{};
    e[var] = static_cast<unsigned>(k);
    p += Poly<N>::monomial(e, u.coeffs()[k]);
  }
  return p;
}

/// Division of a multivariate polynomial by a polynomial in `var` alone,
/// viewing `a` as a polynomial in `var` over the ring of the other variables.
template <std::size_t N>
std::pair<Poly<N>, Poly<N>> divmod_in(const Poly<N>& a, const UPoly& d, std::size_t var) {
  if (d.is_zero()) throw InvalidArgument("divmod_in: division by zero polynomial");
  const auto dd = static_cast<unsigned>(d.degree());
  const Poly<N> dp = embed<N>(d, var);
  Poly<N> q, r = a;
  while (!r.is_zero() && r.degree(var) >= dd) {
    const unsigned k = r.degree(var);
    Poly<N> t = r.coeff_in(var, k) * Poly<N>::var(var, k - dd) * (Rational(1) / d.lead());
    q += t;
    r -= t * dp;
  }
  return {q, r};
}

/// Coefficients of `p` as a polynomial in the other variable of a bivariate
/// polynomial: entry k is the UPoly in `var` multiplying other^k.
inline std::map<unsigned, UPoly> slices(const Poly<2>& p, std::size_t var) {
  const std::size_t other = 1 - var;
  std::map<unsigned, UPoly> out;
  for (unsigned k = 0; k <= p.degree(other); ++k) {
    auto s = p.coeff_in(other, k);
    if (!s.is_zero()) out.emplace(k, as_univariate(s, var));
  }
  return out;
}

/// Drop the last variable, which must not occur.
template <std::size_t N>
Poly<N - 1> drop_last(const Poly<N>& p) {
  Poly<N - 1> out;
  for (const auto& [e, c] : p.terms()) {
    if (e[N - 1] != 0) throw InvalidArgument("drop_last: variable still present");
    typename Poly<N - 1>::Exponent f{};
    std::copy_n(e.begin(), N - 1, f.begin());
    out += Poly<N - 1>::monomial(f, c);
  }
  return out;
}

/// Add a trailing variable that does not occur.
template <std::size_t N>
Poly<N + 1> lift(const Poly<N>& p) {
  Poly<N + 1> out;
  for (const auto& [e, c] : p.terms()) {
    typename Poly<N + 1>::Exponent f{};
    std::copy_n(e.begin(), N, f.begin());
    out += Poly<N + 1>::monomial(f, c);
  }
  return out;
}

}  // namespace mcfem::ztan
