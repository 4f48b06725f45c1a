#pragma once

#include <algorithm>
#include <cstdint>
#include <array>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sostrat/rational.hpp"

namespace sostrat {

/// Exponent triple of a monomial x1^e1 * x2^e2 * x3^e3. Ordered
/// lexicographically by the default array comparison, which fixes the
/// canonical term order everywhere (printing, division, iteration).
using Monomial = std::array<unsigned, 3>;

inline Monomial mono_mul(const Monomial& a, const Monomial& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}

inline bool mono_divides(const Monomial& d, const Monomial& m) {
  return d[0] <= m[0] && d[1] <= m[1] && d[2] <= m[2];
}

inline unsigned mono_total_degree(const Monomial& m) { return m[0] + m[1] + m[2]; }

/// Sparse polynomial in x1, x2, x3 with exact rational coefficients.
///
/// Invariants: no stored coefficient is zero; the zero polynomial is the
/// empty term map. All arithmetic is exact.
class Poly {
 public:
  Poly() = default;
  Poly(const Rational& c) {
    if (c != 0) terms_[{0, 0, 0}] = c;
  }
  Poly(long long c) : Poly(Rational(c)) {}

  /// x_var for var in {1,2,3}.
  static Poly variable(int var) {
    Poly p;
    Monomial m{0, 0, 0};
    m[check_var(var)] = 1;
    p.terms_[m] = 1;
    return p;
  }

  static Poly monomial(const Monomial& m, const Rational& c) {
    Poly p;
    if (c != 0) p.terms_[m] = c;
    return p;
  }

  const std::map<Monomial, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  bool is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == Monomial{0, 0, 0});
  }

  /// Coefficient of the given monomial (zero if absent).
  Rational coeff(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Rational(0) : it->second;
  }

  Rational constant_term() const { return coeff({0, 0, 0}); }

  int total_degree() const {
    int d = -1;
    for (auto& [m, c] : terms_) d = std::max(d, int(mono_total_degree(m)));
    return d;  // -1 for the zero polynomial
  }

  int degree_in(int var) const {
    int v = check_var(var), d = -1;
    for (auto& [m, c] : terms_) d = std::max(d, int(m[v]));
    return d;
  }

  bool depends_on(int var) const {
    int v = check_var(var);
    for (auto& [m, c] : terms_) {
      if (m[v] > 0) return true;
    }
    return false;
  }

  void add_term(const Monomial& m, const Rational& c) {
    auto it = terms_.find(m);
    if (it == terms_.end()) {
      if (c != 0) terms_[m] = c;
      return;
    }
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }

  Poly operator-() const {
    Poly r = *this;
    for (auto& [m, c] : r.terms_) c = -c;
    return r;
  }

  Poly& operator+=(const Poly& o) {
    for (auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  Poly& operator-=(const Poly& o) {
    for (auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }

  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }

  friend Poly operator*(const Poly& a, const Poly& b) {
    Poly r;
    for (auto& [ma, ca] : a.terms_)
      for (auto& [mb, cb] : b.terms_) r.add_term(mono_mul(ma, mb), ca * cb);
    return r;
  }
  Poly& operator*=(const Poly& o) { return *this = *this * o; }

  friend Poly operator*(const Rational& c, const Poly& p) {
    Poly r;
    if (c == 0) return r;
    r.terms_ = p.terms_;
    for (auto& [m, v] : r.terms_) v *= c;
    return r;
  }

  Poly pow(unsigned e) const {
    Poly r(1), base = *this;
    while (e) {
      if (e & 1u) r *= base;
      base *= base;
      e >>= 1u;
    }
    return r;
  }

  friend bool operator==(const Poly& a, const Poly& b) { return a.terms_ == b.terms_; }
  friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

  static int check_var(int var) {
    if (var < 1 || var > 3) throw std::invalid_argument("variable index must be 1, 2 or 3");
    return var - 1;
  }

 private:
  std::map<Monomial, Rational> terms_;
};

inline Poly operator*(const Poly& p, const Rational& c) { return c * p; }

/// Exact partial derivative with respect to x_var.
inline Poly diff(const Poly& p, int var) {
  int v = Poly::check_var(var);
  Poly r;
  for (auto& [m, c] : p.terms()) {
    if (m[v] == 0) continue;
    Monomial d = m;
    d[v]--;
    r.add_term(d, c * m[v]);
  }
  return r;
}

/// Largest m with x_var^m dividing p; nullopt (infinity) for the zero polynomial.
inline std::optional<int> ord_var(const Poly& p, int var) {
  int v = Poly::check_var(var);
  if (p.is_zero()) return std::nullopt;
  int o = INT32_MAX;
  for (auto& [m, c] : p.terms()) o = std::min(o, int(m[v]));
  return o;
}

inline Rational eval(const Poly& p, const std::array<Rational, 3>& x) {
  Rational acc = 0;
  for (auto& [m, c] : p.terms()) {
    Rational t = c;
    for (int v = 0; v < 3; ++v)
      for (unsigned i = 0; i < m[v]; ++i) t *= x[v];
    acc += t;
  }
  return acc;
}

/// Substitutes `repl` for x_var. The replacement may itself contain x_var.
inline Poly subst(const Poly& p, int var, const Poly& repl) {
  int v = Poly::check_var(var);
  // Group terms by the exponent of x_var, then expand with cached powers.
  std::map<unsigned, Poly> by_exp;
  for (auto& [m, c] : p.terms()) {
    Monomial rest = m;
    rest[v] = 0;
    by_exp[m[v]].add_term(rest, c);
  }
  Poly result;
  Poly power(1);
  unsigned cur = 0;
  for (auto& [e, coefpoly] : by_exp) {
    while (cur < e) {
      power *= repl;
      ++cur;
    }
    result += coefpoly * power;
  }
  return result;
}

/// Exact multivariate division: returns q with p = q * d, or nullopt when the
/// division leaves a remainder. Lex term order; `d` must be nonzero.
inline std::optional<Poly> divide_exact(const Poly& p, const Poly& d) {
  if (d.is_zero()) throw std::invalid_argument("division by the zero polynomial");
  Poly rem = p, quot;
  const auto& lead = *d.terms().rbegin();  // largest monomial in lex order
  while (!rem.is_zero()) {
    const auto& [m, c] = *rem.terms().rbegin();
    if (!mono_divides(lead.first, m)) return std::nullopt;
    Monomial qm{m[0] - lead.first[0], m[1] - lead.first[1], m[2] - lead.first[2]};
    Rational qc = c / lead.second;
    Poly t = Poly::monomial(qm, qc);
    quot += t;
    rem -= t * d;
  }
  return quot;
}

/// Drops every monomial of total degree > n.
inline Poly trunc_total(const Poly& p, int n) {
  Poly r;
  for (auto& [m, c] : p.terms())
    if (int(mono_total_degree(m)) <= n) r.add_term(m, c);
  return r;
}

/// Truncated multiplicative inverse: q with p*q = 1 + O(degree n+1).
/// Requires a unit constant term.
inline Poly inverse_trunc(const Poly& p, int n) {
  Rational c0 = p.constant_term();
  if (c0 == 0) throw std::domain_error("inverse_trunc: constant term is zero");
  // p = c0 (1 - u) with u of positive order, so 1/p = (1/c0) sum u^k.
  Poly u = Poly(1) - p * (Rational(1) / c0);
  Poly acc(1), upow(1);
  for (int k = 1; k <= n; ++k) {
    upow = trunc_total(upow * u, n);
    if (upow.is_zero()) break;
    acc += upow;
  }
  return trunc_total(acc * (Rational(1) / c0), n);
}

namespace detail {

/// Rational content with the sign of the lex-leading coefficient; dividing by
/// it yields an integer primitive polynomial with positive leading term.
inline Rational rational_content(const Poly& p) {
  if (p.is_zero()) return 0;
  Rational g = 0;
  for (auto& [m, c] : p.terms()) g = rational_gcd(g, c);
  if (p.terms().rbegin()->second < 0) g = -g;
  return g;
}

/// Coefficients of p viewed as a univariate polynomial in x_var whose
/// coefficients are polynomials in the remaining variables. coeffs[k] is the
/// coefficient of x_var^k.
inline std::vector<Poly> coeffs_in(const Poly& p, int var) {
  int v = Poly::check_var(var);
  std::vector<Poly> out(size_t(p.degree_in(var) + 1));
  for (auto& [m, c] : p.terms()) {
    Monomial rest = m;
    rest[v] = 0;
    out[m[v]].add_term(rest, c);
  }
  return out;
}

inline Poly from_coeffs(const std::vector<Poly>& coeffs, int var) {
  Poly x = Poly::variable(var), acc, power(1);
  for (size_t k = 0; k < coeffs.size(); ++k) {
    acc += coeffs[k] * power;
    power *= x;
  }
  return acc;
}

Poly gcd_poly(const Poly& a, const Poly& b, const std::vector<int>& vars);

/// gcd of the univariate-in-var coefficient list over the remaining variables.
inline Poly content_in(const Poly& p, int var, const std::vector<int>& rest_vars) {
  Poly c;
  for (const Poly& coeff : coeffs_in(p, var)) {
    if (coeff.is_zero()) continue;
    c = c.is_zero() ? coeff : gcd_poly(c, coeff, rest_vars);
    if (c.is_constant()) break;
  }
  return c;
}

/// Primitive pseudo-remainder sequence gcd in Q[vars...]; `vars` lists the
/// variables p may depend on, outermost first. Result is primitive with
/// positive leading rational coefficient (and 1 when the gcd is a unit).
inline Poly gcd_poly(const Poly& a, const Poly& b, const std::vector<int>& vars) {
  if (a.is_zero()) return b.is_zero() ? Poly() : b * (Rational(1) / rational_content(b));
  if (b.is_zero()) return a * (Rational(1) / rational_content(a));
  if (vars.empty()) return Poly(1);

  int var = vars.front();
  std::vector<int> rest(vars.begin() + 1, vars.end());
  if (!a.depends_on(var) && !b.depends_on(var)) return gcd_poly(a, b, rest);

  Poly ca = content_in(a, var, rest), cb = content_in(b, var, rest);
  Poly cont = gcd_poly(ca, cb, rest);
  Poly u = *divide_exact(a, ca), v = *divide_exact(b, cb);
  if (u.degree_in(var) < v.degree_in(var)) std::swap(u, v);

  // Euclid with pseudo-division; primitive part taken each round to keep
  // coefficient growth down.
  while (!v.is_zero()) {
    auto uc = coeffs_in(u, var), vc = coeffs_in(v, var);
    int du = int(uc.size()) - 1, dv = int(vc.size()) - 1;
    if (dv == 0) {
      // v is a unit in the fraction field of the remaining variables.
      u = Poly(1);
      break;
    }
    // Pseudo-remainder of u by v in (rest)[var].
    Poly lead_v = vc[size_t(dv)];
    Poly r = u;
    for (int k = du; k >= dv; --k) {
      auto rc = coeffs_in(r, var);
      if (int(rc.size()) - 1 < k) continue;
      Poly rk = rc[size_t(k)];
      if (rk.is_zero()) continue;
      // r <- lead_v * r - rk * x^(k-dv) * v
      Poly shift = Poly::variable(var).pow(unsigned(k - dv));
      r = lead_v * r - rk * shift * v;
    }
    u = v;
    Poly rcont = content_in(r, var, rest);
    v = rcont.is_zero() ? Poly() : *divide_exact(r, rcont);
  }
  Poly g = cont * u;
  return g * (Rational(1) / rational_content(g));
}

}  // namespace detail

/// gcd over Q[x2,x3] (primitive, positive leading coefficient).
inline Poly gcd_x23(const Poly& a, const Poly& b) { return detail::gcd_poly(a, b, {2, 3}); }

struct all_zero_error : std::domain_error {
  all_zero_error() : std::domain_error("gcd_in_x1: every entry is zero") {}
};

/// gcd of the entries viewed in Q(x2,x3)[x1], returned primitive (content in
/// x2,x3 removed) and normalized to integer coefficients with positive lex
/// leading term. Degree-zero gcds collapse to 1, the unit of the fraction
/// field.
inline Poly gcd_in_x1(const std::vector<Poly>& entries) {
  Poly g;
  bool any = false;
  for (const Poly& e : entries) {
    if (e.is_zero()) continue;
    any = true;
    g = g.is_zero() ? e : detail::gcd_poly(g, e, {1, 2, 3});
    if (!g.depends_on(1)) break;
  }
  if (!any) throw all_zero_error();
  if (!g.depends_on(1)) return Poly(1);
  Poly cont = detail::content_in(g, 1, {2, 3});
  g = *divide_exact(g, cont);
  return g * (Rational(1) / detail::rational_content(g));
}

inline std::string to_string(const Poly& p) {
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  // Highest monomial first reads more naturally.
  for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
    const auto& [m, c] = *it;
    Rational a = c;
    if (first) {
      if (a < 0) {
        out += "-";
        a = -a;
      }
    } else {
      out += a < 0 ? " - " : " + ";
      if (a < 0) a = -a;
    }
    first = false;
    std::string vars;
    for (int v = 0; v < 3; ++v) {
      if (m[v] == 0) continue;
      if (!vars.empty()) vars += "*";
      vars += "x" + std::to_string(v + 1);
      if (m[v] > 1) vars += "^" + std::to_string(m[v]);
    }
    if (vars.empty()) {
      out += to_string(a);
    } else {
      if (a != 1) out += to_string(a) + "*";
      out += vars;
    }
  }
  return out;
}

}  // namespace sostrat
