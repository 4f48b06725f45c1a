#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sostrat/poly.hpp"

namespace sostrat {

/// First-order symbol c1(x) xi1 + c2(x) xi2 + c3(x) xi3, i.e. a vector field
/// with polynomial coefficients. The class is closed under the Poisson
/// bracket: the bracket of two symbols linear in xi is again linear in xi and
/// coincides with the commutator of the underlying fields.
struct FieldSymbol {
  Poly c1, c2, c3;

  FieldSymbol() = default;
  FieldSymbol(Poly a, Poly b, Poly c) : c1(std::move(a)), c2(std::move(b)), c3(std::move(c)) {}

  /// xi_var as a constant-coefficient symbol.
  static FieldSymbol covariable(int var) {
    FieldSymbol f;
    f.coeff(var) = Poly(1);
    return f;
  }

  Poly& coeff(int var) {
    switch (Poly::check_var(var)) {
      case 0: return c1;
      case 1: return c2;
      default: return c3;
    }
  }
  const Poly& coeff(int var) const { return const_cast<FieldSymbol*>(this)->coeff(var); }

  bool is_zero() const { return c1.is_zero() && c2.is_zero() && c3.is_zero(); }

  /// The field applied to a scalar as a derivation: sum_j c_j d_j(p).
  Poly apply(const Poly& p) const { return c1 * diff(p, 1) + c2 * diff(p, 2) + c3 * diff(p, 3); }

  friend FieldSymbol operator+(const FieldSymbol& a, const FieldSymbol& b) {
    return {a.c1 + b.c1, a.c2 + b.c2, a.c3 + b.c3};
  }
  friend FieldSymbol operator-(const FieldSymbol& a, const FieldSymbol& b) {
    return {a.c1 - b.c1, a.c2 - b.c2, a.c3 - b.c3};
  }
  friend FieldSymbol operator*(const Poly& p, const FieldSymbol& f) {
    return {p * f.c1, p * f.c2, p * f.c3};
  }
  FieldSymbol operator-() const { return {-c1, -c2, -c3}; }

  friend bool operator==(const FieldSymbol& a, const FieldSymbol& b) {
    return a.c1 == b.c1 && a.c2 == b.c2 && a.c3 == b.c3;
  }
  friend bool operator!=(const FieldSymbol& a, const FieldSymbol& b) { return !(a == b); }
};

/// Poisson bracket of two symbols linear in xi; equals the commutator symbol:
/// coefficient i of the result is sum_j (F.c_j d_j G.c_i - G.c_j d_j F.c_i).
inline FieldSymbol bracket(const FieldSymbol& F, const FieldSymbol& G) {
  FieldSymbol r;
  for (int i = 1; i <= 3; ++i) r.coeff(i) = F.apply(G.coeff(i)) - G.apply(F.coeff(i));
  return r;
}

/// Partial derivative applied to every coefficient (the symbol of [D_var, F]
/// up to the derivative landing rule; used by the commutator expansions).
inline FieldSymbol diff(const FieldSymbol& f, int var) {
  return {diff(f.c1, var), diff(f.c2, var), diff(f.c3, var)};
}

/// Bracket word: the multi-index I of an iterated bracket X_I.
struct BracketWord {
  std::vector<int> indices;

  BracketWord() = default;
  BracketWord(std::initializer_list<int> idx) : indices(idx) { validate(); }
  explicit BracketWord(std::vector<int> idx) : indices(std::move(idx)) { validate(); }

  size_t length() const { return indices.size(); }

  void validate() const {
    if (indices.empty()) throw std::invalid_argument("bracket word must be nonempty");
    for (int i : indices)
      if (i < 1 || i > 3) throw std::invalid_argument("bracket word entries must be 1, 2 or 3");
  }
};

/// Unit codirections +-e1, +-e2, +-e3.
struct Codirection {
  int axis = 3;   // 1..3
  int sign = +1;  // +-1

  static std::optional<Codirection> parse(const std::string& s) {
    std::string t = s;
    Codirection c;
    if (!t.empty() && (t[0] == '+' || t[0] == '-')) {
      c.sign = t[0] == '-' ? -1 : +1;
      t = t.substr(1);
    }
    if (t.size() == 2 && t[0] == 'e' && t[1] >= '1' && t[1] <= '3') {
      c.axis = t[1] - '0';
      return c;
    }
    return std::nullopt;
  }

  std::string str() const { return (sign < 0 ? "-e" : "e") + std::to_string(axis); }
};

/// Ordered field triple (X1, X2, X3) defining P = X1^2 + X2^2 + X3^2, with
/// the characteristic base point and codirection the analysis is anchored at.
struct OperatorSpec {
  FieldSymbol X1, X2, X3;
  std::array<Rational, 3> base_point{Rational(0), Rational(0), Rational(0)};
  Codirection codirection{};

  const FieldSymbol& field(int j) const {
    switch (Poly::check_var(j)) {
      case 0: return X1;
      case 1: return X2;
      default: return X3;
    }
  }

  bool x1_is_d1() const {
    return X1.c1 == Poly(1) && X1.c2.is_zero() && X1.c3.is_zero();
  }

  friend bool operator==(const OperatorSpec& a, const OperatorSpec& b) {
    return a.X1 == b.X1 && a.X2 == b.X2 && a.X3 == b.X3 && a.base_point == b.base_point &&
           a.codirection.axis == b.codirection.axis && a.codirection.sign == b.codirection.sign;
  }
};

/// Right-nested iterated bracket X_I = {X_{i1}, {X_{i2}, ... X_{ik}}...};
/// a length-one word returns the field itself.
inline FieldSymbol iterated_bracket(const OperatorSpec& spec, const BracketWord& word) {
  word.validate();
  FieldSymbol acc = spec.field(word.indices.back());
  for (auto it = word.indices.rbegin() + 1; it != word.indices.rend(); ++it)
    acc = bracket(spec.field(*it), acc);
  return acc;
}

/// Pushforward of a field under the coordinate change y1 = x1 - g(x2,x3),
/// y2 = x2, y3 = x3 (a canonical transformation linear in xi). Sends the
/// graph x1 = g(x') to y1 = 0 and commutes with the bracket.
inline FieldSymbol cov_field(const FieldSymbol& f, const Poly& g) {
  if (g.depends_on(1)) throw std::invalid_argument("cov_field: g must depend only on x2, x3");
  auto pull = [&](const Poly& p) { return subst(p, 1, Poly::variable(1) + g); };
  FieldSymbol r;
  r.c1 = pull(f.c1 - f.c2 * diff(g, 2) - f.c3 * diff(g, 3));
  r.c2 = pull(f.c2);
  r.c3 = pull(f.c3);
  return r;
}

inline OperatorSpec apply_cov(const OperatorSpec& spec, const Poly& g) {
  OperatorSpec r = spec;
  r.X1 = cov_field(spec.X1, g);
  r.X2 = cov_field(spec.X2, g);
  r.X3 = cov_field(spec.X3, g);
  return r;
}

/// Translates the spec so that `point` becomes the origin.
inline OperatorSpec translate_to_origin(const OperatorSpec& spec) {
  OperatorSpec r = spec;
  auto shift = [&](Poly p) {
    for (int v = 1; v <= 3; ++v)
      if (spec.base_point[size_t(v - 1)] != 0)
        p = subst(p, v, Poly::variable(v) + Poly(spec.base_point[size_t(v - 1)]));
    return p;
  };
  for (FieldSymbol* f : {&r.X1, &r.X2, &r.X3})
    for (int v = 1; v <= 3; ++v) f->coeff(v) = shift(f->coeff(v));
  r.base_point = {Rational(0), Rational(0), Rational(0)};
  return r;
}

/// Result of the bracket-generating test: minimal length m at which the
/// values of all X_I, |I| <= m, span R^3 at the point, or the achieved span
/// dimension on failure.
struct HormanderResult {
  std::optional<int> length;
  int achieved_dim = 0;
  bool ok() const { return length.has_value(); }
};

namespace detail {

/// Rank bookkeeping over Q via row-reduced basis insertion.
class SpanQ3 {
 public:
  bool insert(std::array<Rational, 3> v) {
    for (auto& b : basis_) {
      int p = pivot(b);
      if (v[size_t(p)] != 0) {
        Rational f = v[size_t(p)] / b[size_t(p)];
        for (int i = 0; i < 3; ++i) v[size_t(i)] -= f * b[size_t(i)];
      }
    }
    for (int i = 0; i < 3; ++i)
      if (v[size_t(i)] != 0) {
        basis_.push_back(v);
        return true;
      }
    return false;
  }
  int dim() const { return int(basis_.size()); }

 private:
  static int pivot(const std::array<Rational, 3>& b) {
    for (int i = 0; i < 3; ++i)
      if (b[size_t(i)] != 0) return i;
    return 2;
  }
  std::vector<std::array<Rational, 3>> basis_;
};

}  // namespace detail

/// Bracket-generating check at a point: brute force over all words up to
/// max_len, shortest first.
inline HormanderResult hormander_check(const OperatorSpec& spec, const std::array<Rational, 3>& point,
                                       int max_len) {
  if (max_len < 1) throw std::invalid_argument("hormander_check: max_len must be >= 1");
  HormanderResult res;
  detail::SpanQ3 span;
  std::vector<FieldSymbol> level{spec.X1, spec.X2, spec.X3};
  for (int len = 1; len <= max_len; ++len) {
    if (len > 1) {
      std::vector<FieldSymbol> next;
      next.reserve(level.size() * 3);
      for (int j = 1; j <= 3; ++j)
        for (const auto& s : level) next.push_back(bracket(spec.field(j), s));
      level = std::move(next);
    }
    for (const auto& s : level)
      span.insert({eval(s.c1, point), eval(s.c2, point), eval(s.c3, point)});
    if (span.dim() == 3) {
      res.length = len;
      res.achieved_dim = 3;
      return res;
    }
  }
  res.achieved_dim = span.dim();
  return res;
}

}  // namespace sostrat
