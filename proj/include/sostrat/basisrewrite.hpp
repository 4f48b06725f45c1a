#pragma once

// Basis rewriting for type I_0 triples: express alpha D1 + beta x1^{p-1} D2
// + gamma x1^{q-1} D3 in the X-basis by inverting the 2x2 coefficient matrix
// as a truncated series (its determinant is a unit at the origin exactly for
// type I_0), and the induced low-order expansions of [X_j, D3^m].

#include <array>
#include <stdexcept>
#include <vector>

#include "sostrat/errors.hpp"
#include "sostrat/field.hpp"
#include "sostrat/normalform.hpp"

namespace sostrat {

/// Multipliers with a X1 + b X2 + c X3 reproducing the target to the stated
/// total-degree truncation.
struct BasisCoeffs {
  Poly a, b, c;
  int trunc = 0;
};

namespace detail {

struct Lemma61System {
  Poly f2, f3, g2, g3;  // original row order: X2 -> (f2, g2), X3 -> (f3, g3)
  int p = 1, q = 1;
};

inline Lemma61System lemma61_system(const StandardForm& sf) {
  if (sf.tag != CaseTag::I)
    throw pipeline_error(FailKind::NotTypeI0, "basis rewriting needs a Case I form");
  if (!sf.q) throw std::logic_error("lemma61_system: run compute_q first");
  Lemma61System s;
  s.p = sf.p;
  s.q = *sf.q;
  Poly x1qp = Poly::variable(1).pow(unsigned(s.q - s.p));
  s.f2 = sf.block[0][0];
  s.f3 = sf.block[1][0];
  auto extract = [&](const Poly& col) {
    return col.is_zero() ? Poly() : *divide_exact(col, x1qp);
  };
  s.g2 = extract(sf.block[0][1]);
  s.g3 = extract(sf.block[1][1]);
  return s;
}

}  // namespace detail

/// Determinant of the basis matrix [[f2, g2], [f3, g3]] at the origin; the
/// triple is of type I_0 exactly when it is nonzero.
inline Rational basis_matrix_det0(const StandardForm& sf) {
  auto s = detail::lemma61_system(sf);
  return detail::at_origin(s.f2) * detail::at_origin(s.g3) -
         detail::at_origin(s.f3) * detail::at_origin(s.g2);
}

/// Solves target = a X1 + b X2 + c X3 to the given truncation. The target's
/// xi2 coefficient must be divisible by x1^{p-1} and its xi3 coefficient by
/// x1^{q-1}; a absorbs the xi1 residue exactly.
inline BasisCoeffs solve_basis(const FieldSymbol& target, const StandardForm& sf, int trunc) {
  auto s = detail::lemma61_system(sf);
  Rational det0 = detail::at_origin(s.f2) * detail::at_origin(s.g3) -
                  detail::at_origin(s.f3) * detail::at_origin(s.g2);
  if (det0 == 0)
    throw pipeline_error(FailKind::NotTypeI0,
                         "basis matrix is singular at the origin (not type I_0)");

  Poly x1 = Poly::variable(1);
  auto divided = [&](const Poly& t, int power, const char* what) {
    if (t.is_zero()) return Poly();
    auto d = divide_exact(t, x1.pow(unsigned(power)));
    if (!d)
      throw std::invalid_argument(std::string("solve_basis: target ") + what +
                                  " coefficient lacks the required x1 power");
    return *d;
  };
  Poly u2 = divided(target.c2, s.p - 1, "xi2");
  Poly u3 = divided(target.c3, s.q - 1, "xi3");

  // (b, c) solve [[f2, f3], [g2, g3]] (b, c)^T = (u2, u3)^T; the matrix is
  // the transpose of the invertible basis matrix, same determinant.
  Poly D = s.f2 * s.g3 - s.f3 * s.g2;
  Poly Dinv = inverse_trunc(D, trunc);
  BasisCoeffs out;
  out.trunc = trunc;
  out.b = trunc_total((s.g3 * u2 - s.f3 * u3) * Dinv, trunc);
  out.c = trunc_total((s.f2 * u3 - s.g2 * u2) * Dinv, trunc);
  out.a = trunc_total(target.c1 - out.b * sf.a21 - out.c * sf.a31, trunc);
  return out;
}

/// Expansion coefficients of [X_j, D3^m] in the X-basis:
///   [X_j, D3^m] = sum_{l=1}^{m} C(m,l) sum_h gamma[l][h] X_h D3^{m-l},
/// with the l = 0 row fixed at -delta_{jh} for the right-multiplied variant.
/// Rows are independent of m; m is capped so every stored level is verified
/// exactly rather than asserted analytically.
struct GammaTable {
  int j = 1;
  int m = 1;
  int trunc = 0;
  std::vector<std::array<Poly, 3>> rows;  // index l in [0, m]

  const std::array<Poly, 3>& level(int l) const { return rows.at(size_t(l)); }
};

inline constexpr int kGammaMaxOrder = 4;

inline GammaTable expand_commutator(const StandardForm& sf, int j, int m, int trunc) {
  if (j < 1 || j > 3) throw std::invalid_argument("expand_commutator: j must be 1, 2 or 3");
  if (m < 1 || m > kGammaMaxOrder)
    throw std::invalid_argument("expand_commutator: m must be between 1 and 4");
  OperatorSpec spec = reassemble(sf);
  GammaTable table;
  table.j = j;
  table.m = m;
  table.trunc = trunc;
  table.rows.resize(size_t(m) + 1);
  for (int h = 0; h < 3; ++h) table.rows[0][size_t(h)] = h + 1 == j ? Poly(-1) : Poly();

  FieldSymbol derivative = spec.field(j);
  for (int l = 1; l <= m; ++l) {
    derivative = diff(derivative, 3);
    BasisCoeffs bc = solve_basis(derivative, sf, trunc);
    table.rows[size_t(l)] = {-bc.a, -bc.b, -bc.c};
  }
  return table;
}

/// Binomial coefficients as exact rationals (small arguments only).
inline Rational binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  Rational r = 1;
  for (int i = 0; i < k; ++i) r = r * Rational(n - i) / Rational(i + 1);
  return r;
}

}  // namespace sostrat
