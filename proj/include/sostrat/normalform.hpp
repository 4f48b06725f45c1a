#pragma once

// Reduction of an operator triple to the standard forms of the
// classification theorem: locate the characteristic graph x1 = g(x'),
// straighten it, extract the degeneracy order p, split into Case I / IIa /
// IIb, recover q, verify the side conditions, and compute the type index r
// together with the Gevrey threshold q/p for type I_0.

#include <array>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sostrat/errors.hpp"
#include "sostrat/field.hpp"
#include "sostrat/poly.hpp"
#include "sostrat/series.hpp"

namespace sostrat {

using Mat2 = std::array<std::array<Poly, 2>, 2>;

inline Poly det(const Mat2& m) { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }

/// xi'-block of (X2, X3): rows are the (xi2, xi3) coefficients.
inline Mat2 xi_block(const OperatorSpec& spec) {
  return {{{spec.X2.c2, spec.X2.c3}, {spec.X3.c2, spec.X3.c3}}};
}

// ---------------------------------------------------------------------------
// Characteristic manifold
// ---------------------------------------------------------------------------

/// Sigma_1 = { xi1 = 0, x1 - g(x') = 0 } together with the cofactor matrix:
/// every entry of the original block equals (x1 - g) * cofactor entry.
struct CharManifold {
  Poly g;              // graph function, depends on x2, x3 only
  Mat2 cofactor;       // block / (x1 - g), one factor removed
  int multiplicity = 1;  // full multiplicity of (x1 - g) in the gcd
};

namespace detail {

/// Writes c * (x1 - g)^k = G when possible. G is primitive with positive
/// leading coefficient, degree k >= 1 in x1.
inline std::optional<Poly> graph_root_of_power(const Poly& G, int k) {
  auto coeffs = coeffs_in(G, 1);
  if (int(coeffs.size()) - 1 != k) return std::nullopt;
  const Poly& lead = coeffs[size_t(k)];
  if (!lead.is_constant()) return std::nullopt;  // leading coefficient must not vanish
  Rational lc = lead.constant_term();
  // Candidate from the subleading coefficient of (x1 - g)^k: -k g * lc.
  Poly sub = k >= 1 && int(coeffs.size()) >= k ? coeffs[size_t(k - 1)] : Poly();
  Poly g = sub * (Rational(-1) / (Rational(k) * lc));
  if (g.depends_on(1)) return std::nullopt;
  Poly rebuilt = (Poly::variable(1) - g).pow(unsigned(k)) * lc;
  if (rebuilt != G) return std::nullopt;
  return g;
}

}  // namespace detail

/// Finds the common graph factor of the xi'-block: block = (x1 - g(x')) *
/// cofactor, with g recovered from the gcd of the four entries in
/// Q(x2,x3)[x1]. A gcd that is a unit means the fields are already
/// independent in xi' (NoCommonFactor); a gcd that is not a power of a
/// monic-linear graph polynomial breaks the symplectic-graph hypothesis
/// (NonGraphFactor).
inline CharManifold detect_sigma1(const OperatorSpec& spec) {
  if (!spec.x1_is_d1())
    throw pipeline_error(FailKind::NotStandardForm, "X1 must be exactly D1");
  Mat2 A = xi_block(spec);
  Poly G;
  try {
    G = gcd_in_x1({A[0][0], A[0][1], A[1][0], A[1][1]});
  } catch (const all_zero_error&) {
    throw pipeline_error(FailKind::InfiniteOrder,
                         "xi'-block vanishes identically; bracket condition fails");
  }
  if (!G.depends_on(1))
    throw pipeline_error(FailKind::NoCommonFactor,
                         "xi'-entries have unit gcd in x1; fields are not jointly degenerate "
                         "along a graph");
  int k = G.degree_in(1);
  auto g = detail::graph_root_of_power(G, k);
  if (!g)
    throw pipeline_error(FailKind::NonGraphFactor,
                         "common factor " + to_string(G) + " is not a power of x1 - g(x2,x3)");
  CharManifold cm;
  cm.g = *g;
  cm.multiplicity = k;
  Poly lin = Poly::variable(1) - cm.g;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      auto q = divide_exact(A[size_t(i)][size_t(j)], lin);
      if (!q)
        throw pipeline_error(FailKind::NonGraphFactor,
                             "entry not divisible by the detected graph factor");
      cm.cofactor[size_t(i)][size_t(j)] = *q;
    }
  return cm;
}

// ---------------------------------------------------------------------------
// Standard form extraction
// ---------------------------------------------------------------------------

enum class CaseTag { I, IIa, IIb };

inline const char* case_name(CaseTag t) {
  switch (t) {
    case CaseTag::I: return "I";
    case CaseTag::IIa: return "IIa";
    default: return "IIb";
  }
}

/// Case I refinement: relative equation of Sigma_p is alpha(x') xi2 +
/// beta(x') xi3 = 0 with alpha(0) != 0 (beta = 0 in straightened
/// coordinates); lambda is the quotient f3(0,x')/f2(0,x').
struct CaseIData {
  Poly alpha;          // f2 restricted to x1 = 0
  Poly beta;           // nonzero means the relative equation still needs straightening
  Rational lambda0;    // lambda(0) = f3(0)/f2(0)
  Poly lambda_num;     // f3(0,x')
  Poly lambda_den;     // f2(0,x') (unit near 0)
  bool sigma_p_empty = false;  // det of the block at x1=0 is elliptic: chain ends at p
  // Filled by compute_q: xi3-cofactors with x1^{q-p} divided out.
  Poly g2, g3;
};

struct CaseIIaData {
  int j = 2;       // Sigma_p is x_j = 0 inside Sigma_1
  int content_pow = 1;
  Mat2 tilde0;     // block(0,x') / x_j^m
  Mat2 hat;        // x1^{q-p} coefficient matrix (set by compute_q)
};

struct CaseIIbData {
  int subcase = 1;  // b1: d_{x2} beta (0) != 0; b2: only d_{x3} beta (0) != 0
  Poly alpha, beta;  // primitive covector of the relative equation
  Poly h2, h3;       // row multipliers at x1 = 0, h2(0) != 0 after swap
  Mat2 hat;          // x1^{q-p} coefficient matrix (set by compute_q)
};

/// Output of factor_p: the triple with x1^{p-1} extracted from the
/// xi'-block. `block` keeps the original row order (X2 row first).
struct FactoredForm {
  int p = 1;
  Poly a21, a31;  // xi1 coefficients of X2, X3
  Mat2 block;     // xi'-block divided by x1^{p-1}
};

struct StandardForm {
  int p = 1;
  std::optional<int> q;
  Poly a21, a31;
  Mat2 block;          // original row order; reassembly uses this
  bool swapped = false;  // analysis uses rows in swapped order (X2 <-> X3)
  CaseTag tag = CaseTag::I;
  std::variant<CaseIData, CaseIIaData, CaseIIbData> data;

  CaseIData& case1() { return std::get<CaseIData>(data); }
  const CaseIData& case1() const { return std::get<CaseIData>(data); }
  CaseIIaData& case2a() { return std::get<CaseIIaData>(data); }
  const CaseIIaData& case2a() const { return std::get<CaseIIaData>(data); }
  CaseIIbData& case2b() { return std::get<CaseIIbData>(data); }
  const CaseIIbData& case2b() const { return std::get<CaseIIbData>(data); }

  /// Analysis-order rows (after the X2/X3 tie-break swap).
  const Poly& row_f(int i) const {  // xi2 coefficient of analysis row i in {0,1}
    return block[size_t(swapped ? 1 - i : i)][0];
  }
  const Poly& row_g(int i) const {  // xi3 coefficient
    return block[size_t(swapped ? 1 - i : i)][1];
  }
};

/// x1^{p-1} extraction. Requires Sigma_1 = { x1 = 0, xi1 = 0 }, i.e. run
/// after the change of variables.
inline FactoredForm factor_p(const OperatorSpec& spec) {
  if (!spec.x1_is_d1())
    throw pipeline_error(FailKind::NotStandardForm, "X1 must be exactly D1");
  Mat2 A = xi_block(spec);
  int min_ord = INT32_MAX;
  for (auto& row : A)
    for (auto& e : row)
      if (auto o = ord_var(e, 1)) min_ord = std::min(min_ord, *o);
  if (min_ord == INT32_MAX)
    throw pipeline_error(FailKind::InfiniteOrder,
                         "xi'-block vanishes identically; bracket condition fails");
  FactoredForm f;
  f.p = min_ord + 1;
  f.a21 = spec.X2.c1;
  f.a31 = spec.X3.c1;
  Poly x1p = Poly::variable(1).pow(unsigned(min_ord));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      f.block[size_t(i)][size_t(j)] = *divide_exact(A[size_t(i)][size_t(j)], x1p);
  return f;
}

namespace detail {

inline Poly at_x1_zero(const Poly& p) { return subst(p, 1, Poly()); }

inline Rational at_origin(const Poly& p) { return p.constant_term(); }

/// Content of the four entries of M over Q[x2,x3].
inline Poly content_of(const Mat2& m) {
  Poly c;
  for (auto& row : m)
    for (auto& e : row) {
      if (e.is_zero()) continue;
      c = c.is_zero() ? e : gcd_x23(c, e);
      if (c.is_constant()) return c;
    }
  return c;
}

/// Primitive direction (alpha, beta) and row multipliers h of a rank-one
/// 2x2 matrix over Q[x2,x3]; rows satisfy row_i = h_i * (alpha, beta).
struct RankOne {
  Poly alpha, beta, h2, h3;
};

inline std::optional<RankOne> rank_one_split(const Mat2& m) {
  if (!det(m).is_zero()) return std::nullopt;
  const auto& r0 = m[0];
  const auto& r1 = m[1];
  bool r0z = r0[0].is_zero() && r0[1].is_zero();
  bool r1z = r1[0].is_zero() && r1[1].is_zero();
  if (r0z && r1z) return std::nullopt;
  const auto& base = r0z ? r1 : r0;
  Poly cont = base[0].is_zero() ? base[1] : (base[1].is_zero() ? base[0] : gcd_x23(base[0], base[1]));
  RankOne out;
  out.alpha = base[0].is_zero() ? Poly() : *divide_exact(base[0], cont);
  out.beta = base[1].is_zero() ? Poly() : *divide_exact(base[1], cont);
  auto multiplier = [&](const std::array<Poly, 2>& row) -> std::optional<Poly> {
    if (row[0].is_zero() && row[1].is_zero()) return Poly();
    const Poly& ref = out.alpha.is_zero() ? out.beta : out.alpha;
    const Poly& comp = out.alpha.is_zero() ? row[1] : row[0];
    auto h = divide_exact(comp, ref);
    if (!h) return std::nullopt;
    if (*h * out.alpha != row[0] || *h * out.beta != row[1]) return std::nullopt;
    return h;
  };
  auto h2 = multiplier(r0);
  auto h3 = multiplier(r1);
  if (!h2 || !h3) return std::nullopt;
  out.h2 = *h2;
  out.h3 = *h3;
  return out;
}

}  // namespace detail

/// Case analysis of M(x') = block(0,x'), following the zero-set shape of
/// the relative equation of Sigma_p inside Sigma_1:
///   det M(0) != 0        -> Sigma_p empty at the base point (strict mode
///                           raises A4Violated; relaxed mode classifies the
///                           exactly-degenerate triple as Case I with q = p),
///   content = unit x_j^m -> Case IIa,
///   rank M <= 1          -> covector h (x') tensor (alpha, beta):
///                           alpha(0) != 0 Case I; otherwise Case IIb via the
///                           first nonzero x'-derivative of beta,
///   anything else        -> NeedsCoordinateChange.
inline StandardForm classify_case(const FactoredForm& f, bool relaxed = false) {
  StandardForm sf;
  sf.p = f.p;
  sf.a21 = f.a21;
  sf.a31 = f.a31;
  sf.block = f.block;

  Mat2 M;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) M[size_t(i)][size_t(j)] = detail::at_x1_zero(f.block[size_t(i)][size_t(j)]);

  Poly detM = det(M);
  Rational detM0 = detail::at_origin(detM);

  if (detM0 != 0) {
    if (!relaxed)
      throw pipeline_error(FailKind::A4Violated,
                           "det of the reduced block at x1=0 equals " + to_string(detM0) +
                               " at the base point: Sigma_p is empty near (0,e3)");
    // Exactly degenerate triple: the bracket chain terminates at level p.
    // Read the Case I data off directly; some row has a nonzero xi2
    // coefficient at the origin since det M(0) != 0.
    sf.tag = CaseTag::I;
    CaseIData d;
    sf.swapped = detail::at_origin(M[0][0]) == 0;
    d.alpha = detail::at_x1_zero(sf.row_f(0));
    d.beta = Poly();
    d.lambda_num = detail::at_x1_zero(sf.row_f(1));
    d.lambda_den = d.alpha;
    d.lambda0 = detail::at_origin(d.lambda_num) / detail::at_origin(d.lambda_den);
    d.sigma_p_empty = true;
    sf.data = d;
    return sf;
  }

  // Cylindrical relative equation x_j = 0 detected through the scalar
  // content of M.
  Poly content = detail::content_of(M);
  if (detail::at_origin(content) == 0) {
    for (int j = 2; j <= 3; ++j) {
      auto m = ord_var(content, j);
      if (!m || *m == 0) continue;
      Poly unit = *divide_exact(content, Poly::variable(j).pow(unsigned(*m)));
      if (detail::at_origin(unit) == 0) continue;
      CaseIIaData d;
      d.j = j;
      d.content_pow = *m;
      Poly xjm = Poly::variable(j).pow(unsigned(*m));
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          d.tilde0[size_t(a)][size_t(b)] = *divide_exact(M[size_t(a)][size_t(b)], xjm);
      sf.tag = CaseTag::IIa;
      sf.data = d;
      return sf;
    }
  }

  if (detM.is_zero()) {
    auto split = detail::rank_one_split(M);
    if (split) {
      Rational beta0 = detail::at_origin(split->beta);
      if (beta0 != 0)
        throw pipeline_error(FailKind::A4Violated,
                             "relative equation of Sigma_p does not vanish at the base "
                             "codirection (beta(0) = " + to_string(beta0) + ")");
      // Tie-break: the analysis row X2 is the one whose xi2-coefficient is
      // nonzero at the origin, preferring the given X2.
      Rational h20 = detail::at_origin(split->h2), h30 = detail::at_origin(split->h3);
      Rational alpha0 = detail::at_origin(split->alpha);
      if (alpha0 != 0) {
        sf.tag = CaseTag::I;
        sf.swapped = detail::at_origin(M[0][0]) == 0 && detail::at_origin(M[1][0]) != 0;
        CaseIData d;
        d.alpha = detail::at_x1_zero(sf.row_f(0));
        // Relative equation alpha xi2 + beta xi3 after normalization; in the
        // straightened situation beta = 0.
        d.beta = split->beta;
        d.lambda_num = detail::at_x1_zero(sf.row_f(1));
        d.lambda_den = d.alpha;
        Rational den0 = detail::at_origin(d.lambda_den);
        if (den0 == 0)
          throw pipeline_error(FailKind::NeedsCoordinateChange,
                               "neither row has a nonzero xi2-coefficient at the origin");
        d.lambda0 = detail::at_origin(d.lambda_num) / den0;
        sf.data = d;
        return sf;
      }
      // alpha(0) = 0: Case IIb when beta has a nonzero first derivative.
      Rational b2 = detail::at_origin(diff(split->beta, 2));
      Rational b3 = detail::at_origin(diff(split->beta, 3));
      if (b2 != 0 || b3 != 0) {
        CaseIIbData d;
        d.subcase = b2 != 0 ? 1 : 2;
        d.alpha = split->alpha;
        d.beta = split->beta;
        if (h20 == 0 && h30 == 0)
          throw pipeline_error(FailKind::NeedsCoordinateChange,
                               "both row multipliers vanish at the origin");
        sf.swapped = h20 == 0;
        d.h2 = sf.swapped ? split->h3 : split->h2;
        d.h3 = sf.swapped ? split->h2 : split->h3;
        sf.tag = CaseTag::IIb;
        sf.data = d;
        return sf;
      }
      throw pipeline_error(FailKind::NeedsCoordinateChange,
                           "relative equation " + to_string(split->alpha) + "*xi2 + " +
                               to_string(split->beta) +
                               "*xi3 has vanishing gradient at the origin");
    }
  }
  throw pipeline_error(FailKind::NeedsCoordinateChange,
                       "zero set of the reduced block is not recognizable in the given "
                       "coordinates (det = " + to_string(detM) + ")");
}

// ---------------------------------------------------------------------------
// q recovery
// ---------------------------------------------------------------------------

namespace detail {

/// Coefficient matrices B_k(x') of the block written as sum_k x1^k B_k.
inline std::vector<Mat2> x1_layers(const Mat2& block) {
  size_t n = 1;
  for (auto& row : block)
    for (auto& e : row) n = std::max(n, size_t(e.degree_in(1) + 1));
  std::vector<Mat2> out(n);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      auto cs = coeffs_in(block[size_t(i)][size_t(j)], 1);
      for (size_t k = 0; k < cs.size(); ++k) out[k][size_t(i)][size_t(j)] = cs[k];
    }
  return out;
}

inline bool divisible_by(const Poly& p, const Poly& d) {
  return p.is_zero() || divide_exact(p, d).has_value();
}

}  // namespace detail

/// Recovers q from the x1-order at which the block escapes the relative
/// equation of Sigma_p, and checks the ellipticity of the length-q layer at
/// the base point. Mutates nothing; returns the completed form.
inline StandardForm compute_q(StandardForm sf) {
  Poly x1 = Poly::variable(1);
  switch (sf.tag) {
    case CaseTag::I: {
      CaseIData d = sf.case1();
      if (!d.beta.is_zero())
        throw pipeline_error(FailKind::NeedsCoordinateChange,
                             "Case I relative equation has chi != 0; straightening to xi2 = 0 "
                             "is not searched for");
      const Poly& b2 = sf.row_g(0);
      const Poly& b3 = sf.row_g(1);
      auto o2 = ord_var(b2, 1), o3 = ord_var(b3, 1);
      if (!o2 && !o3)
        throw pipeline_error(FailKind::LastLayerNotElliptic,
                             "xi3-column vanishes identically: q = infinity");
      int qp = std::min(o2.value_or(INT32_MAX), o3.value_or(INT32_MAX));
      Poly x1qp = x1.pow(unsigned(qp));
      d.g2 = b2.is_zero() ? Poly() : *divide_exact(b2, x1qp);
      d.g3 = b3.is_zero() ? Poly() : *divide_exact(b3, x1qp);
      if (detail::at_origin(d.g2) == 0 && detail::at_origin(d.g3) == 0)
        throw pipeline_error(FailKind::LastLayerNotElliptic,
                             "xi3-cofactor vector vanishes at the base point");
      sf.q = sf.p + qp;
      sf.data = d;
      return sf;
    }
    case CaseTag::IIa: {
      CaseIIaData d = sf.case2a();
      Mat2 analysis = sf.block;
      auto layers = detail::x1_layers(analysis);
      Poly xj = Poly::variable(d.j);
      int qp = -1;
      for (size_t k = 1; k < layers.size(); ++k) {
        bool all_div = true;
        for (auto& row : layers[k])
          for (auto& e : row) all_div &= detail::divisible_by(e, xj);
        if (!all_div) {
          qp = int(k);
          break;
        }
      }
      if (qp < 0)
        throw pipeline_error(FailKind::LastLayerNotElliptic,
                             "no x1-layer escapes x_j = 0: q = infinity");
      d.hat = layers[size_t(qp)];
      Rational det_tilde0 = detail::at_origin(det(d.tilde0));
      Rational det_hat0 = detail::at_origin(det(d.hat));
      if (det_tilde0 == 0)
        throw pipeline_error(FailKind::LastLayerNotElliptic,
                             "det of the x_j-cofactor block vanishes at the base point");
      if (det_hat0 == 0)
        throw pipeline_error(FailKind::LastLayerNotElliptic,
                             "det of the x1^{q-p}-block vanishes at the base point");
      sf.q = sf.p + qp;
      sf.data = d;
      return sf;
    }
    case CaseTag::IIb: {
      CaseIIbData d = sf.case2b();
      auto layers = detail::x1_layers(sf.block);
      int qp = -1;
      for (size_t k = 1; k < layers.size(); ++k) {
        bool all_prop = true;
        for (auto& row : layers[k]) {
          Poly cross = row[0] * d.beta - row[1] * d.alpha;
          all_prop &= cross.is_zero();
        }
        if (!all_prop) {
          qp = int(k);
          break;
        }
      }
      if (qp < 0)
        throw pipeline_error(FailKind::LastLayerNotElliptic,
                             "every x1-layer stays proportional to the relative covector: "
                             "q = infinity");
      d.hat = layers[size_t(qp)];
      if (detail::at_origin(det(d.hat)) == 0)
        throw pipeline_error(FailKind::LastLayerNotElliptic,
                             "det of the x1^{q-p}-block vanishes at the origin");
      sf.q = sf.p + qp;
      sf.data = d;
      return sf;
    }
  }
  throw std::logic_error("unreachable");
}

// ---------------------------------------------------------------------------
// Side conditions
// ---------------------------------------------------------------------------

enum class Verdict { proven, verified_on_samples, violated };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::proven: return "proven";
    case Verdict::verified_on_samples: return "verified_on_samples";
    default: return "violated";
  }
}

struct ConditionVerdict {
  std::string id;
  Verdict verdict = Verdict::proven;
  std::optional<std::array<Rational, 3>> witness;  // zero off x1 = 0, when violated
  std::string detail;
};

namespace detail {

/// Two-tier nonvanishing check for "expr != 0 whenever x1 != 0" claims.
/// Strong certificate: expr = x1^m u with u(0) != 0. Fallback: a rational
/// grid on [-1/4,1/4]^3 minus the plane x1 = 0.
inline ConditionVerdict nonvanishing_off_x1(std::string id, const Poly& expr, int grid_n) {
  ConditionVerdict out;
  out.id = std::move(id);
  if (expr.is_zero()) {
    out.verdict = Verdict::violated;
    out.witness = {{Rational(1, 20), Rational(0), Rational(0)}};
    out.detail = "expression vanishes identically";
    return out;
  }
  int m = *ord_var(expr, 1);
  Poly u = *divide_exact(expr, Poly::variable(1).pow(unsigned(m)));
  if (at_origin(u) != 0) {
    out.verdict = Verdict::proven;
    out.detail = "equals x1^" + std::to_string(m) + " * u with u(0) = " + to_string(at_origin(u));
    return out;
  }
  int half = std::max(1, grid_n / 2);
  for (int i = -half; i <= half; ++i) {
    if (i == 0) continue;  // stay off x1 = 0
    for (int j = -half; j <= half; ++j)
      for (int k = -half; k <= half; ++k) {
        std::array<Rational, 3> x{Rational(i, 4 * half), Rational(j, 4 * half),
                                  Rational(k, 4 * half)};
        if (eval(expr, x) == 0) {
          out.verdict = Verdict::violated;
          out.witness = x;
          out.detail = "zero at a sample point with x1 != 0";
          return out;
        }
      }
  }
  out.verdict = Verdict::verified_on_samples;
  out.detail = "nonzero on the " + std::to_string(grid_n) + "^3 sample grid off x1 = 0";
  return out;
}

inline ConditionVerdict point_condition(std::string id, bool ok, const std::string& detail) {
  ConditionVerdict v;
  v.id = std::move(id);
  v.verdict = ok ? Verdict::proven : Verdict::violated;
  v.detail = detail;
  if (!ok) v.witness = {{Rational(0), Rational(0), Rational(0)}};
  return v;
}

/// Lower 2x2 factor matrices of the Case I form: entries (f - f(0,x'))/x1
/// in the first column and the extracted g's in the second.
inline Mat2 case1_tilde(const StandardForm& sf) {
  const CaseIData& d = sf.case1();
  Poly f2 = sf.row_f(0), f3 = sf.row_f(1);
  Poly a22 = *divide_exact(f2 - at_x1_zero(f2), Poly::variable(1));
  Poly a32 = *divide_exact(f3 - at_x1_zero(f3), Poly::variable(1));
  return {{{a22, d.g2}, {a32, d.g3}}};
}

}  // namespace detail

/// Linear-independence certificate polynomial for Case I: alpha(x') times
/// the bracketed quantity of the independence condition,
///   W = -f3(0,x') g2 + f2(0,x') g3 + x1 det(tilde A).
/// Vanishing of W off x1 = 0 is equivalent to the condition near points
/// where alpha != 0.
inline Poly case1_linind_certificate(const StandardForm& sf) {
  const CaseIData& d = sf.case1();
  Mat2 tilde = detail::case1_tilde(sf);
  return -d.lambda_num * d.g2 + d.lambda_den * d.g3 + Poly::variable(1) * det(tilde);
}

inline std::vector<ConditionVerdict> check_th1_conditions(const StandardForm& sf, int grid_n = 11) {
  if (!sf.q) throw std::logic_error("check_th1_conditions: run compute_q first");
  std::vector<ConditionVerdict> out;
  switch (sf.tag) {
    case CaseTag::I: {
      const CaseIData& d = sf.case1();
      out.push_back(detail::point_condition(
          "I.alpha_nonzero", detail::at_origin(d.alpha) != 0,
          "alpha(0) = " + to_string(detail::at_origin(d.alpha))));
      bool last = detail::at_origin(d.g2) != 0 || detail::at_origin(d.g3) != 0;
      out.push_back(detail::point_condition(
          "I.last_layer", last,
          "(a23, a33)(0) = (" + to_string(detail::at_origin(d.g2)) + ", " +
              to_string(detail::at_origin(d.g3)) + ")"));
      if (d.sigma_p_empty) {
        ConditionVerdict v;
        v.id = "A4.ii";
        v.verdict = Verdict::violated;
        v.detail =
            "Sigma_p is empty near the base point; triple treated as exactly degenerate "
            "with q = p";
        out.push_back(v);
      }
      out.push_back(detail::nonvanishing_off_x1("I.lin_indep", case1_linind_certificate(sf), grid_n));
      break;
    }
    case CaseTag::IIa: {
      const CaseIIaData& d = sf.case2a();
      out.push_back(detail::point_condition(
          "IIa.tilde_block", detail::at_origin(det(d.tilde0)) != 0,
          "det tilde(0) = " + to_string(detail::at_origin(det(d.tilde0)))));
      out.push_back(detail::point_condition(
          "IIa.hat_block", detail::at_origin(det(d.hat)) != 0,
          "det hat(0) = " + to_string(detail::at_origin(det(d.hat)))));
      out.push_back(detail::nonvanishing_off_x1("IIa.lin_indep", det(sf.block), grid_n));
      break;
    }
    case CaseTag::IIb: {
      const CaseIIbData& d = sf.case2b();
      out.push_back(detail::point_condition(
          "IIb.hat_block", detail::at_origin(det(d.hat)) != 0,
          "det hat(0) = " + to_string(detail::at_origin(det(d.hat)))));
      out.push_back(detail::point_condition(
          "IIb.h2_nonzero", detail::at_origin(d.h2) != 0,
          "h2(0) = " + to_string(detail::at_origin(d.h2))));
      out.push_back(detail::nonvanishing_off_x1("IIb.lin_indep", det(sf.block), grid_n));
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Type index and threshold
// ---------------------------------------------------------------------------

struct TypeR {
  std::optional<int> r;  // nullopt: zero to the stated truncation
  int trunc = 0;
  std::string note;
};

/// Degeneracy order of X3 restricted to the characteristic set of X2 along
/// the x1-bicharacteristic through the base point: r = ord_t E(t) with
///   E(t) = -lambda(0) a23(t,0) + a33(t,0) + (t/alpha(0)) det tildeA(t,0).
/// The unit prefactor alpha/(alpha + t a22) of the restriction cannot change
/// the vanishing order and is omitted (recorded in the note).
inline TypeR compute_type_r(const StandardForm& sf, int trunc) {
  if (sf.tag != CaseTag::I) throw std::logic_error("compute_type_r: Case I only");
  if (!sf.q) throw std::logic_error("compute_type_r: run compute_q first");
  const CaseIData& d = sf.case1();
  Rational alpha0 = detail::at_origin(d.alpha);
  Mat2 tilde = detail::case1_tilde(sf);

  auto at_t = [](const Poly& p) { return subst(subst(p, 2, Poly()), 3, Poly()); };
  Poly E = at_t(-Poly(d.lambda0) * d.g2 + d.g3 + Poly::variable(1) * det(tilde) * (Rational(1) / alpha0));

  std::vector<Poly> coeffs;
  for (const Poly& c : detail::coeffs_in(E, 1)) coeffs.push_back(c);
  TypeR out;
  out.trunc = trunc;
  out.note = "unit prefactor alpha/(alpha + t a22) omitted; cannot change the order";
  Series1 series = Series1::from_coeffs("t", coeffs, trunc);
  out.r = series_ord(series);
  return out;
}

/// Exact Gevrey order q/p for type I_0; unknown otherwise (deferred cases).
inline std::optional<Rational> gevrey_threshold(CaseTag tag, int p, std::optional<int> q,
                                                std::optional<int> r) {
  if (tag == CaseTag::I && q && r && *r == 0) return Rational(*q, p);
  return std::nullopt;
}

/// Rebuilds the operator triple from a standard form; exact inverse of
/// factor_p composed with the classification bookkeeping.
inline OperatorSpec reassemble(const StandardForm& sf) {
  Poly x1p = Poly::variable(1).pow(unsigned(sf.p - 1));
  OperatorSpec spec;
  spec.X1 = FieldSymbol::covariable(1);
  spec.X2 = {sf.a21, x1p * sf.block[0][0], x1p * sf.block[0][1]};
  spec.X3 = {sf.a31, x1p * sf.block[1][0], x1p * sf.block[1][1]};
  return spec;
}

}  // namespace sostrat
