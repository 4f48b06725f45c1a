#pragma once

// Layer-by-layer walk of the bracket stratification for triples in (or
// reducible to) standard form. Layers are compared through exact
// substitution against the relative equation of the first drop rather than
// general ideal membership; this is exact for the standard forms and is the
// only regime the classification produces.

#include <optional>
#include <string>
#include <vector>

#include "sostrat/field.hpp"
#include "sostrat/normalform.hpp"

namespace sostrat {

enum class LayerStatus { unchanged, drops_codim, empty, unresolved };

inline const char* layer_status_name(LayerStatus s) {
  switch (s) {
    case LayerStatus::unchanged: return "unchanged";
    case LayerStatus::drops_codim: return "drops_codim";
    case LayerStatus::empty: return "empty";
    default: return "unresolved";
  }
}

struct StratumLayer {
  int level = 1;
  LayerStatus status = LayerStatus::unchanged;
  std::string equation;  // printable relative equation, set at the drop
  int new_nonzero = 0;   // reduced symbols of exactly this length that survive
};

namespace detail {

/// Symbol reduced modulo { x1 = 0, xi1 = 0 }: the xi'-covector with
/// coefficients restricted to the leaf.
struct ReducedSymbol {
  Poly u, v;  // coefficients of xi2, xi3
  bool is_zero() const { return u.is_zero() && v.is_zero(); }
};

inline ReducedSymbol reduce_symbol(const FieldSymbol& f) {
  return {at_x1_zero(f.c2), at_x1_zero(f.c3)};
}

/// Relative equation of the first drop, as tested against new symbols.
struct RelativeEquation {
  bool cylindrical = false;  // Sigma_p is { x_j = 0 }
  int j = 2;
  Poly alpha, beta;  // otherwise Sigma_p is { alpha xi2 + beta xi3 = 0 }

  bool contains(const ReducedSymbol& s) const {
    if (cylindrical)
      return divisible_by(s.u, Poly::variable(j)) && divisible_by(s.v, Poly::variable(j));
    return (s.u * beta - s.v * alpha).is_zero();
  }

  std::string str() const {
    if (cylindrical) return "x" + std::to_string(j) + " = 0";
    std::string a = to_string(alpha), b = to_string(beta);
    if (beta.is_zero()) return (alpha == Poly(1) ? "" : "(" + a + ")*") + std::string("xi2 = 0");
    return "(" + a + ")*xi2 + (" + b + ")*xi3 = 0";
  }
};

}  // namespace detail

/// Requires the spec to reduce to a Theorem-form triple (the classification
/// is run first and its relative equation drives the layer comparisons).
inline std::vector<StratumLayer> stratification(const OperatorSpec& spec, int max_level) {
  if (max_level < 1) throw std::invalid_argument("stratification: max_level must be >= 1");

  // Classification pass for the relative-equation data. Failures surface as
  // NotStandardForm with the underlying reason attached.
  OperatorSpec reduced = spec;
  std::optional<StandardForm> sf;
  try {
    try {
      CharManifold cm = detect_sigma1(spec);
      reduced = apply_cov(spec, cm.g);
    } catch (const pipeline_error& e) {
      if (e.kind() != FailKind::NoCommonFactor) throw;
    }
    sf = classify_case(factor_p(reduced), /*relaxed=*/true);
  } catch (const pipeline_error& e) {
    throw pipeline_error(FailKind::NotStandardForm,
                         std::string("stratification needs a classifiable triple: ") + e.what());
  }

  detail::RelativeEquation rel;
  switch (sf->tag) {
    case CaseTag::I:
      rel.alpha = sf->case1().alpha;
      rel.beta = sf->case1().beta;
      break;
    case CaseTag::IIa:
      rel.cylindrical = true;
      rel.j = sf->case2a().j;
      break;
    case CaseTag::IIb:
      rel.alpha = sf->case2b().alpha;
      rel.beta = sf->case2b().beta;
      break;
  }

  std::vector<StratumLayer> out;
  std::vector<FieldSymbol> level{reduced.X1, reduced.X2, reduced.X3};
  enum { base, dropped, dead_empty, dead_unresolved } phase = base;

  for (int h = 1; h <= max_level; ++h) {
    if (h > 1) {
      std::vector<FieldSymbol> next;
      next.reserve(level.size() * 3);
      for (int j = 1; j <= 3; ++j)
        for (const auto& s : level) next.push_back(bracket(reduced.field(j), s));
      level = std::move(next);
    }

    StratumLayer layer;
    layer.level = h;
    if (phase == dead_empty || phase == dead_unresolved) {
      layer.status = phase == dead_empty ? LayerStatus::empty : LayerStatus::unresolved;
      out.push_back(layer);
      continue;
    }

    std::vector<detail::ReducedSymbol> fresh;
    for (const auto& s : level) {
      auto r = detail::reduce_symbol(s);
      if (!r.is_zero()) fresh.push_back(std::move(r));
    }
    layer.new_nonzero = int(fresh.size());

    bool all_contained = true;
    bool elliptic_at_base = false;
    for (const auto& r : fresh) {
      bool inside = phase == base ? r.is_zero() : rel.contains(r);
      if (!inside) {
        all_contained = false;
        // Value at the base codirection e3: the xi3 coefficient at x' = 0.
        if (detail::at_origin(r.v) != 0) elliptic_at_base = true;
      }
    }

    if (all_contained) {
      layer.status = LayerStatus::unchanged;
    } else if (elliptic_at_base) {
      layer.status = LayerStatus::empty;
      phase = dead_empty;
    } else if (phase == base) {
      layer.status = LayerStatus::drops_codim;
      layer.equation = rel.str();
      phase = dropped;
    } else {
      // A second codimension drop leaves the standard-form patterns; the
      // substitution machinery does not resolve deeper chains.
      layer.status = LayerStatus::unresolved;
      phase = dead_unresolved;
    }
    out.push_back(layer);
  }
  return out;
}

}  // namespace sostrat
