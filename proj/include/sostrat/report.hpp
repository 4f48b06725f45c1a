#pragma once

// Pipeline driver and report emitter: runs the reduction stages in order,
// records every stage outcome (including the fallbacks for triples with no
// graph factor or with an empty p-layer), and serializes the result as
// human-readable text and as a stable machine-readable JSON document.

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

#include "sostrat/basisrewrite.hpp"
#include "sostrat/errors.hpp"
#include "sostrat/normalform.hpp"
#include "sostrat/parse.hpp"
#include "sostrat/stratification.hpp"

namespace sostrat {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

struct PipelineOptions {
  int trunc = 0;          // 0: derive 2(q+1) once q is known
  int grid = 11;          // sample points per axis for the fallback tier
  int max_level = 0;      // 0: stratify to level q
  int hormander_len = 0;  // 0: check up to q + 1
};

struct StageOutcome {
  std::string stage;
  std::string status;  // "ok", "fallback", "error", "skipped"
  std::string detail;
};

struct ClassificationReport {
  std::string name;
  std::optional<CaseTag> tag;
  std::string subcase;
  std::optional<int> p, q;
  std::optional<int> r;
  bool r_above_truncation = false;
  std::optional<Rational> threshold;
  std::string threshold_note;
  std::vector<ConditionVerdict> conditions;
  std::vector<StratumLayer> layers;
  std::optional<int> hormander_length;
  int hormander_dim = 0;
  int truncation = 0;
  int grid = 11;
  std::vector<StageOutcome> stages;
  std::optional<FailKind> error;
  std::string error_detail;

  /// 0 classified, 2 assumption violated, 3 coordinate change needed.
  int exit_code() const {
    if (!error) return 0;
    return *error == FailKind::NeedsCoordinateChange ? 3 : 2;
  }
};

namespace detail {

inline void stage_ok(ClassificationReport& rep, const std::string& stage, std::string detail = "") {
  rep.stages.push_back({stage, "ok", std::move(detail)});
}

}  // namespace detail

inline ClassificationReport run_pipeline(const SpecDocument& doc, PipelineOptions opt = {}) {
  ClassificationReport rep;
  rep.name = doc.name;
  rep.grid = opt.grid;

  auto fail = [&](const std::string& stage, const pipeline_error& e) {
    rep.stages.push_back({stage, "error", e.what()});
    rep.error = e.kind();
    rep.error_detail = e.what();
    for (const char* later : {"compute_q", "check_th1_conditions", "compute_type_r",
                              "gevrey_threshold"}) {
      if (later != stage) rep.stages.push_back({later, "skipped", "after " + stage});
    }
    return rep;
  };

  OperatorSpec spec = doc.spec;
  if (spec.codirection.axis != 3) {
    pipeline_error e(FailKind::Unsupported,
                     "analysis is anchored at the codirection +-e3; got " +
                         spec.codirection.str());
    return fail("setup", e);
  }
  bool at_origin = true;
  for (auto& c : spec.base_point) at_origin &= c == 0;
  if (!at_origin) {
    spec = translate_to_origin(spec);
    detail::stage_ok(rep, "translate", "base point moved to the origin");
  }

  // Stage: detect_sigma1 (+ fallback to the p = 1 route).
  OperatorSpec reduced = spec;
  bool have_graph = false;
  Poly g;
  try {
    CharManifold cm = detect_sigma1(spec);
    g = cm.g;
    have_graph = true;
    detail::stage_ok(rep, "detect_sigma1",
                     "Sigma_1 = { xi1 = 0, x1 = " + to_string(cm.g) + " }" +
                         (cm.multiplicity > 1
                              ? ", factor multiplicity " + std::to_string(cm.multiplicity)
                              : ""));
  } catch (const pipeline_error& e) {
    if (e.kind() != FailKind::NoCommonFactor) return fail("detect_sigma1", e);
    rep.stages.push_back({"detect_sigma1", "fallback",
                          "no common graph factor; continuing with the p = 1 reduction"});
  }

  // Stage: apply_cov.
  if (have_graph) {
    reduced = apply_cov(spec, g);
    detail::stage_ok(rep, "apply_cov",
                     g.is_zero() ? "identity (g = 0)" : "straightened x1 = " + to_string(g));
  } else {
    rep.stages.push_back({"apply_cov", "skipped", "no graph factor to straighten"});
  }

  // Stage: factor_p.
  FactoredForm factored;
  try {
    factored = factor_p(reduced);
  } catch (const pipeline_error& e) {
    return fail("factor_p", e);
  }
  rep.p = factored.p;
  detail::stage_ok(rep, "factor_p", "p = " + std::to_string(factored.p));

  // Stage: classify_case (+ exact-degeneracy fallback).
  StandardForm sf;
  try {
    sf = classify_case(factored);
    detail::stage_ok(rep, "classify_case", std::string("case ") + case_name(sf.tag));
  } catch (const pipeline_error& e) {
    if (e.kind() != FailKind::A4Violated) return fail("classify_case", e);
    try {
      sf = classify_case(factored, /*relaxed=*/true);
    } catch (const pipeline_error& e2) {
      return fail("classify_case", e2);
    }
    rep.stages.push_back({"classify_case", "fallback",
                          std::string(e.what()) +
                              "; exactly degenerate triple treated as Case I with q = p"});
  }
  rep.tag = sf.tag;
  if (sf.tag == CaseTag::IIb) rep.subcase = sf.case2b().subcase == 1 ? "b1" : "b2";

  // Stage: compute_q.
  try {
    sf = compute_q(sf);
  } catch (const pipeline_error& e) {
    return fail("compute_q", e);
  }
  rep.q = *sf.q;
  detail::stage_ok(rep, "compute_q", "q = " + std::to_string(*sf.q));

  rep.truncation = opt.trunc > 0 ? opt.trunc : 2 * (*sf.q + 1);

  // Stage: side conditions.
  rep.conditions = check_th1_conditions(sf, opt.grid);
  bool violated = false;
  for (auto& c : rep.conditions) violated |= c.verdict == Verdict::violated && c.id != "A4.ii";
  detail::stage_ok(rep, "check_th1_conditions",
                   violated ? "at least one condition violated" : "all conditions hold");

  // Stage: type index (Case I only).
  if (sf.tag == CaseTag::I) {
    TypeR t = compute_type_r(sf, rep.truncation);
    rep.r = t.r;
    rep.r_above_truncation = !t.r.has_value();
    detail::stage_ok(rep, "compute_type_r",
                     t.r ? "r = " + std::to_string(*t.r)
                         : "vanishes to truncation " + std::to_string(rep.truncation));
  } else {
    rep.stages.push_back({"compute_type_r", "skipped", "defined for Case I only"});
  }

  // Stage: threshold.
  rep.threshold = gevrey_threshold(sf.tag, sf.p, sf.q, rep.r);
  if (rep.threshold) {
    detail::stage_ok(rep, "gevrey_threshold", to_string(*rep.threshold));
  } else {
    rep.threshold_note = "unknown: established for type I_0 only; other cases are open here";
    detail::stage_ok(rep, "gevrey_threshold", "unknown");
  }

  // Stratification summary and bracket-generation depth.
  int levels = opt.max_level > 0 ? opt.max_level : *sf.q;
  try {
    rep.layers = stratification(spec, levels);
  } catch (const pipeline_error&) {
    // Already classified; a stratification failure here only loses the summary.
  }
  int maxlen = opt.hormander_len > 0 ? opt.hormander_len : *sf.q + 1;
  HormanderResult h = hormander_check(spec, {Rational(0), Rational(0), Rational(0)}, maxlen);
  rep.hormander_length = h.length;
  rep.hormander_dim = h.ok() ? 3 : h.achieved_dim;

  if (violated) {
    rep.error = FailKind::A4Violated;
    rep.error_detail = "a side condition is violated; see conditions";
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

using json = nlohmann::ordered_json;

inline json to_json(const ClassificationReport& rep) {
  json j;
  j["name"] = rep.name;
  j["case"] = rep.tag ? json(case_name(*rep.tag)) : json(nullptr);
  j["subcase"] = rep.subcase.empty() ? json(nullptr) : json(rep.subcase);
  j["p"] = rep.p ? json(*rep.p) : json(nullptr);
  j["q"] = rep.q ? json(*rep.q) : json(nullptr);
  j["r"] = rep.r ? json(*rep.r)
                 : (rep.r_above_truncation ? json("above_truncation") : json(nullptr));
  if (rep.threshold) {
    j["threshold"] = {{"num", num(*rep.threshold).convert_to<long long>()},
                      {"den", den(*rep.threshold).convert_to<long long>()}};
  } else {
    j["threshold"] = nullptr;
  }
  j["conditions"] = json::array();
  for (auto& c : rep.conditions) {
    json jc;
    jc["id"] = c.id;
    jc["verdict"] = verdict_name(c.verdict);
    if (c.witness) {
      jc["witness"] = {to_string((*c.witness)[0]), to_string((*c.witness)[1]),
                       to_string((*c.witness)[2])};
    } else {
      jc["witness"] = nullptr;
    }
    jc["detail"] = c.detail;
    j["conditions"].push_back(jc);
  }
  j["layers"] = json::array();
  for (auto& l : rep.layers) {
    json jl;
    jl["level"] = l.level;
    jl["status"] = layer_status_name(l.status);
    if (!l.equation.empty()) jl["equation"] = l.equation;
    j["layers"].push_back(jl);
  }
  j["truncation"] = rep.truncation;
  j["grid"] = rep.grid;
  j["hormander"] = {{"length", rep.hormander_length ? json(*rep.hormander_length) : json(nullptr)},
                    {"dim", rep.hormander_dim}};
  j["stages"] = json::array();
  for (auto& s : rep.stages) j["stages"].push_back({{"stage", s.stage}, {"status", s.status}, {"detail", s.detail}});
  j["error"] = rep.error ? json(fail_kind_name(*rep.error)) : json(nullptr);
  if (!rep.error_detail.empty()) j["error_detail"] = rep.error_detail;
  j["versions"] = {{"tool", kToolVersion}, {"schema", kSchemaVersion}};
  return j;
}

inline std::string render_text(const ClassificationReport& rep) {
  std::string out;
  auto line = [&](const std::string& s) { out += s + "\n"; };
  line("operator: " + (rep.name.empty() ? "(unnamed)" : rep.name));
  if (rep.error) {
    line("status:   " + std::string(fail_kind_name(*rep.error)) + " -- " + rep.error_detail);
  } else {
    line("status:   classified");
  }
  if (rep.tag) {
    std::string c = case_name(*rep.tag);
    if (!rep.subcase.empty()) c += " (" + rep.subcase + ")";
    line("case:     " + c);
  }
  if (rep.p) line("p:        " + std::to_string(*rep.p));
  if (rep.q) line("q:        " + std::to_string(*rep.q));
  if (rep.r) {
    line("r:        " + std::to_string(*rep.r));
  } else if (rep.r_above_truncation) {
    line("r:        above truncation " + std::to_string(rep.truncation));
  } else if (rep.tag && *rep.tag != CaseTag::I) {
    line("r:        not defined (Case II)");
  }
  if (rep.threshold) {
    line("gevrey:   " + to_string(*rep.threshold));
  } else {
    line("gevrey:   unknown" + (rep.threshold_note.empty() ? "" : " (" + rep.threshold_note + ")"));
  }
  if (!rep.conditions.empty()) {
    line("conditions:");
    for (auto& c : rep.conditions) {
      std::string wl = "  " + c.id + ": " + verdict_name(c.verdict);
      if (c.witness)
        wl += " at (" + to_string((*c.witness)[0]) + ", " + to_string((*c.witness)[1]) + ", " +
              to_string((*c.witness)[2]) + ")";
      if (!c.detail.empty()) wl += "  [" + c.detail + "]";
      line(wl);
    }
  }
  if (!rep.layers.empty()) {
    line("layers:");
    for (auto& l : rep.layers) {
      std::string ll = "  Sigma_" + std::to_string(l.level) + ": " + layer_status_name(l.status);
      if (!l.equation.empty()) ll += "  (" + l.equation + ")";
      line(ll);
    }
  }
  if (rep.hormander_length)
    line("bracket generation at origin: length " + std::to_string(*rep.hormander_length));
  line("truncation: " + std::to_string(rep.truncation));
  return out;
}

/// Mismatch list against a declared expectation; empty means pass.
inline std::vector<std::string> compare_expectation(const ClassificationReport& rep,
                                                    const Expectation& e) {
  std::vector<std::string> bad;
  auto complain = [&](const std::string& s) { bad.push_back(s); };
  if (e.case_tag) {
    std::string got = rep.tag ? case_name(*rep.tag) : "(none)";
    if (got != *e.case_tag) complain("case: expected " + *e.case_tag + ", got " + got);
  }
  if (e.subcase && rep.subcase != *e.subcase)
    complain("subcase: expected " + *e.subcase + ", got " +
             (rep.subcase.empty() ? "(none)" : rep.subcase));
  if (e.p && rep.p != e.p)
    complain("p: expected " + std::to_string(*e.p) + ", got " +
             (rep.p ? std::to_string(*rep.p) : "(none)"));
  if (e.q && rep.q != e.q)
    complain("q: expected " + std::to_string(*e.q) + ", got " +
             (rep.q ? std::to_string(*rep.q) : "(none)"));
  if (e.r && rep.r != e.r)
    complain("r: expected " + std::to_string(*e.r) + ", got " +
             (rep.r ? std::to_string(*rep.r) : "(none)"));
  if (e.r_unknown && rep.r) complain("r: expected unknown, got " + std::to_string(*rep.r));
  if (e.threshold) {
    if (!rep.threshold || *rep.threshold != *e.threshold)
      complain("threshold: expected " + to_string(*e.threshold) + ", got " +
               (rep.threshold ? to_string(*rep.threshold) : "unknown"));
  }
  if (e.threshold_unknown && rep.threshold)
    complain("threshold: expected unknown, got " + to_string(*rep.threshold));
  return bad;
}

}  // namespace sostrat
