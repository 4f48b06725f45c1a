#pragma once

// Mechanized bookkeeping of the Gevrey estimate iteration: norm terms are
// abstracted to their exponent state (power of x1, cutoff derivatives, D3
// deficit in exact 1/q units, move counters) and the four admissible
// reduction moves are searched for the maximum accumulated weight K + L.
// The certified bound is weight <= ceil(q/p * r).
//
// Conventions pinned here (see README for the full statement):
//  * the x1 inventory never exceeds q, matching the standing a <= q
//    constraint of the estimate;
//  * a derivation terminates when the D3 budget is exhausted AND the x1
//    inventory has returned to zero ("returning to the starting point");
//    with the move legality below the budget can never go negative, so no
//    overshoot is reported;
//  * the cutoff derivative budget is max(3, ceil(q/p)) * r; the plain 3r
//    budget starves the optimal path only for p = 1, q > 3, where the
//    cutoff family with a larger fixed multiple serves the same role.

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "sostrat/errors.hpp"
#include "sostrat/rational.hpp"

namespace sostrat {

struct SimParams {
  int p = 1, q = 1, r = 1;
  int phi_budget = 0;  // max cutoff derivatives; 0 selects the default

  static SimParams make(int p, int q, int r, int phi_multiple = 0) {
    if (!(1 <= p && p <= q) || r < 1)
      throw std::invalid_argument("SimParams: need 1 <= p <= q and r >= 1");
    SimParams s;
    s.p = p;
    s.q = q;
    s.r = r;
    int mult = phi_multiple > 0 ? phi_multiple : std::max(3, (q + p - 1) / p);
    s.phi_budget = mult * r;
    return s;
  }
};

/// Exponent state of a norm term. cq counts the D3 deficit in units of 1/q
/// (c = cq/q); the counters record how many moves of each kind produced the
/// state.
struct NormTerm {
  int a = 0;   // power of x1
  int b = 0;   // derivatives on the cutoff (= k)
  int cq = 0;  // D3 deficit in 1/q units
  int r = 0;   // derivative budget
  int s = 0, k = 0, t = 0, l = 0;

  static NormTerm initial(const SimParams& ps) {
    NormTerm n;
    n.r = ps.r;
    return n;
  }

  int weight() const { return k + l; }

  /// Remaining D3 exponent in 1/q units (termination metric).
  int remaining_units(const SimParams& ps) const { return ps.q * ps.r - cq; }

  /// Remaining exponent of the iteration formula
  /// r - l - (k+s-t)/q - t, in 1/q units; differs from remaining_units by
  /// the +t credit of the skipped subelliptic shunt before each X-creation.
  int iteration_residual_units(const SimParams& ps) const {
    return ps.q * (ps.r - l - t) - (k + s - t);
  }

  bool terminal(const SimParams& ps) const { return remaining_units(ps) <= 0 && a == 0; }

  /// Invariants tying the tracked exponents to the move counters.
  bool consistent(const SimParams& ps) const {
    return a == k * (ps.p - 1) - s - t * (ps.q - 1) && a >= 0 && a <= ps.q && b == k &&
           b <= ps.phi_budget && cq == k + s + ps.q * t + ps.q * l && remaining_units(ps) >= 0;
  }
};

enum class MoveKind { subelliptic, phi_step, x_create, rloss };

inline const char* move_name(MoveKind m) {
  switch (m) {
    case MoveKind::subelliptic: return "SUBELLIPTIC";
    case MoveKind::phi_step: return "PHI_STEP";
    case MoveKind::x_create: return "X_CREATE";
    default: return "RLOSS";
  }
}

struct Move {
  MoveKind kind = MoveKind::subelliptic;
  int amount = 1;  // RLOSS loss l' >= 1; 1 for the other kinds

  static Move sub() { return {MoveKind::subelliptic, 1}; }
  static Move phi() { return {MoveKind::phi_step, 1}; }
  static Move create() { return {MoveKind::x_create, 1}; }
  static Move rloss(int lp) { return {MoveKind::rloss, lp}; }
};

/// Move legality from a non-terminal state. Each move must keep the D3
/// budget nonnegative: the subelliptic shunt and the cutoff step spend one
/// 1/q unit, creating an X spends a full D3, and an RLOSS of l' spends l'
/// full D3 powers.
inline bool move_legal(const NormTerm& n, const Move& m, const SimParams& ps) {
  int R = n.remaining_units(ps);
  if (R <= 0) return false;
  switch (m.kind) {
    case MoveKind::subelliptic:
      return n.a >= 1;
    case MoveKind::phi_step:
      return n.k + 1 <= ps.phi_budget && n.a + ps.p - 1 <= ps.q;
    case MoveKind::x_create:
      return n.a >= ps.q - 1 && R >= ps.q;
    case MoveKind::rloss:
      return m.amount >= 1 && ps.q * m.amount <= R;
  }
  return false;
}

inline NormTerm apply_move(const NormTerm& n, const Move& m, const SimParams& ps) {
  if (!move_legal(n, m, ps))
    throw pipeline_error(FailKind::IllegalMove,
                         std::string(move_name(m.kind)) + " not applicable (a=" +
                             std::to_string(n.a) + ", remaining=" +
                             std::to_string(n.remaining_units(ps)) + "/q)");
  NormTerm out = n;
  switch (m.kind) {
    case MoveKind::subelliptic:
      out.a -= 1;
      out.s += 1;
      out.cq += 1;
      break;
    case MoveKind::phi_step:
      out.a += ps.p - 1;
      out.k += 1;
      out.b += 1;
      out.cq += 1;
      break;
    case MoveKind::x_create:
      out.a -= ps.q - 1;
      out.t += 1;
      out.cq += ps.q;
      break;
    case MoveKind::rloss:
      out.l += m.amount;
      out.cq += ps.q * m.amount;
      break;
  }
  if (!out.consistent(ps))
    throw pipeline_error(FailKind::IllegalMove, "move breaks a state invariant");
  return out;
}

struct DerivationTrace {
  std::vector<Move> moves;
  std::vector<NormTerm> states;  // states[i] is the state after moves[i]
  int K = 0, L = 0;

  int weight() const { return K + L; }
};

inline DerivationTrace make_trace(const std::vector<Move>& moves, const SimParams& ps) {
  DerivationTrace tr;
  NormTerm cur = NormTerm::initial(ps);
  for (const Move& m : moves) {
    cur = apply_move(cur, m, ps);
    tr.moves.push_back(m);
    tr.states.push_back(cur);
  }
  tr.K = cur.k;
  tr.L = cur.l;
  return tr;
}

// ---------------------------------------------------------------------------
// Search
// ---------------------------------------------------------------------------

enum class SearchMode { exhaustive, dp, greedy };

struct SearchResult {
  int weight = 0;
  DerivationTrace trace;
  bool completed = true;  // greedy may fail to reach a terminal state
};

namespace detail {

constexpr int kDead = INT32_MIN / 2;

/// Admissible upper bound on the additional weight from a state: every
/// terminal completion satisfies p * W_future <= remaining - a, and the
/// cutoff budget caps the phi contribution.
inline int weight_upper_bound(int a, int R, int k, const SimParams& ps) {
  int ub1 = (R - a) / ps.p;
  int ub2 = (ps.phi_budget - k) + R / ps.q;
  return std::min(ub1, ub2);
}

class DpTable {
 public:
  explicit DpTable(const SimParams& ps)
      : ps_(ps),
        max_cq_(ps.q * ps.r),
        max_k_(ps.phi_budget),
        value_(size_t(ps.q + 1) * size_t(max_cq_ + 1) * size_t(max_k_ + 1), kUnset) {}

  int value(const NormTerm& n) { return value(n.a, n.cq, n.k); }

  int value(int a, int cq, int k) {
    int& slot = value_[index(a, cq, k)];
    if (slot != kUnset) return slot;
    slot = kDead;  // cq strictly increases along moves, so no cycles
    int R = max_cq_ - cq;
    if (R <= 0) {
      slot = a == 0 ? 0 : kDead;
      return slot;
    }
    int best = kDead;
    // subelliptic
    if (a >= 1) best = std::max(best, value(a - 1, cq + 1, k));
    // phi step
    if (k + 1 <= max_k_ && a + ps_.p - 1 <= ps_.q) {
      int v = value(a + ps_.p - 1, cq + 1, k + 1);
      if (v > kDead) best = std::max(best, v + 1);
    }
    // X creation
    if (a >= ps_.q - 1 && R >= ps_.q) best = std::max(best, value(a - (ps_.q - 1), cq + ps_.q, k));
    // RLOSS(1); larger losses decompose into unit losses with identical
    // cumulative effect and legality.
    if (R >= ps_.q) {
      int v = value(a, cq + ps_.q, k);
      if (v > kDead) best = std::max(best, v + 1);
    }
    slot = best;
    return slot;
  }

  /// Rebuilds one maximizing trace from `cur` by following argmax
  /// transitions.
  std::vector<Move> reconstruct(NormTerm cur) {
    std::vector<Move> moves;
    while (!(cur.remaining_units(ps_) <= 0 && cur.a == 0)) {
      int here = value(cur);
      if (here <= kDead) break;
      bool advanced = false;
      for (const Move& m : {Move::phi(), Move::rloss(1), Move::create(), Move::sub()}) {
        if (!move_legal(cur, m, ps_)) continue;
        NormTerm nxt = apply_move(cur, m, ps_);
        int gain = m.kind == MoveKind::phi_step || m.kind == MoveKind::rloss ? 1 : 0;
        int v = value(nxt);
        if (v > kDead && v + gain == here) {
          moves.push_back(m);
          cur = nxt;
          advanced = true;
          break;
        }
      }
      if (!advanced) break;
    }
    return moves;
  }

 private:
  static constexpr int kUnset = INT32_MIN;
  size_t index(int a, int cq, int k) const {
    return (size_t(a) * size_t(max_cq_ + 1) + size_t(cq)) * size_t(max_k_ + 1) + size_t(k);
  }
  SimParams ps_;
  int max_cq_, max_k_;
  std::vector<int> value_;
};

/// Depth-first enumeration with sound pruning against the admissible bound;
/// used as the independent oracle for the DP on small instances.
class ExhaustiveSearch {
 public:
  explicit ExhaustiveSearch(const SimParams& ps) : ps_(ps) {}

  SearchResult run() {
    best_ = -1;
    NormTerm init = NormTerm::initial(ps_);
    dfs(init);
    SearchResult out;
    out.weight = std::max(best_, 0);
    out.trace = make_trace(best_moves_, ps_);
    return out;
  }

 private:
  void dfs(const NormTerm& cur) {
    if (cur.terminal(ps_)) {
      if (cur.weight() > best_) {
        best_ = cur.weight();
        best_moves_ = path_;
      }
      return;
    }
    int R = cur.remaining_units(ps_);
    if (cur.weight() + weight_upper_bound(cur.a, R, cur.k, ps_) <= best_) return;
    for (const Move& m : {Move::phi(), Move::rloss(1), Move::create(), Move::sub()}) {
      if (!move_legal(cur, m, ps_)) continue;
      path_.push_back(m);
      dfs(apply_move(cur, m, ps_));
      path_.pop_back();
    }
  }

  SimParams ps_;
  int best_ = -1;
  std::vector<Move> path_, best_moves_;
};

/// The narrative strategy: combine x1^{q-1} with a D3 whenever possible,
/// otherwise grow the cutoff order and shunt with subellipticity, keeping
/// the x1 inventory drainable (R >= a throughout). Once the remaining
/// budget is small the tail is finished exactly; every budget above the
/// tail threshold admits a terminal completion, so greedy always lands on
/// a legal terminal state.
inline SearchResult greedy_search(const SimParams& ps) {
  std::vector<Move> moves;
  NormTerm cur = NormTerm::initial(ps);
  auto step = [&](Move m) {
    cur = apply_move(cur, m, ps);
    moves.push_back(m);
  };
  const int tail = 4 * ps.q + 2 * ps.p;
  while (cur.remaining_units(ps) > tail) {
    int R = cur.remaining_units(ps);
    if (ps.q >= 2 && cur.a >= ps.q - 1 && R >= ps.q && R - ps.q >= cur.a - (ps.q - 1)) {
      step(Move::create());
    } else if (cur.k < ps.phi_budget && cur.a + ps.p - 1 <= ps.q && R >= cur.a + ps.p) {
      step(Move::phi());
    } else if (cur.a >= 1) {
      step(Move::sub());
    } else {
      step(Move::rloss(1));
    }
  }
  DpTable table(ps);
  for (const Move& m : table.reconstruct(cur)) {
    cur = apply_move(cur, m, ps);
    moves.push_back(m);
  }
  SearchResult out;
  out.trace = make_trace(moves, ps);
  out.weight = out.trace.weight();
  out.completed = cur.terminal(ps);
  return out;
}

}  // namespace detail

/// Maximum of K + L over all legal terminal derivations from the zero state.
inline SearchResult max_weight(int p, int q, int r, SearchMode mode, int phi_multiple = 0) {
  SimParams ps = SimParams::make(p, q, r, phi_multiple);
  switch (mode) {
    case SearchMode::dp: {
      detail::DpTable table(ps);
      SearchResult out;
      int v = table.value(0, 0, 0);
      out.weight = std::max(v, 0);
      out.trace = make_trace(table.reconstruct(NormTerm::initial(ps)), ps);
      return out;
    }
    case SearchMode::exhaustive:
      return detail::ExhaustiveSearch(ps).run();
    case SearchMode::greedy:
      return detail::greedy_search(ps);
  }
  throw std::logic_error("unreachable");
}

/// Replays a trace and checks the closed-form exponent identities of the
/// iteration against the incrementally tracked state at every step:
/// x1-exponent k(p-1) - s - t(q-1), D3 residual r - l - (k+s-t)/q - t, the
/// deficit ledger cq = k + s + q(t + l), and, whenever the x1 inventory is
/// zero, the reduced residual r - (l + k p/q).
struct VerifyResult {
  bool ok = true;
  std::optional<size_t> first_bad_step;
};

inline VerifyResult verify_exponent_identities(const DerivationTrace& trace, int p, int q) {
  VerifyResult out;
  if (trace.states.empty()) return out;
  int r = trace.states.front().r;
  SimParams ps = SimParams::make(p, q, std::max(r, 1));
  auto bad = [&](size_t i) {
    out.ok = false;
    out.first_bad_step = i;
    return out;
  };
  for (size_t i = 0; i < trace.states.size(); ++i) {
    const NormTerm& n = trace.states[i];
    if (n.a != n.k * (p - 1) - n.s - n.t * (q - 1)) return bad(i);
    if (n.b != n.k) return bad(i);
    if (n.cq != n.k + n.s + q * (n.t + n.l)) return bad(i);
    int residual = n.iteration_residual_units(ps);
    if (residual != q * (r - n.l - n.t) - (n.k + n.s - n.t)) return bad(i);
    if (n.a == 0) {
      // With the inventory drained the residual collapses to r - (l + kp/q).
      if (residual != q * (r - n.l) - n.k * p) return bad(i);
    }
  }
  return out;
}

/// One line per move: kind plus the full post-state, for audit files.
inline std::string trace_to_text(const DerivationTrace& trace) {
  std::string out;
  for (size_t i = 0; i < trace.moves.size(); ++i) {
    const Move& m = trace.moves[i];
    const NormTerm& n = trace.states[i];
    out += move_name(m.kind);
    if (m.kind == MoveKind::rloss) out += "(" + std::to_string(m.amount) + ")";
    out += " a=" + std::to_string(n.a) + " b=" + std::to_string(n.b) +
           " cq=" + std::to_string(n.cq) + " s=" + std::to_string(n.s) +
           " k=" + std::to_string(n.k) + " t=" + std::to_string(n.t) +
           " l=" + std::to_string(n.l) + "\n";
  }
  out += "weight K+L = " + std::to_string(trace.weight()) + "\n";
  return out;
}

}  // namespace sostrat
