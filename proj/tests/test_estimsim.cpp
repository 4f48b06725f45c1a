#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "sostrat/estimsim.hpp"

using namespace sostrat;

namespace {

Rational ratio_bound(int p, int q) { return Rational(q, p); }

int ceil_qp_r(int p, int q, int r) {
  Rational b = Rational(q, p) * r;
  Integer n = num(b), d = den(b);
  return int((n + d - 1) / d);
}

}  // namespace

TEST_CASE("apply_move fixed examples") {
  SimParams p3 = SimParams::make(3, 5, 10);
  NormTerm n = NormTerm::initial(p3);
  NormTerm after = apply_move(n, Move::phi(), p3);
  CHECK(after.a == 2);
  CHECK(after.k == 1);
  CHECK(after.b == 1);
  CHECK(after.cq == 1);

  SimParams p2 = SimParams::make(2, 3, 10);
  NormTerm m = NormTerm::initial(p2);
  m = apply_move(m, Move::phi(), p2);  // a = 1
  NormTerm sub = apply_move(m, Move::sub(), p2);
  CHECK(sub.a == 0);
  CHECK(sub.s == 1);
  CHECK(sub.cq == 2);

  CHECK_THROWS_MATCHES(apply_move(NormTerm::initial(p2), Move::create(), p2), pipeline_error,
                       Catch::Matchers::Predicate<pipeline_error>([](const pipeline_error& e) {
                         return e.kind() == FailKind::IllegalMove;
                       }));
  CHECK_THROWS_AS(apply_move(NormTerm::initial(p2), Move::sub(), p2), pipeline_error);
}

TEST_CASE("frozen search values") {
  CHECK(max_weight(1, 1, 10, SearchMode::dp).weight == 10);
  CHECK(max_weight(1, 1, 10, SearchMode::exhaustive).weight == 10);

  SearchResult r12 = max_weight(1, 2, 20, SearchMode::dp);
  CHECK(r12.weight == 40);  // ratio exactly q/p = 2

  SearchResult r25 = max_weight(2, 5, 50, SearchMode::dp);
  CHECK(r25.weight == 125);
  CHECK(Rational(r25.weight, 50) <= ratio_bound(2, 5));
}

TEST_CASE("dp equals exhaustive on the overlap domain") {
  for (int q = 1; q <= 4; ++q)
    for (int p = 1; p <= q; ++p)
      for (int r : {3, 7, 10, 20}) {
        INFO("p=" << p << " q=" << q << " r=" << r);
        int dp = max_weight(p, q, r, SearchMode::dp).weight;
        int ex = max_weight(p, q, r, SearchMode::exhaustive).weight;
        REQUIRE(dp == ex);
      }
}

TEST_CASE("soundness bound over the grid") {
  for (int q = 1; q <= 5; ++q)
    for (int p = 1; p <= q; ++p)
      for (int r : {10, 20, 40, 60}) {
        INFO("p=" << p << " q=" << q << " r=" << r);
        int w = max_weight(p, q, r, SearchMode::dp).weight;
        REQUIRE(w <= ceil_qp_r(p, q, r));
        // Slack-form invariant: w/r <= q/p + (1/r)(q/p) q.
        REQUIRE(Rational(w, r) <= ratio_bound(p, q) * (Rational(1) + Rational(q, r)));
      }
}

TEST_CASE("monotonicity of the maximum weight") {
  for (int q = 1; q <= 4; ++q)
    for (int p = 1; p <= q; ++p) {
      int prev = -1;
      for (int r : {5, 10, 15, 20}) {
        int w = max_weight(p, q, r, SearchMode::dp).weight;
        REQUIRE(w >= prev);
        prev = w;
      }
    }
  for (int r : {10, 20}) {
    // Nondecreasing in q at fixed p, nonincreasing in p at fixed q.
    for (int p = 1; p <= 3; ++p) {
      int prev = -1;
      for (int q = p; q <= 5; ++q) {
        int w = max_weight(p, q, r, SearchMode::dp).weight;
        REQUIRE(w >= prev);
        prev = w;
      }
    }
    for (int q = 5; q >= 1; --q) {
      int prev = INT32_MAX;
      for (int p = 1; p <= q; ++p) {
        int w = max_weight(p, q, r, SearchMode::dp).weight;
        REQUIRE(w <= prev);
        prev = w;
      }
    }
  }
}

TEST_CASE("greedy is legal, terminal on the grid, and dominated by dp") {
  for (int q = 1; q <= 5; ++q)
    for (int p = 1; p <= q; ++p)
      for (int r : {10, 20, 40}) {
        INFO("p=" << p << " q=" << q << " r=" << r);
        SearchResult g = max_weight(p, q, r, SearchMode::greedy);
        REQUIRE(g.completed);
        int dp = max_weight(p, q, r, SearchMode::dp).weight;
        REQUIRE(g.weight <= dp);
        auto v = verify_exponent_identities(g.trace, p, q);
        REQUIRE(v.ok);
      }
}

TEST_CASE("dp trace reconstruction is legal and attains the maximum") {
  for (auto [p, q, r] : {std::tuple{2, 3, 12}, std::tuple{2, 5, 20}, std::tuple{3, 4, 15}}) {
    SearchResult res = max_weight(p, q, r, SearchMode::dp);
    SimParams ps = SimParams::make(p, q, r);
    REQUIRE(!res.trace.states.empty());
    REQUIRE(res.trace.states.back().terminal(ps));
    REQUIRE(res.trace.weight() == res.weight);
    auto v = verify_exponent_identities(res.trace, p, q);
    REQUIRE(v.ok);
  }
}

TEST_CASE("verify_exponent_identities on single moves and a brute witness") {
  SimParams ps = SimParams::make(2, 3, 10);
  auto tr = make_trace({Move::phi()}, ps);
  CHECK(verify_exponent_identities(tr, 2, 3).ok);

  // Witness with k = 3, s = 0, t = 1 (p = 2, q = 3): x1 inventory is
  // 3*1 - 0 - 1*2 = 1 >= 0, found by ordering phi/phi/create/phi.
  auto witness = make_trace({Move::phi(), Move::phi(), Move::create(), Move::phi()}, ps);
  const NormTerm& last = witness.states.back();
  CHECK(last.k == 3);
  CHECK(last.s == 0);
  CHECK(last.t == 1);
  CHECK(last.a == 1);
  CHECK(verify_exponent_identities(witness, 2, 3).ok);
}

TEST_CASE("verify_exponent_identities over random legal traces") {
  std::mt19937_64 rng(991199);
  for (auto [p, q] : {std::pair{1, 2}, std::pair{2, 3}, std::pair{2, 5}}) {
    SimParams ps = SimParams::make(p, q, 12);
    for (int iter = 0; iter < 334; ++iter) {
      NormTerm cur = NormTerm::initial(ps);
      std::vector<Move> moves;
      for (int step = 0; step < 40; ++step) {
        std::vector<Move> legal;
        for (Move m : {Move::sub(), Move::phi(), Move::create(), Move::rloss(1), Move::rloss(2)})
          if (move_legal(cur, m, ps)) legal.push_back(m);
        if (legal.empty()) break;
        Move pick = legal[rng() % legal.size()];
        cur = apply_move(cur, pick, ps);
        moves.push_back(pick);
      }
      auto tr = make_trace(moves, ps);
      REQUIRE(verify_exponent_identities(tr, p, q).ok);
    }
  }
}

TEST_CASE("trace rendering carries one move per line") {
  SimParams ps = SimParams::make(2, 3, 5);
  auto tr = make_trace({Move::phi(), Move::sub(), Move::rloss(2)}, ps);
  std::string text = trace_to_text(tr);
  CHECK(text.find("PHI_STEP a=1") != std::string::npos);
  CHECK(text.find("SUBELLIPTIC a=0") != std::string::npos);
  CHECK(text.find("RLOSS(2)") != std::string::npos);
  CHECK(text.find("weight K+L = 3") != std::string::npos);
}
