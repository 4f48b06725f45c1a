#pragma once

// Line-oriented operator-spec format: optional header lines (name:, vars:,
// point:, codir:, expect:) followed by one field definition per line,
//   Xj = <expr>
// where <expr> combines rational literals, x1..x3 and D1..D3 with + - * ^
// and parentheses. Each D_i must occur linearly; '#' starts a comment.

#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sostrat/errors.hpp"
#include "sostrat/field.hpp"
#include "sostrat/poly.hpp"

namespace sostrat {

/// A product of two D-carrying expressions (or a power of one) is not a
/// vector field; reported with the position of the offending operator.
class nonlinear_in_d_error : public parse_error {
 public:
  nonlinear_in_d_error(int line, int col)
      : parse_error(line, col, "expression is nonlinear in D1/D2/D3") {}
};

/// Declared expectations for corpus testing; every member optional.
struct Expectation {
  std::optional<std::string> case_tag;  // "I", "IIa", "IIb"
  std::optional<std::string> subcase;   // "b1", "b2"
  std::optional<int> p, q;
  std::optional<int> r;                  // engaged only when declared numeric
  bool r_unknown = false;
  std::optional<Rational> threshold;
  bool threshold_unknown = false;

  bool any() const {
    return case_tag || subcase || p || q || r || r_unknown || threshold || threshold_unknown;
  }

  friend bool operator==(const Expectation&, const Expectation&) = default;
};

struct SpecDocument {
  std::string name;
  OperatorSpec spec;
  Expectation expect;

  friend bool operator==(const SpecDocument& a, const SpecDocument& b) {
    return a.name == b.name && a.spec == b.spec && a.expect == b.expect;
  }
};

namespace detail {

struct Token {
  enum Kind { number, ident, plus, minus, star, caret, lparen, rparen, end } kind = end;
  std::string text;
  int line = 1, col = 1;
};

class ExprLexer {
 public:
  ExprLexer(const std::string& src, int line, int col_offset = 0)
      : src_(src), line_(line), col_offset_(col_offset) {}

  Token next() {
    skip_ws();
    Token t;
    t.line = line_;
    t.col = col_offset_ + int(pos_) + 1;
    if (pos_ >= src_.size() || src_[pos_] == '#') {
      t.kind = Token::end;
      return t;
    }
    char c = src_[pos_];
    switch (c) {
      case '+': t.kind = Token::plus; break;
      case '-': t.kind = Token::minus; break;
      case '*': t.kind = Token::star; break;
      case '^': t.kind = Token::caret; break;
      case '(': t.kind = Token::lparen; break;
      case ')': t.kind = Token::rparen; break;
      default:
        if (std::isdigit(static_cast<unsigned char>(c))) {
          size_t start = pos_;
          while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
          // Rational literal: INT optionally followed by '/INT'.
          if (pos_ < src_.size() && src_[pos_] == '/') {
            size_t save = pos_;
            ++pos_;
            size_t den_start = pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            if (pos_ == den_start) pos_ = save;  // bare '/': leave for error reporting
          }
          t.kind = Token::number;
          t.text = src_.substr(start, pos_ - start);
          return t;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
          size_t start = pos_;
          while (pos_ < src_.size() &&
                 (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            ++pos_;
          t.kind = Token::ident;
          t.text = src_.substr(start, pos_ - start);
          return t;
        }
        throw parse_error(line_, col_offset_ + int(pos_) + 1,
                          std::string("unexpected character '") + c + "'");
    }
    ++pos_;
    return t;
  }

 private:
  void skip_ws() {
    while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t')) ++pos_;
  }
  std::string src_;
  int line_;
  int col_offset_ = 0;
  size_t pos_ = 0;
};

/// Value lattice during evaluation: a scalar polynomial plus one polynomial
/// coefficient per D-symbol.
struct LinVal {
  Poly s, d1, d2, d3;

  bool has_d() const { return !d1.is_zero() || !d2.is_zero() || !d3.is_zero(); }

  LinVal operator+(const LinVal& o) const { return {s + o.s, d1 + o.d1, d2 + o.d2, d3 + o.d3}; }
  LinVal operator-(const LinVal& o) const { return {s - o.s, d1 - o.d1, d2 - o.d2, d3 - o.d3}; }
  LinVal negate() const { return {-s, -d1, -d2, -d3}; }
};

class ExprParser {
 public:
  ExprParser(const std::string& src, int line, int col_offset = 0)
      : lex_(src, line, col_offset), line_(line) {
    advance();
  }

  LinVal parse_full() {
    LinVal v = parse_expr();
    expect(Token::end, "end of expression");
    return v;
  }

 private:
  void advance() { cur_ = lex_.next(); }

  void expect(Token::Kind k, const std::string& what) {
    if (cur_.kind != k)
      throw parse_error(cur_.line, cur_.col,
                        "unexpected " + (cur_.kind == Token::end ? "end of line" : "'" + cur_.text + "'"),
                        what);
  }

  LinVal parse_expr() {
    LinVal acc = parse_term();
    while (cur_.kind == Token::plus || cur_.kind == Token::minus) {
      bool minus = cur_.kind == Token::minus;
      advance();
      LinVal rhs = parse_term();
      acc = minus ? acc - rhs : acc + rhs;
    }
    return acc;
  }

  LinVal parse_term() {
    LinVal acc = parse_factor();
    while (cur_.kind == Token::star) {
      int line = cur_.line, col = cur_.col;
      advance();
      LinVal rhs = parse_factor();
      acc = multiply(acc, rhs, line, col);
    }
    return acc;
  }

  LinVal multiply(const LinVal& a, const LinVal& b, int line, int col) {
    if (a.has_d() && b.has_d()) throw nonlinear_in_d_error(line, col);
    const LinVal& scalar = a.has_d() ? b : a;
    const LinVal& other = a.has_d() ? a : b;
    return {scalar.s * other.s, scalar.s * other.d1, scalar.s * other.d2, scalar.s * other.d3};
  }

  LinVal parse_factor() {
    LinVal base = parse_atom();
    if (cur_.kind == Token::caret) {
      int line = cur_.line, col = cur_.col;
      advance();
      expect(Token::number, "a nonnegative integer exponent");
      if (cur_.text.find('/') != std::string::npos)
        throw parse_error(cur_.line, cur_.col, "exponent must be an integer");
      unsigned e = unsigned(std::stoul(cur_.text));
      advance();
      if (base.has_d()) {
        if (e != 1) throw nonlinear_in_d_error(line, col);
        return base;
      }
      return {base.s.pow(e), Poly(), Poly(), Poly()};
    }
    return base;
  }

  LinVal parse_atom() {
    switch (cur_.kind) {
      case Token::minus: {
        advance();
        return parse_atom().negate();
      }
      case Token::plus: {
        advance();
        return parse_atom();
      }
      case Token::number: {
        auto r = parse_rational(cur_.text);
        if (!r) throw parse_error(cur_.line, cur_.col, "malformed rational '" + cur_.text + "'");
        advance();
        return {Poly(*r), Poly(), Poly(), Poly()};
      }
      case Token::ident: {
        std::string id = cur_.text;
        int line = cur_.line, col = cur_.col;
        advance();
        if (id.size() == 2 && (id[0] == 'x' || id[0] == 'D') && id[1] >= '1' && id[1] <= '3') {
          int var = id[1] - '0';
          if (id[0] == 'x') return {Poly::variable(var), Poly(), Poly(), Poly()};
          LinVal v;
          (var == 1 ? v.d1 : var == 2 ? v.d2 : v.d3) = Poly(1);
          return v;
        }
        throw parse_error(line, col, "unknown identifier '" + id + "'",
                          "x1..x3, D1..D3, a rational or '('");
      }
      case Token::lparen: {
        advance();
        LinVal v = parse_expr();
        expect(Token::rparen, "')'");
        advance();
        return v;
      }
      default:
        throw parse_error(cur_.line, cur_.col,
                          "unexpected " + (cur_.kind == Token::end ? "end of line" : "'" + cur_.text + "'"),
                          "x1..x3, D1..D3, a rational or '('");
    }
  }

  ExprLexer lex_;
  Token cur_;
  int line_;
};

inline std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  size_t b = s.find_last_not_of(" \t\r");
  return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

inline std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ' ' || c == '\t') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

inline Expectation parse_expectation(const std::string& body, int line_no) {
  Expectation e;
  for (const std::string& kv : split_ws(body)) {
    auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw parse_error(line_no, 1, "expect entries must look like key=value, got '" + kv + "'");
    std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
    if (key == "case") {
      e.case_tag = val;
    } else if (key == "subcase") {
      e.subcase = val;
    } else if (key == "p" || key == "q" || key == "r") {
      if (val == "unknown" && key == "r") {
        e.r_unknown = true;
        continue;
      }
      try {
        int n = std::stoi(val);
        (key == "p" ? e.p : key == "q" ? e.q : e.r) = n;
      } catch (...) {
        throw parse_error(line_no, 1, "expect." + key + " must be an integer, got '" + val + "'");
      }
    } else if (key == "threshold") {
      if (val == "unknown") {
        e.threshold_unknown = true;
      } else {
        auto r = parse_rational(val);
        if (!r) throw parse_error(line_no, 1, "expect.threshold must be rational or 'unknown'");
        e.threshold = *r;
      }
    } else {
      throw parse_error(line_no, 1, "unknown expect key '" + key + "'");
    }
  }
  return e;
}

}  // namespace detail

/// Parses a single field expression (the `basis --target` surface).
inline FieldSymbol parse_field_expr(const std::string& text, int line_no = 1) {
  detail::ExprParser p(text, line_no);
  detail::LinVal v = p.parse_full();
  if (!v.s.is_zero())
    throw parse_error(line_no, 1, "expression has a D-free part: " + to_string(v.s));
  return {v.d1, v.d2, v.d3};
}

inline SpecDocument parse_spec(const std::string& text) {
  SpecDocument doc;
  std::array<bool, 3> seen{false, false, false};
  int line_no = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t nl = text.find('\n', pos);
    std::string raw = nl == std::string::npos ? text.substr(pos) : text.substr(pos, nl - pos);
    pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    std::string line = detail::trim(raw);
    if (line.empty() || line[0] == '#') continue;

    auto colon = line.find(':');
    auto eq = line.find('=');
    if (colon != std::string::npos && (eq == std::string::npos || colon < eq)) {
      std::string key = detail::trim(line.substr(0, colon));
      std::string body = detail::trim(line.substr(colon + 1));
      auto hash = body.find('#');
      if (hash != std::string::npos) body = detail::trim(body.substr(0, hash));
      if (key == "name") {
        doc.name = body;
      } else if (key == "vars") {
        if (detail::split_ws(body) != std::vector<std::string>{"x1", "x2", "x3"})
          throw parse_error(line_no, 1, "vars must be exactly 'x1 x2 x3'");
      } else if (key == "point") {
        auto parts = detail::split_ws(body);
        if (parts.size() != 3) throw parse_error(line_no, 1, "point needs three rationals");
        for (int i = 0; i < 3; ++i) {
          auto r = parse_rational(parts[size_t(i)]);
          if (!r) throw parse_error(line_no, 1, "bad rational '" + parts[size_t(i)] + "'");
          doc.spec.base_point[size_t(i)] = *r;
        }
      } else if (key == "codir") {
        auto c = Codirection::parse(body);
        if (!c) throw parse_error(line_no, 1, "codir must be one of +-e1, +-e2, +-e3");
        doc.spec.codirection = *c;
      } else if (key == "expect") {
        doc.expect = detail::parse_expectation(body, line_no);
      } else {
        throw parse_error(line_no, 1, "unknown header '" + key + "'",
                          "name:, vars:, point:, codir:, expect: or Xj = ...");
      }
      continue;
    }

    if (eq == std::string::npos)
      throw parse_error(line_no, 1, "expected 'Xj = <expr>'", "a field definition");
    std::string lhs = detail::trim(line.substr(0, eq));
    if (lhs.size() != 2 || lhs[0] != 'X' || lhs[1] < '1' || lhs[1] > '3')
      throw parse_error(line_no, 1, "left-hand side must be X1, X2 or X3, got '" + lhs + "'");
    int idx = lhs[1] - '0';
    if (seen[size_t(idx - 1)])
      throw parse_error(line_no, 1, "duplicate definition of " + lhs);
    seen[size_t(idx - 1)] = true;

    detail::ExprParser parser(line.substr(eq + 1), line_no, int(eq) + 1);
    detail::LinVal v = parser.parse_full();
    if (!v.s.is_zero())
      throw parse_error(line_no, 1, lhs + " has a D-free part: " + to_string(v.s));
    FieldSymbol f{v.d1, v.d2, v.d3};
    (idx == 1 ? doc.spec.X1 : idx == 2 ? doc.spec.X2 : doc.spec.X3) = f;
  }
  for (int i = 0; i < 3; ++i)
    if (!seen[size_t(i)])
      throw parse_error(line_no, 1, "missing definition of X" + std::to_string(i + 1));
  return doc;
}

namespace detail {

/// Field as a canonical expression: polynomial coefficients ahead of their
/// D-symbols, highest D last dropped to match reading order D1, D2, D3.
inline std::string field_to_expr(const FieldSymbol& f) {
  std::string out;
  for (int v = 1; v <= 3; ++v) {
    const Poly& c = f.coeff(v);
    if (c.is_zero()) continue;
    std::string coeff;
    if (c == Poly(1)) {
      coeff = "";
    } else if (c == Poly(-1)) {
      coeff = "-";
    } else if (c.terms().size() == 1) {
      coeff = to_string(c) + "*";
    } else {
      coeff = "(" + to_string(c) + ")*";
    }
    std::string term = coeff + "D" + std::to_string(v);
    if (out.empty()) {
      out = term;
    } else if (!term.empty() && term[0] == '-') {
      out += " - " + term.substr(1);
    } else {
      out += " + " + term;
    }
  }
  return out.empty() ? "0*D1" : out;
}

}  // namespace detail

/// Canonical printer; parse(print_spec(doc)) == doc.
inline std::string print_spec(const SpecDocument& doc) {
  std::string out;
  if (!doc.name.empty()) out += "name: " + doc.name + "\n";
  out += "vars: x1 x2 x3\n";
  bool origin = true;
  for (auto& c : doc.spec.base_point) origin &= c == 0;
  if (!origin)
    out += "point: " + to_string(doc.spec.base_point[0]) + " " + to_string(doc.spec.base_point[1]) +
           " " + to_string(doc.spec.base_point[2]) + "\n";
  if (doc.spec.codirection.axis != 3 || doc.spec.codirection.sign != 1)
    out += "codir: " + doc.spec.codirection.str() + "\n";
  if (doc.expect.any()) {
    out += "expect:";
    if (doc.expect.case_tag) out += " case=" + *doc.expect.case_tag;
    if (doc.expect.subcase) out += " subcase=" + *doc.expect.subcase;
    if (doc.expect.p) out += " p=" + std::to_string(*doc.expect.p);
    if (doc.expect.q) out += " q=" + std::to_string(*doc.expect.q);
    if (doc.expect.r) out += " r=" + std::to_string(*doc.expect.r);
    if (doc.expect.r_unknown) out += " r=unknown";
    if (doc.expect.threshold) out += " threshold=" + to_string(*doc.expect.threshold);
    if (doc.expect.threshold_unknown) out += " threshold=unknown";
    out += "\n";
  }
  out += "X1 = " + detail::field_to_expr(doc.spec.X1) + "\n";
  out += "X2 = " + detail::field_to_expr(doc.spec.X2) + "\n";
  out += "X3 = " + detail::field_to_expr(doc.spec.X3) + "\n";
  return out;
}

}  // namespace sostrat
