#include <cctype>
#include <cstdlib>
#include <numbers>
#include <optional>
#include <string>

#include "cisjac/expr.hpp"

namespace cisjac {

namespace {

enum class TokKind { number, ident, plus, minus, star, slash, caret, lparen, rparen, end };

struct Token {
  TokKind kind;
  std::string text;
  double number = 0;
  std::size_t line = 1, column = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    skip_space();
    Token t;
    t.line = line_;
    t.column = col_;
    if (pos_ >= src_.size()) {
      t.kind = TokKind::end;
      return t;
    }
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return lex_number(t);
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return lex_ident(t);
    advance();
    t.text = std::string(1, c);
    switch (c) {
      case '+': t.kind = TokKind::plus; return t;
      case '-': t.kind = TokKind::minus; return t;
      case '*': t.kind = TokKind::star; return t;
      case '/': t.kind = TokKind::slash; return t;
      case '^': t.kind = TokKind::caret; return t;
      case '(': t.kind = TokKind::lparen; return t;
      case ')': t.kind = TokKind::rparen; return t;
      default:
        throw ParseError(t.line, t.column, "unexpected character", t.text);
    }
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) advance();
  }

  Token lex_number(Token& t) {
    const std::size_t start = pos_;
    bool seen_digit = false;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
      seen_digit = true;
      advance();
    }
    if (pos_ < src_.size() && src_[pos_] == '.') {
      advance();
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        seen_digit = true;
        advance();
      }
    }
    if (!seen_digit) throw ParseError(t.line, t.column, "malformed number", ".");
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
      if (look < src_.size() && std::isdigit(static_cast<unsigned char>(src_[look]))) {
        while (pos_ < look) advance();
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
      }
    }
    t.kind = TokKind::number;
    t.text = std::string(src_.substr(start, pos_ - start));
    t.number = std::strtod(t.text.c_str(), nullptr);
    return t;
  }

  Token lex_ident(Token& t) {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      advance();
    t.kind = TokKind::ident;
    t.text = std::string(src_.substr(start, pos_ - start));
    return t;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1, col_ = 1;
};

struct CoordMatch {
  CoordKind kind;
  std::uint32_t index;
};

// q3, dp2, I1, dI4, ... Names are case-sensitive; the index uses all
// remaining characters and must be a positive decimal.
std::optional<CoordMatch> match_coordinate(const std::string& s) {
  static constexpr struct {
    const char* prefix;
    CoordKind kind;
  } kinds[] = {
      {"dq", CoordKind::dq}, {"dp", CoordKind::dp}, {"dz", CoordKind::dz}, {"dI", CoordKind::dI},
      {"q", CoordKind::q},   {"p", CoordKind::p},   {"z", CoordKind::z},   {"I", CoordKind::I},
  };
  for (const auto& k : kinds) {
    const std::string_view prefix(k.prefix);
    if (s.size() <= prefix.size() || s.compare(0, prefix.size(), prefix) != 0) continue;
    std::uint64_t idx = 0;
    bool digits = true;
    for (std::size_t i = prefix.size(); i < s.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(s[i]))) {
        digits = false;
        break;
      }
      idx = idx * 10 + static_cast<std::uint64_t>(s[i] - '0');
      if (idx > 1000000) break;
    }
    if (digits) return CoordMatch{k.kind, static_cast<std::uint32_t>(idx)};
  }
  return std::nullopt;
}

std::optional<UnaryOp> match_function(const std::string& s) {
  if (s == "sin") return UnaryOp::sin;
  if (s == "cos") return UnaryOp::cos;
  if (s == "tan") return UnaryOp::tan;
  if (s == "exp") return UnaryOp::exp;
  if (s == "log") return UnaryOp::log;
  if (s == "sqrt") return UnaryOp::sqrt;
  if (s == "sinh") return UnaryOp::sinh;
  if (s == "cosh") return UnaryOp::cosh;
  return std::nullopt;
}

class Parser {
 public:
  Parser(std::string_view text, std::size_t m, const ParamMap& params)
      : lex_(text), m_(m), params_(params) {
    cur_ = lex_.next();
  }

  Expr parse() {
    Expr e = parse_sum();
    if (cur_.kind != TokKind::end)
      throw ParseError(cur_.line, cur_.column, "unexpected trailing input", cur_.text);
    return e;
  }

 private:
  void bump() { cur_ = lex_.next(); }

  bool accept(TokKind k) {
    if (cur_.kind != k) return false;
    bump();
    return true;
  }

  Expr parse_sum() {
    Expr e = parse_term();
    for (;;) {
      if (accept(TokKind::plus)) {
        e = e + parse_term();
      } else if (accept(TokKind::minus)) {
        e = e - parse_term();
      } else {
        return e;
      }
    }
  }

  Expr parse_term() {
    Expr e = parse_factor();
    for (;;) {
      if (accept(TokKind::star)) {
        e = e * parse_factor();
      } else if (accept(TokKind::slash)) {
        e = e / parse_factor();
      } else {
        return e;
      }
    }
  }

  // factor := '-' factor | power;  power := primary ('^' factor)?
  Expr parse_factor() {
    if (accept(TokKind::minus)) {
      Expr e = parse_factor();
      // Fold the sign into constant leaves so printed negative constants
      // parse back to the identical tree.
      if (e.tag() == Expr::Tag::constant) return Expr::constant(-e.value());
      return -std::move(e);
    }
    Expr base = parse_primary();
    if (cur_.kind == TokKind::caret) {
      const Token caret = cur_;
      bump();
      Expr expo = parse_factor();
      if (!expo.is_constant_tree())
        throw ParseError(caret.line, caret.column, "power exponent must be constant", "^");
      try {
        return Expr::binary(BinaryOp::pow, std::move(base), std::move(expo));
      } catch (const EvalError&) {
        throw ParseError(caret.line, caret.column, "power exponent does not evaluate", "^");
      }
    }
    return base;
  }

  Expr parse_primary() {
    if (cur_.kind == TokKind::number) {
      const double v = cur_.number;
      bump();
      return Expr::constant(v);
    }
    if (accept(TokKind::lparen)) {
      Expr e = parse_sum();
      if (!accept(TokKind::rparen))
        throw ParseError(cur_.line, cur_.column, "expected ')'", cur_.text);
      return e;
    }
    if (cur_.kind == TokKind::ident) {
      const Token tok = cur_;
      bump();
      if (const auto fn = match_function(tok.text)) {
        if (!accept(TokKind::lparen))
          throw ParseError(cur_.line, cur_.column, "expected '(' after function name", tok.text);
        Expr arg = parse_sum();
        if (!accept(TokKind::rparen))
          throw ParseError(cur_.line, cur_.column, "expected ')'", cur_.text);
        return Expr::unary(*fn, std::move(arg));
      }
      if (tok.text == "pi") return Expr::constant(std::numbers::pi);
      if (tok.text == "e") return Expr::constant(std::numbers::e);
      if (const auto c = match_coordinate(tok.text)) {
        if (c->index == 0)
          throw ParseError(tok.line, tok.column, "coordinate index must be >= 1", tok.text);
        if (c->index > m_)
          throw ParseError(tok.line, tok.column,
                           "coordinate index exceeds dimension m=" + std::to_string(m_), tok.text);
        return Expr::coordinate(c->kind, c->index);
      }
      if (params_.count(tok.text) != 0) return Expr::parameter(tok.text);
      throw ParseError(tok.line, tok.column, "unknown identifier", tok.text);
    }
    throw ParseError(cur_.line, cur_.column, "expected a value",
                     cur_.kind == TokKind::end ? "<end>" : cur_.text);
  }

  Lexer lex_;
  Token cur_;
  std::size_t m_;
  const ParamMap& params_;
};

}  // namespace

Expr parse_expr(std::string_view text, std::size_t m, const ParamMap& params) {
  return Parser(text, m, params).parse();
}

}  // namespace cisjac
