#include "cisjac/expr.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <utility>

#include "cisjac/detail/scalar_ops.hpp"

namespace cisjac {

namespace {

const char* unary_name(UnaryOp op) {
  switch (op) {
    case UnaryOp::neg: return "-";
    case UnaryOp::sin: return "sin";
    case UnaryOp::cos: return "cos";
    case UnaryOp::tan: return "tan";
    case UnaryOp::exp: return "exp";
    case UnaryOp::log: return "log";
    case UnaryOp::sqrt: return "sqrt";
    case UnaryOp::sinh: return "sinh";
    case UnaryOp::cosh: return "cosh";
  }
  return "?";
}

const char* binary_name(BinaryOp op) {
  switch (op) {
    case BinaryOp::add: return "+";
    case BinaryOp::sub: return "-";
    case BinaryOp::mul: return "*";
    case BinaryOp::div: return "/";
    case BinaryOp::pow: return "^";
  }
  return "?";
}

bool bit_equal(double a, double b) {
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

}  // namespace

ParseError::ParseError(std::size_t line, std::size_t column, std::string message, std::string token)
    : std::runtime_error("parse error at " + std::to_string(line) + ":" + std::to_string(column) +
                         ": " + message + (token.empty() ? "" : " (near '" + token + "')")),
      line_(line),
      column_(column),
      message_(std::move(message)),
      token_(std::move(token)) {}

namespace detail {
void throw_domain(const char* what, const Expr& at) {
  throw EvalError(std::string(what) + " in " + to_string(at));
}
}  // namespace detail

const char* coord_kind_name(CoordKind k) noexcept {
  switch (k) {
    case CoordKind::q: return "q";
    case CoordKind::p: return "p";
    case CoordKind::dq: return "dq";
    case CoordKind::dp: return "dp";
    case CoordKind::z: return "z";
    case CoordKind::I: return "I";
    case CoordKind::dz: return "dz";
    case CoordKind::dI: return "dI";
  }
  return "?";
}

bool is_tangent_kind(CoordKind k) noexcept {
  return k == CoordKind::dq || k == CoordKind::dp || k == CoordKind::dz || k == CoordKind::dI;
}

Expr::Expr() : Expr(constant(0.0)) {}

Expr::Expr(std::shared_ptr<const Node> n) : n_(std::move(n)) {}

Expr Expr::constant(double value) {
  auto n = std::make_shared<Node>();
  n->tag = Tag::constant;
  n->value = value;
  return Expr(std::move(n));
}

Expr Expr::coordinate(CoordKind kind, std::uint32_t index) {
  if (index == 0) throw std::invalid_argument("coordinate index must be >= 1");
  auto n = std::make_shared<Node>();
  n->tag = Tag::coordinate;
  n->coord = Coord{kind, index};
  return Expr(std::move(n));
}

Expr Expr::parameter(std::string name) {
  if (name.empty()) throw std::invalid_argument("parameter name must be non-empty");
  auto n = std::make_shared<Node>();
  n->tag = Tag::parameter;
  n->pname = std::move(name);
  return Expr(std::move(n));
}

Expr Expr::unary(UnaryOp op, Expr a) {
  // Fold negation of a literal so "-1" and Constant(-1) are the same tree.
  if (op == UnaryOp::neg && a.tag() == Tag::constant) return constant(-a.value());
  auto n = std::make_shared<Node>();
  n->tag = Tag::unary;
  n->uop = op;
  n->a = std::move(a);
  return Expr(std::move(n));
}

Expr Expr::binary(BinaryOp op, Expr a, Expr b) {
  if (op == BinaryOp::pow) {
    if (!b.is_constant_tree())
      throw std::invalid_argument("power exponent must be a constant expression");
    if (b.tag() != Tag::constant) {
      // Collapse composite constant exponents such as (2+1).
      EvalEnv empty;
      b = constant(eval(b, empty));
    }
  }
  auto n = std::make_shared<Node>();
  n->tag = Tag::binary;
  n->bop = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return Expr(std::move(n));
}

Expr::Tag Expr::tag() const noexcept { return n_->tag; }

double Expr::value() const {
  if (tag() != Tag::constant) throw std::logic_error("value() on non-constant");
  return n_->value;
}

Coord Expr::coord() const {
  if (tag() != Tag::coordinate) throw std::logic_error("coord() on non-coordinate");
  return n_->coord;
}

const std::string& Expr::name() const {
  if (tag() != Tag::parameter) throw std::logic_error("name() on non-parameter");
  return n_->pname;
}

UnaryOp Expr::unary_op() const {
  if (tag() != Tag::unary) throw std::logic_error("unary_op() on non-unary");
  return n_->uop;
}

BinaryOp Expr::binary_op() const {
  if (tag() != Tag::binary) throw std::logic_error("binary_op() on non-binary");
  return n_->bop;
}

const Expr& Expr::lhs() const {
  if (tag() != Tag::unary && tag() != Tag::binary) throw std::logic_error("lhs() on leaf");
  return n_->a;
}

const Expr& Expr::rhs() const {
  if (tag() != Tag::binary) throw std::logic_error("rhs() on non-binary");
  return n_->b;
}

bool Expr::same(const Expr& other) const {
  if (n_ == other.n_) return true;
  if (tag() != other.tag()) return false;
  switch (tag()) {
    case Tag::constant: return bit_equal(n_->value, other.n_->value);
    case Tag::coordinate: return n_->coord == other.n_->coord;
    case Tag::parameter: return n_->pname == other.n_->pname;
    case Tag::unary: return n_->uop == other.n_->uop && n_->a.same(other.n_->a);
    case Tag::binary:
      return n_->bop == other.n_->bop && n_->a.same(other.n_->a) && n_->b.same(other.n_->b);
  }
  return false;
}

std::uint32_t Expr::max_index(std::initializer_list<CoordKind> kinds) const {
  switch (tag()) {
    case Tag::constant:
    case Tag::parameter:
      return 0;
    case Tag::coordinate: {
      for (CoordKind k : kinds)
        if (k == n_->coord.kind) return n_->coord.index;
      return 0;
    }
    case Tag::unary:
      return n_->a.max_index(kinds);
    case Tag::binary: {
      const std::uint32_t l = n_->a.max_index(kinds);
      const std::uint32_t r = n_->b.max_index(kinds);
      return l > r ? l : r;
    }
  }
  return 0;
}

bool Expr::references_kind(CoordKind k) const {
  switch (tag()) {
    case Tag::constant:
    case Tag::parameter:
      return false;
    case Tag::coordinate:
      return n_->coord.kind == k;
    case Tag::unary:
      return n_->a.references_kind(k);
    case Tag::binary:
      return n_->a.references_kind(k) || n_->b.references_kind(k);
  }
  return false;
}

bool Expr::references_coord(Coord c) const {
  switch (tag()) {
    case Tag::constant:
    case Tag::parameter:
      return false;
    case Tag::coordinate:
      return n_->coord == c;
    case Tag::unary:
      return n_->a.references_coord(c);
    case Tag::binary:
      return n_->a.references_coord(c) || n_->b.references_coord(c);
  }
  return false;
}

bool Expr::is_constant_tree() const {
  switch (tag()) {
    case Tag::constant:
      return true;
    case Tag::coordinate:
    case Tag::parameter:
      return false;
    case Tag::unary:
      return n_->a.is_constant_tree();
    case Tag::binary:
      return n_->a.is_constant_tree() && n_->b.is_constant_tree();
  }
  return false;
}

Expr operator+(Expr a, Expr b) { return Expr::binary(BinaryOp::add, std::move(a), std::move(b)); }
Expr operator-(Expr a, Expr b) { return Expr::binary(BinaryOp::sub, std::move(a), std::move(b)); }
Expr operator*(Expr a, Expr b) { return Expr::binary(BinaryOp::mul, std::move(a), std::move(b)); }
Expr operator/(Expr a, Expr b) { return Expr::binary(BinaryOp::div, std::move(a), std::move(b)); }
Expr operator-(Expr a) { return Expr::unary(UnaryOp::neg, std::move(a)); }
Expr pow(Expr base, double exponent) {
  return Expr::binary(BinaryOp::pow, std::move(base), Expr::constant(exponent));
}

std::span<const double> EvalEnv::of_kind(CoordKind k) const noexcept {
  switch (k) {
    case CoordKind::q: return q;
    case CoordKind::p: return p;
    case CoordKind::dq: return dq;
    case CoordKind::dp: return dp;
    case CoordKind::z: return z;
    case CoordKind::I: return I;
    case CoordKind::dz: return dz;
    case CoordKind::dI: return dI;
  }
  return {};
}

double eval(const Expr& e, const EvalEnv& env) {
  const auto coord = [&env](CoordKind k, std::uint32_t index) -> double {
    const auto values = env.of_kind(k);
    if (index > values.size())
      throw std::logic_error(std::string("unbound coordinate ") + coord_kind_name(k) +
                             std::to_string(index));
    return values[index - 1];
  };
  const auto param = [&env](const std::string& name) -> double {
    if (env.params != nullptr) {
      const auto it = env.params->find(name);
      if (it != env.params->end()) return it->second;
    }
    throw std::logic_error("unbound parameter " + name);
  };
  return detail::eval_tree<double>(e, coord, param);
}

namespace {

Expr diff_rec(const Expr& e, Coord s) {
  switch (e.tag()) {
    case Expr::Tag::constant:
    case Expr::Tag::parameter:
      return Expr::constant(0.0);
    case Expr::Tag::coordinate:
      return Expr::constant(e.coord() == s ? 1.0 : 0.0);
    case Expr::Tag::unary: {
      const Expr& f = e.lhs();
      Expr df = diff_rec(f, s);
      switch (e.unary_op()) {
        case UnaryOp::neg: return -df;
        case UnaryOp::sin: return Expr::unary(UnaryOp::cos, f) * df;
        case UnaryOp::cos: return -(Expr::unary(UnaryOp::sin, f) * df);
        case UnaryOp::tan: return df / pow(Expr::unary(UnaryOp::cos, f), 2.0);
        case UnaryOp::exp: return Expr::unary(UnaryOp::exp, f) * df;
        case UnaryOp::log: return df / f;
        case UnaryOp::sqrt: return df / (Expr::constant(2.0) * Expr::unary(UnaryOp::sqrt, f));
        case UnaryOp::sinh: return Expr::unary(UnaryOp::cosh, f) * df;
        case UnaryOp::cosh: return Expr::unary(UnaryOp::sinh, f) * df;
      }
      throw std::logic_error("unknown unary op");
    }
    case Expr::Tag::binary: {
      const Expr& f = e.lhs();
      const Expr& g = e.rhs();
      switch (e.binary_op()) {
        case BinaryOp::add: return diff_rec(f, s) + diff_rec(g, s);
        case BinaryOp::sub: return diff_rec(f, s) - diff_rec(g, s);
        case BinaryOp::mul: return diff_rec(f, s) * g + f * diff_rec(g, s);
        case BinaryOp::div:
          return (diff_rec(f, s) * g - f * diff_rec(g, s)) / pow(g, 2.0);
        case BinaryOp::pow: {
          const double c = g.value();
          return Expr::constant(c) * pow(f, c - 1.0) * diff_rec(f, s);
        }
      }
      throw std::logic_error("unknown binary op");
    }
  }
  throw std::logic_error("unknown expression tag");
}

bool is_const_value(const Expr& e, double v) {
  return e.tag() == Expr::Tag::constant && e.value() == v;
}

Expr simplify_rec(const Expr& e) {
  switch (e.tag()) {
    case Expr::Tag::constant:
    case Expr::Tag::coordinate:
    case Expr::Tag::parameter:
      return e;
    case Expr::Tag::unary: {
      Expr a = simplify_rec(e.lhs());
      if (e.unary_op() == UnaryOp::neg && a.tag() == Expr::Tag::unary &&
          a.unary_op() == UnaryOp::neg)
        return a.lhs();
      if (a.tag() == Expr::Tag::constant) {
        try {
          EvalEnv empty;
          const double v = eval(Expr::unary(e.unary_op(), a), empty);
          if (std::isfinite(v)) return Expr::constant(v);
        } catch (const EvalError&) {
          // Keep the node; evaluation reports the domain error instead.
        }
      }
      return Expr::unary(e.unary_op(), std::move(a));
    }
    case Expr::Tag::binary: {
      Expr a = simplify_rec(e.lhs());
      Expr b = simplify_rec(e.rhs());
      const BinaryOp op = e.binary_op();
      if (a.tag() == Expr::Tag::constant && b.tag() == Expr::Tag::constant) {
        try {
          EvalEnv empty;
          const double v = eval(Expr::binary(op, a, b), empty);
          if (std::isfinite(v)) return Expr::constant(v);
        } catch (const EvalError&) {
        }
      }
      switch (op) {
        case BinaryOp::add:
          if (is_const_value(a, 0.0)) return b;
          if (is_const_value(b, 0.0)) return a;
          break;
        case BinaryOp::sub:
          if (is_const_value(b, 0.0)) return a;
          if (a.same(b)) return Expr::constant(0.0);
          break;
        case BinaryOp::mul:
          if (is_const_value(a, 0.0) || is_const_value(b, 0.0)) return Expr::constant(0.0);
          if (is_const_value(a, 1.0)) return b;
          if (is_const_value(b, 1.0)) return a;
          break;
        case BinaryOp::div:
          if (is_const_value(a, 0.0)) return Expr::constant(0.0);
          if (is_const_value(b, 1.0)) return a;
          break;
        case BinaryOp::pow:
          if (is_const_value(b, 1.0)) return a;
          if (is_const_value(b, 0.0)) return Expr::constant(1.0);
          break;
      }
      return Expr::binary(op, std::move(a), std::move(b));
    }
  }
  throw std::logic_error("unknown expression tag");
}

}  // namespace

Expr diff(const Expr& e, Coord s) { return simplify(diff_rec(e, s)); }

Expr diff(const Expr& e, CoordKind kind, std::uint32_t index) {
  return diff(e, Coord{kind, index});
}

Expr simplify(const Expr& e) { return simplify_rec(e); }

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

void print_rec(const Expr& e, std::string& out) {
  switch (e.tag()) {
    case Expr::Tag::constant: {
      const std::string s = format_double(e.value());
      // A bare leading '-' would bind looser than '^' on reparse; keep
      // negative leaves parenthesized so printing stays value-faithful.
      if (!s.empty() && s[0] == '-') {
        out += '(';
        out += s;
        out += ')';
      } else {
        out += s;
      }
      return;
    }
    case Expr::Tag::coordinate:
      out += coord_kind_name(e.coord().kind);
      out += std::to_string(e.coord().index);
      return;
    case Expr::Tag::parameter:
      out += e.name();
      return;
    case Expr::Tag::unary:
      if (e.unary_op() == UnaryOp::neg) {
        out += "(-";
        print_rec(e.lhs(), out);
        out += ")";
      } else {
        out += unary_name(e.unary_op());
        out += "(";
        print_rec(e.lhs(), out);
        out += ")";
      }
      return;
    case Expr::Tag::binary:
      out += "(";
      print_rec(e.lhs(), out);
      out += " ";
      out += binary_name(e.binary_op());
      out += " ";
      print_rec(e.rhs(), out);
      out += ")";
      return;
  }
}

}  // namespace

std::string to_string(const Expr& e) {
  std::string out;
  print_rec(e, out);
  return out;
}

}  // namespace cisjac
