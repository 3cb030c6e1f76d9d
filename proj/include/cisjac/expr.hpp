#pragma once

#include <cstdint>
#include <initializer_list>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>

#include "cisjac/errors.hpp"

namespace cisjac {

using ParamMap = std::map<std::string, double>;

/// Coordinate families. q/p are the Darboux chart, dq/dp their tangent
/// (velocity) companions; z/I are angle/action coordinates with dz/dI
/// their tangent companions.
enum class CoordKind : std::uint8_t { q, p, dq, dp, z, I, dz, dI };

const char* coord_kind_name(CoordKind k) noexcept;
bool is_tangent_kind(CoordKind k) noexcept;

struct Coord {
  CoordKind kind;
  std::uint32_t index;  // 1-based
  friend bool operator==(const Coord&, const Coord&) = default;
};

enum class UnaryOp : std::uint8_t { neg, sin, cos, tan, exp, log, sqrt, sinh, cosh };
enum class BinaryOp : std::uint8_t { add, sub, mul, div, pow };

/// Immutable expression tree over coordinates, named parameters and real
/// constants. Handles are cheap shared pointers; every transformation
/// (diff, simplify, brackets, lifts) builds new trees and shares unchanged
/// subtrees. Power exponents are restricted to constant subtrees and are
/// folded to a single constant at construction time.
class Expr {
 public:
  enum class Tag : std::uint8_t { constant, coordinate, parameter, unary, binary };

  Expr();  // constant 0

  static Expr constant(double value);
  static Expr coordinate(CoordKind kind, std::uint32_t index);
  static Expr parameter(std::string name);
  static Expr unary(UnaryOp op, Expr a);
  static Expr binary(BinaryOp op, Expr a, Expr b);

  Tag tag() const noexcept;
  double value() const;             // constant only
  Coord coord() const;              // coordinate only
  const std::string& name() const;  // parameter only
  UnaryOp unary_op() const;
  BinaryOp binary_op() const;
  const Expr& lhs() const;  // unary operand, or binary left child
  const Expr& rhs() const;  // binary right child

  /// Structural equality. Constants compare by bit pattern.
  bool same(const Expr& other) const;
  friend bool operator==(const Expr& a, const Expr& b) { return a.same(b); }

  std::uint32_t max_index(std::initializer_list<CoordKind> kinds) const;
  bool references_kind(CoordKind k) const;
  bool references_coord(Coord c) const;
  bool is_constant_tree() const;  // no coordinates, no parameters

  struct Node;
  const Node* node() const noexcept { return n_.get(); }

 private:
  explicit Expr(std::shared_ptr<const Node> n);
  std::shared_ptr<const Node> n_;
};

struct Expr::Node {
  Tag tag;
  double value = 0;
  Coord coord{CoordKind::q, 0};
  std::string pname;
  UnaryOp uop{};
  BinaryOp bop{};
  // Children hold empty handles on leaf nodes (never exposed; the accessors
  // are only valid for unary/binary tags, where the builders fill them in).
  Expr a{std::shared_ptr<const Node>{}};
  Expr b{std::shared_ptr<const Node>{}};
};

Expr operator+(Expr a, Expr b);
Expr operator-(Expr a, Expr b);
Expr operator*(Expr a, Expr b);
Expr operator/(Expr a, Expr b);
Expr operator-(Expr a);
Expr pow(Expr base, double exponent);

/// Evaluation environment: one array per coordinate kind (0-based storage
/// for 1-based indices) plus parameter values. Referencing a coordinate or
/// parameter the environment does not bind is a contract violation and
/// throws std::logic_error; arithmetic domain failures throw EvalError.
struct EvalEnv {
  std::span<const double> q{}, p{}, dq{}, dp{}, z{}, I{}, dz{}, dI{};
  const ParamMap* params = nullptr;

  std::span<const double> of_kind(CoordKind k) const noexcept;
};

double eval(const Expr& e, const EvalEnv& env);

/// Partial derivative with respect to one coordinate; the result is
/// simplified. Parameters differentiate to zero.
Expr diff(const Expr& e, Coord s);
Expr diff(const Expr& e, CoordKind kind, std::uint32_t index);

/// Local algebraic cleanup: constant folding plus the identities
/// x+0, x-0, x-x, x*1, x*0, x/1, 0/x, x^0, x^1. No reassociation.
Expr simplify(const Expr& e);

/// Fully parenthesized canonical text; constants use shortest
/// round-trip decimals. parse_expr(to_string(e)) reconstructs e.
std::string to_string(const Expr& e);

/// Recursive-descent parser. Accepts +, -, *, /, ^ (right-associative,
/// constant exponents only), unary minus, the functions sin cos tan exp
/// log sqrt sinh cosh, parentheses, the constants pi and e, coordinates
/// q<i>, p<i>, dq<i>, dp<i>, z<i>, I<i>, dz<i>, dI<i> with 1 <= i <= m,
/// and the given parameter names.
Expr parse_expr(std::string_view text, std::size_t m, const ParamMap& params = {});

/// Shortest decimal that parses back to exactly the same double.
std::string format_double(double v);

}  // namespace cisjac
