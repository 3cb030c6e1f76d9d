#pragma once

// Domain-checked scalar kernels shared by the tree evaluator, the compiled
// evaluator and the jet evaluators. Every evaluation path funnels through
// these so results agree bit-for-bit across paths.

#include <cmath>
#include <string>

#include "cisjac/errors.hpp"
#include "cisjac/expr.hpp"

namespace cisjac::detail {

[[noreturn]] void throw_domain(const char* what, const Expr& at);

inline bool is_integer_value(double x) { return std::nearbyint(x) == x && std::isfinite(x); }

// Primal-value extractors; jet types overload via value_of(JetN).
inline double value_of(double x) { return x; }

template <class T>
void check_unary_domain(UnaryOp op, const T& a, const Expr& at) {
  const double av = value_of(a);
  switch (op) {
    case UnaryOp::log:
      if (av <= 0) throw_domain("log of a non-positive value", at);
      break;
    case UnaryOp::sqrt:
      if (av < 0) throw_domain("sqrt of a negative value", at);
      break;
    default:
      break;
  }
}

template <class T>
void check_binary_domain(BinaryOp op, const T& a, const T& b, const Expr& at) {
  const double av = value_of(a);
  const double bv = value_of(b);
  switch (op) {
    case BinaryOp::div:
      if (bv == 0) throw_domain("division by zero", at);
      break;
    case BinaryOp::pow:
      if (av < 0 && !is_integer_value(bv)) throw_domain("fractional power of a negative base", at);
      if (av == 0 && bv < 0) throw_domain("negative power of zero", at);
      break;
    default:
      break;
  }
}

// Unchecked kernels; callers run the domain checks first.
template <class T>
T apply_unary(UnaryOp op, const T& a) {
  using std::cos;
  using std::cosh;
  using std::exp;
  using std::log;
  using std::sin;
  using std::sinh;
  using std::sqrt;
  using std::tan;
  switch (op) {
    case UnaryOp::neg: return -a;
    case UnaryOp::sin: return sin(a);
    case UnaryOp::cos: return cos(a);
    case UnaryOp::tan: return tan(a);
    case UnaryOp::exp: return exp(a);
    case UnaryOp::log: return log(a);
    case UnaryOp::sqrt: return sqrt(a);
    case UnaryOp::sinh: return sinh(a);
    case UnaryOp::cosh: return cosh(a);
  }
  throw std::logic_error("unknown unary op");
}

template <class T>
T apply_binary(BinaryOp op, const T& a, const T& b) {
  using std::pow;
  switch (op) {
    case BinaryOp::add: return a + b;
    case BinaryOp::sub: return a - b;
    case BinaryOp::mul: return a * b;
    case BinaryOp::div: return a / b;
    case BinaryOp::pow: return pow(a, b);
  }
  throw std::logic_error("unknown binary op");
}

// Generic recursive evaluator. CoordFn: T(CoordKind, uint32 index1);
// ParamFn: T(const std::string&).
template <class T, class CoordFn, class ParamFn>
T eval_tree(const Expr& e, const CoordFn& coord, const ParamFn& param) {
  switch (e.tag()) {
    case Expr::Tag::constant:
      return T(e.value());
    case Expr::Tag::coordinate:
      return coord(e.coord().kind, e.coord().index);
    case Expr::Tag::parameter:
      return param(e.name());
    case Expr::Tag::unary: {
      T a = eval_tree<T>(e.lhs(), coord, param);
      check_unary_domain(e.unary_op(), a, e);
      return apply_unary(e.unary_op(), a);
    }
    case Expr::Tag::binary: {
      T a = eval_tree<T>(e.lhs(), coord, param);
      T b = eval_tree<T>(e.rhs(), coord, param);
      check_binary_domain(e.binary_op(), a, b, e);
      return apply_binary(e.binary_op(), a, b);
    }
  }
  throw std::logic_error("unknown expression tag");
}

}  // namespace cisjac::detail
