#include "cisjac/compiled.hpp"

#include <string>

#include "cisjac/detail/scalar_ops.hpp"
#include "cisjac/errors.hpp"

namespace cisjac {

namespace {

[[noreturn]] void bad_slot(CoordKind kind, std::uint32_t index1, const char* why) {
  throw ValidationError("coordinate " + std::string(coord_kind_name(kind)) +
                        std::to_string(index1) + " is not in this state layout (" +
                        why + ")");
}

}  // namespace

std::size_t StateLayout::slot(CoordKind kind, std::uint32_t index1) const {
  if (index1 == 0 || index1 > m) bad_slot(kind, index1, "index out of range");
  std::size_t block = 0;
  switch (kind) {
    case CoordKind::q:
    case CoordKind::z:
      block = 0;
      break;
    case CoordKind::p:
    case CoordKind::I:
      block = 1;
      break;
    case CoordKind::dq:
    case CoordKind::dz:
      block = 2;
      break;
    case CoordKind::dp:
    case CoordKind::dI:
      block = 3;
      break;
  }
  const bool darboux_kind = kind == CoordKind::q || kind == CoordKind::p ||
                            kind == CoordKind::dq || kind == CoordKind::dp;
  if (darboux_kind != (chart == Chart::darboux)) bad_slot(kind, index1, "wrong chart");
  if (block >= 2 && !tangent) bad_slot(kind, index1, "layout has no tangent block");
  return block * m + (index1 - 1);
}

CompiledExpr::CompiledExpr(const Expr& e, const StateLayout& layout,
                           const ParamMap& params)
    : layout_(layout) {
  compile(e, params, 0);
}

void CompiledExpr::compile(const Expr& e, const ParamMap& params, std::size_t depth) {
  // depth = stack entries already live when this subexpression starts.
  switch (e.tag()) {
    case Expr::Tag::constant:
      prog_.push_back({Kind::constant, UnaryOp::neg, BinaryOp::add, 0, e.value(), e});
      if (depth + 1 > max_depth_) max_depth_ = depth + 1;
      return;
    case Expr::Tag::coordinate: {
      const std::uint32_t s =
          static_cast<std::uint32_t>(layout_.slot(e.coord().kind, e.coord().index));
      prog_.push_back({Kind::slot, UnaryOp::neg, BinaryOp::add, s, 0.0, e});
      if (depth + 1 > max_depth_) max_depth_ = depth + 1;
      return;
    }
    case Expr::Tag::parameter: {
      auto it = params.find(e.name());
      if (it == params.end()) throw EvalError("unbound parameter '" + e.name() + "'");
      prog_.push_back({Kind::constant, UnaryOp::neg, BinaryOp::add, 0, it->second, e});
      if (depth + 1 > max_depth_) max_depth_ = depth + 1;
      return;
    }
    case Expr::Tag::unary:
      compile(e.lhs(), params, depth);
      prog_.push_back({Kind::unary, e.unary_op(), BinaryOp::add, 0, 0.0, e});
      return;
    case Expr::Tag::binary:
      compile(e.lhs(), params, depth);
      compile(e.rhs(), params, depth + 1);
      prog_.push_back({Kind::binary, UnaryOp::neg, e.binary_op(), 0, 0.0, e});
      return;
  }
  throw std::logic_error("unknown expression tag");
}

double CompiledExpr::eval(std::span<const double> state,
                          std::vector<double>& scratch) const {
  if (prog_.empty()) throw std::logic_error("evaluating an empty compiled expression");
  if (state.size() != layout_.dim())
    throw ValidationError("state size " + std::to_string(state.size()) +
                          " does not match layout dimension " +
                          std::to_string(layout_.dim()));
  if (scratch.size() < max_depth_) scratch.resize(max_depth_);
  std::size_t sp = 0;
  for (const Instr& ins : prog_) {
    switch (ins.kind) {
      case Kind::constant:
        scratch[sp++] = ins.imm;
        break;
      case Kind::slot:
        scratch[sp++] = state[ins.slot];
        break;
      case Kind::unary: {
        double& a = scratch[sp - 1];
        detail::check_unary_domain(ins.uop, a, ins.at);
        a = detail::apply_unary(ins.uop, a);
        break;
      }
      case Kind::binary: {
        const double b = scratch[--sp];
        double& a = scratch[sp - 1];
        detail::check_binary_domain(ins.bop, a, b, ins.at);
        a = detail::apply_binary(ins.bop, a, b);
        break;
      }
    }
  }
  return scratch[0];
}

double CompiledExpr::eval(std::span<const double> state) const {
  std::vector<double> scratch(max_depth_);
  return eval(state, scratch);
}

}  // namespace cisjac
