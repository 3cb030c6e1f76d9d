#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cisjac/expr.hpp"
#include "cisjac/system.hpp"

namespace cisjac {

// Assignment of coordinates to slots of a flat state vector.
// Darboux: q1..qm, p1..pm[, dq1..dqm, dp1..dpm]; action-angle: z, I[, dz, dI].
struct StateLayout {
  std::size_t m = 0;
  Chart chart = Chart::darboux;
  bool tangent = false;

  std::size_t dim() const { return tangent ? 4 * m : 2 * m; }

  // Slot of coordinate (kind, index1); throws ValidationError if the kind is
  // not part of this layout or the index is out of range.
  std::size_t slot(CoordKind kind, std::uint32_t index1) const;
};

// Expression flattened to a postfix program over a StateLayout.  Parameters
// are resolved to immediates at compile time.  Evaluation applies the same
// domain-checked kernels as tree evaluation, in the same operand order, so
// both paths produce bit-identical doubles.
class CompiledExpr {
 public:
  CompiledExpr() = default;
  CompiledExpr(const Expr& e, const StateLayout& layout, const ParamMap& params);

  double eval(std::span<const double> state, std::vector<double>& scratch) const;
  double eval(std::span<const double> state) const;

  std::size_t stack_depth() const { return max_depth_; }
  const StateLayout& layout() const { return layout_; }

 private:
  enum class Kind : std::uint8_t { constant, slot, unary, binary };
  struct Instr {
    Kind kind;
    UnaryOp uop;
    BinaryOp bop;
    std::uint32_t slot;
    double imm;
    Expr at;  // source subexpression, for domain-error messages
  };

  void compile(const Expr& e, const ParamMap& params, std::size_t depth);

  StateLayout layout_;
  std::vector<Instr> prog_;
  std::size_t max_depth_ = 0;
};

}  // namespace cisjac
