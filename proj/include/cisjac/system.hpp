#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "cisjac/expr.hpp"

namespace cisjac {

enum class Chart : std::uint8_t { darboux, action_angle };

/// A Hamiltonian H with a full family of first integrals F_1..F_m on an
/// m-degree-of-freedom phase space. Darboux-chart systems are written in
/// (q, p); action-angle systems in (z, I) with H and F depending on the
/// actions only is the common case.
struct SystemDef {
  std::size_t m = 0;
  ParamMap params;
  Expr H;
  std::vector<Expr> F;
  bool separable = false;
  Chart chart = Chart::darboux;

  /// Throws std::invalid_argument when the definition is malformed:
  /// wrong integral count, coordinates outside the chart's kinds,
  /// indices above m.
  void validate() const;

  /// Stable content hash over dimension, chart, flag, expressions and
  /// parameters; used to key derived-field caches and tag trajectories.
  std::uint64_t fingerprint() const;
};

/// Line-oriented definition format:
///   dim <m>
///   param <name> <value>
///   separable <true|false>
///   H <expr>
///   F<k> <expr>
/// '#' starts a comment; blank lines are ignored; directives may appear
/// in any order. Exactly one H and exactly one F<k> for each k in 1..m.
SystemDef parse_system(std::string_view source);

}  // namespace cisjac
