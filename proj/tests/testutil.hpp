#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cisjac/expr.hpp"
#include "cisjac/rng.hpp"
#include "cisjac/state.hpp"

namespace cisjac::test {

// Repo root, injected by the build so tests can read systems/*.cis.
inline std::string root_path() {
#ifdef CISJAC_ROOT
  return CISJAC_ROOT;
#else
  return ".";
#endif
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline PhaseState random_phase_state(Rng& rng, std::size_t m, double lo = -2.0,
                                     double hi = 2.0) {
  PhaseState s(m);
  for (std::size_t i = 0; i < m; ++i) s.q[i] = rng.uniform(lo, hi);
  for (std::size_t i = 0; i < m; ++i) s.p[i] = rng.uniform(lo, hi);
  return s;
}

inline TangentState random_tangent_state(Rng& rng, std::size_t m, double lo = -2.0,
                                         double hi = 2.0) {
  TangentState s(random_phase_state(rng, m, lo, hi), {}, {});
  s.dq.resize(m);
  s.dp.resize(m);
  for (std::size_t i = 0; i < m; ++i) s.dq[i] = rng.uniform(lo, hi);
  for (std::size_t i = 0; i < m; ++i) s.dp[i] = rng.uniform(lo, hi);
  return s;
}

// Central-difference directional derivative of e at x along v (flat q,p order).
inline double fd_directional(const Expr& e, const PhaseState& x,
                             std::span<const double> v, const ParamMap* params,
                             double h = 1e-5) {
  const std::size_t m = x.dof();
  PhaseState hi = x, lo = x;
  for (std::size_t i = 0; i < m; ++i) {
    hi.q[i] += h * v[i];
    lo.q[i] -= h * v[i];
    hi.p[i] += h * v[m + i];
    lo.p[i] -= h * v[m + i];
  }
  return (eval(e, make_env(hi, params)) - eval(e, make_env(lo, params))) / (2.0 * h);
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

// Random expression over q1..qm, p1..pm and the parameters in `params`.
// log/sqrt arguments are kept positive by construction; everything else may
// fail at evaluation time and callers are expected to skip such points.
inline Expr random_expr(Rng& rng, std::size_t m, const ParamMap& params,
                        int depth = 0) {
  const auto leaf = [&]() -> Expr {
    const double pick = rng.uniform();
    if (pick < 0.3) return Expr::constant(rng.uniform(-2.0, 2.0));
    if (pick < 0.4 && !params.empty()) {
      auto it = params.begin();
      std::advance(it, static_cast<long>(rng.bits() % params.size()));
      return Expr::parameter(it->first);
    }
    const auto idx = static_cast<std::uint32_t>(1 + rng.bits() % m);
    return rng.uniform() < 0.5 ? Expr::coordinate(CoordKind::q, idx)
                               : Expr::coordinate(CoordKind::p, idx);
  };
  if (depth >= 4 || rng.uniform() < 0.25) return leaf();

  const double pick = rng.uniform();
  Expr a = random_expr(rng, m, params, depth + 1);
  if (pick < 0.55) {
    Expr b = random_expr(rng, m, params, depth + 1);
    if (pick < 0.25) return a + b;
    if (pick < 0.40) return a - b;
    if (pick < 0.50) return a * b;
    return a / b;
  }
  if (pick < 0.65) {
    constexpr double exponents[] = {2.0, 3.0, 4.0, 0.5, -1.0};
    return pow(std::move(a), exponents[rng.bits() % 5]);
  }
  if (pick < 0.72) return -std::move(a);
  if (pick < 0.80) return Expr::unary(UnaryOp::sin, std::move(a));
  if (pick < 0.86) return Expr::unary(UnaryOp::cos, std::move(a));
  if (pick < 0.90) return Expr::unary(UnaryOp::exp, std::move(a));
  if (pick < 0.94) return Expr::unary(UnaryOp::sinh, std::move(a));
  // Shift a squared subtree away from zero to keep log/sqrt in-domain.
  Expr positive = pow(std::move(a), 2.0) + Expr::constant(0.5);
  return rng.uniform() < 0.5 ? Expr::unary(UnaryOp::log, std::move(positive))
                             : Expr::unary(UnaryOp::sqrt, std::move(positive));
}

}  // namespace cisjac::test
