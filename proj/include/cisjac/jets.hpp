#pragma once

#include <span>
#include <vector>

#include "cisjac/expr.hpp"
#include "cisjac/state.hpp"

namespace cisjac {

// First-order truncated Taylor value: val + dot*eps with eps^2 = 0.
struct Jet1 {
  double val = 0.0;
  double dot = 0.0;

  Jet1() = default;
  Jet1(double v) : val(v) {}  // NOLINT(google-explicit-constructor)
  Jet1(double v, double d) : val(v), dot(d) {}
};

// Second-order bilinear jet: carries value, two directional derivatives and
// the mixed second derivative along (ea, eb) with ea^2 = eb^2 = 0.
// Invariant: evaluation order is symmetric in (da, db), so swapping the two
// seed directions yields bitwise-identical dab.
struct Jet2 {
  double val = 0.0;
  double da = 0.0;
  double db = 0.0;
  double dab = 0.0;

  Jet2() = default;
  Jet2(double v) : val(v) {}  // NOLINT(google-explicit-constructor)
  Jet2(double v, double a, double b, double ab) : val(v), da(a), db(b), dab(ab) {}
};

// Primal-value hooks for the shared domain-check kernels (found by ADL).
inline double value_of(const Jet1& j) { return j.val; }
inline double value_of(const Jet2& j) { return j.val; }

Jet1 operator-(const Jet1& f);
Jet1 operator+(const Jet1& f, const Jet1& g);
Jet1 operator-(const Jet1& f, const Jet1& g);
Jet1 operator*(const Jet1& f, const Jet1& g);
Jet1 operator/(const Jet1& f, const Jet1& g);

Jet2 operator-(const Jet2& f);
Jet2 operator+(const Jet2& f, const Jet2& g);
Jet2 operator-(const Jet2& f, const Jet2& g);
Jet2 operator*(const Jet2& f, const Jet2& g);
Jet2 operator/(const Jet2& f, const Jet2& g);

Jet1 sin(const Jet1& f);
Jet1 cos(const Jet1& f);
Jet1 tan(const Jet1& f);
Jet1 exp(const Jet1& f);
Jet1 log(const Jet1& f);
Jet1 sqrt(const Jet1& f);
Jet1 sinh(const Jet1& f);
Jet1 cosh(const Jet1& f);
Jet1 pow(const Jet1& f, const Jet1& g);

Jet2 sin(const Jet2& f);
Jet2 cos(const Jet2& f);
Jet2 tan(const Jet2& f);
Jet2 exp(const Jet2& f);
Jet2 log(const Jet2& f);
Jet2 sqrt(const Jet2& f);
Jet2 sinh(const Jet2& f);
Jet2 cosh(const Jet2& f);
Jet2 pow(const Jet2& f, const Jet2& g);

// Evaluate e with jet coordinates supplied per Darboux slot.  Coordinate
// (kind, i) reads seeds[slot] where slot = i-1 for q, m+i-1 for p.
Jet1 eval_jet1(const Expr& e, std::span<const Jet1> seeds, std::size_t m,
               const ParamMap* params);
Jet2 eval_jet2(const Expr& e, std::span<const Jet2> seeds, std::size_t m,
               const ParamMap* params);

// Full gradient of e at x, flat order (d/dq1..d/dqm, d/dp1..d/dpm).
std::vector<double> grad(const Expr& e, const PhaseState& x, const ParamMap* params);

// Hessian-vector product (D^2 e)(x) * v, with v in flat (q,p) order.
std::vector<double> hess_vec(const Expr& e, const PhaseState& x,
                             std::span<const double> v, const ParamMap* params);

// Directional derivative De(x)[v].
double directional(const Expr& e, const PhaseState& x, std::span<const double> v,
                   const ParamMap* params);

}  // namespace cisjac
