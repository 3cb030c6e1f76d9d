#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "cisjac/builtins.hpp"
#include "cisjac/canonical.hpp"
#include "cisjac/errors.hpp"
#include "cisjac/expr.hpp"
#include "cisjac/jets.hpp"
#include "cisjac/rng.hpp"
#include "cisjac/state.hpp"
#include "testutil.hpp"

using namespace cisjac;
using test::random_expr;
using test::random_phase_state;
using test::random_tangent_state;

namespace {

const Expr kQ1 = Expr::coordinate(CoordKind::q, 1);
const Expr kP1 = Expr::coordinate(CoordKind::p, 1);

double eval_tangent(const Expr& e, const TangentState& s, const ParamMap* params) {
  return eval(e, make_env(s, params));
}

}  // namespace

TEST_CASE("canonical pairs bracket to minus one") {
  CHECK(poisson(kQ1, kP1).same(Expr::constant(-1.0)));
  CHECK(poisson(kP1, kQ1).same(Expr::constant(1.0)));
  CHECK(poisson(kQ1, Expr::coordinate(CoordKind::q, 2)).same(Expr::constant(0.0)));
  CHECK(poisson(kQ1, Expr::coordinate(CoordKind::p, 2)).same(Expr::constant(0.0)));
}

TEST_CASE("time evolution follows d/dt f = {H, f}") {
  // For the harmonic oscillator: {H, q1} must equal dq1/dt = p1 and
  // {H, p1} must equal dp1/dt = -q1.
  const Expr H = parse_expr("(p1^2 + q1^2)/2", 1);
  const Expr qdot = poisson(H, kQ1);
  const Expr pdot = poisson(H, kP1);
  Rng rng(0xca1u);
  for (int pt = 0; pt < 10; ++pt) {
    const PhaseState x = random_phase_state(rng, 1);
    const EvalEnv env = make_env(x);
    CHECK(eval(qdot, env) == x.p[0]);
    CHECK(eval(pdot, env) == -x.q[0]);
  }
}

TEST_CASE("hamiltonian vector field matches the bracket convention") {
  const Expr H = parse_expr("(p1^2 + q1^2)/2", 1);
  const std::vector<Expr> vf = hamiltonian_vf(H, 1);
  REQUIRE(vf.size() == 2);
  Rng rng(0xca2u);
  for (int pt = 0; pt < 10; ++pt) {
    const PhaseState x = random_phase_state(rng, 1);
    const EvalEnv env = make_env(x);
    CHECK(eval(vf[0], env) == x.p[0]);
    CHECK(eval(vf[1], env) == -x.q[0]);
  }
}

TEST_CASE("vector fields equal the symplectic pairing with the gradient") {
  const ParamMap params{{"a", 1.3}};
  Rng rng(0xca3u);
  std::size_t checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const Expr H = random_expr(rng, 2, params);
    const std::vector<Expr> vf = hamiltonian_vf(H, 2);
    const auto S = symplectic_matrix(2);
    for (int pt = 0; pt < 2; ++pt) {
      const PhaseState x = random_phase_state(rng, 2, -1.5, 1.5);
      try {
        const std::vector<double> g = grad(H, x, &params);
        const EvalEnv env = make_env(x, &params);
        bool usable = true;
        std::vector<double> v(4);
        for (std::size_t i = 0; i < 4; ++i) {
          v[i] = eval(vf[i], env);
          if (!std::isfinite(v[i]) || std::abs(v[i]) > 1e8) usable = false;
        }
        if (!usable) continue;
        // vf_i = {H, x_i} = grad(H)^T S grad(x_i), i.e. vf = S^T grad(H).
        for (std::size_t i = 0; i < 4; ++i) {
          double si = 0.0;
          for (std::size_t j = 0; j < 4; ++j) si += S[j][i] * g[j];
          CHECK(v[i] == doctest::Approx(si).epsilon(1e-11));
        }
        ++checked;
      } catch (const EvalError&) {
        continue;
      }
    }
  }
  CHECK(checked > 60);
}

TEST_CASE("the bracket satisfies the Jacobi identity") {
  const Expr f = parse_expr("q1^2*p2", 2);
  const Expr g = parse_expr("p1*q2 + p2^2/2", 2);
  const Expr h = parse_expr("sin(q1)*p1 + q2*p2", 2);
  const Expr cyc = poisson(f, poisson(g, h)) + poisson(g, poisson(h, f)) +
                   poisson(h, poisson(f, g));
  Rng rng(0xca4u);
  for (int pt = 0; pt < 20; ++pt) {
    const PhaseState x = random_phase_state(rng, 2);
    CHECK(std::abs(eval(cyc, make_env(x))) < 1e-12);
  }
}

TEST_CASE("tangent bracket pins the lifted canonical pairs") {
  const Expr dq1 = Expr::coordinate(CoordKind::dq, 1);
  const Expr dp1 = Expr::coordinate(CoordKind::dp, 1);
  CHECK(tangent_poisson(dq1, kP1).same(Expr::constant(-1.0)));
  CHECK(tangent_poisson(kP1, dq1).same(Expr::constant(1.0)));
  CHECK(tangent_poisson(dp1, kQ1).same(Expr::constant(1.0)));
  CHECK(tangent_poisson(kQ1, dp1).same(Expr::constant(-1.0)));
  // Base coordinates are mutually in involution on the tangent bundle.
  CHECK(tangent_poisson(kQ1, kP1).same(Expr::constant(0.0)));
  CHECK(tangent_poisson(dq1, dp1).same(Expr::constant(0.0)));
}

TEST_CASE("the lift is the fiber-linear derivative") {
  const Expr H = parse_expr("(p1^2 + q1^2)/2", 1);
  const Expr lifted = tangent_lift(H);
  TangentState s(PhaseState({1.0}, {2.0}), {3.0}, {4.0});
  CHECK(eval_tangent(lifted, s, nullptr) == 11.0);  // dq*q + dp*p

  // Action-angle charts lift with their own coordinate kinds.
  const Expr I1 = Expr::coordinate(CoordKind::I, 1);
  CHECK(tangent_lift(I1, Chart::action_angle).same(Expr::coordinate(CoordKind::dI, 1)));
}

TEST_CASE("lift identities hold for the bundled Hamiltonians") {
  Rng rng(0xca5u);
  const BuiltinSystem osc = oscillator(2, {1.0, 1.618});
  const BuiltinSystem kep = kepler(1.0);

  std::vector<TangentState> osc_pts, kep_pts;
  while (kep_pts.size() < 24) {
    const TangentState s = random_tangent_state(rng, 2, -1.5, 1.5);
    if (osc_pts.size() < 24) osc_pts.push_back(s);
    const double r = std::hypot(s.x.q[0], s.x.q[1]);
    if (r >= 0.7) kep_pts.push_back(s);
  }

  const LiftIdentityResiduals ro = check_lift_identities(
      osc.def.H, osc.def.F[0], osc_pts, &osc.def.params);
  CHECK(ro.pullback == 0.0);
  CHECK(ro.mixed < 1e-13);
  CHECK(ro.lift < 1e-13);

  const LiftIdentityResiduals rk = check_lift_identities(
      kep.def.H, kep.def.F[1], kep_pts, &kep.def.params);
  CHECK(rk.pullback == 0.0);
  CHECK(rk.mixed < 1e-12);
  CHECK(rk.lift < 1e-12);
}

TEST_CASE("lift identities hold for random observables") {
  const ParamMap params{{"a", 1.3}};
  Rng rng(0xca6u);
  std::size_t checked = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const Expr f = random_expr(rng, 2, params);
    const Expr g = random_expr(rng, 2, params);
    const Expr base = poisson(f, g);
    const Expr pullback = tangent_poisson(f, g);
    const Expr mixed = tangent_poisson(tangent_lift(f), g);
    const Expr both = tangent_poisson(tangent_lift(f), tangent_lift(g));
    const Expr lifted_base = tangent_lift(base);
    for (int pt = 0; pt < 3; ++pt) {
      const TangentState s = random_tangent_state(rng, 2, -1.2, 1.2);
      try {
        const EvalEnv env = make_env(s, &params);
        const double b = eval(base, env);
        const double lb = eval(lifted_base, env);
        if (!std::isfinite(b) || !std::isfinite(lb)) continue;
        const double scale = 1.0 + std::abs(b) + std::abs(lb);
        if (scale > 1e8) continue;
        CHECK(std::abs(eval(pullback, env)) <= 1e-11 * scale);
        CHECK(std::abs(eval(mixed, env) - b) <= 1e-11 * scale);
        CHECK(std::abs(eval(both, env) - lb) <= 1e-11 * scale);
        ++checked;
      } catch (const EvalError&) {
        continue;
      }
    }
  }
  CHECK(checked > 60);
}

TEST_CASE("the base block of the tangent field is the base field verbatim") {
  // Structural equality makes the 4m-dimensional run reproduce the base run
  // bit for bit on the first 2m slots (for explicit integrators).
  for (const BuiltinSystem& sys :
       {oscillator(2, {1.0, 1.618}), kepler(1.0), quartic()}) {
    const std::size_t m = sys.def.m;
    const std::vector<Expr> base = hamiltonian_vf(sys.def.H, m);
    const std::vector<Expr> tangent =
        tangent_hamiltonian_vf(tangent_lift(sys.def.H), m);
    REQUIRE(tangent.size() == 4 * m);
    for (std::size_t i = 0; i < 2 * m; ++i) CHECK(tangent[i].same(base[i]));
  }
}

TEST_CASE("tangent field matches the tangent symplectic pairing") {
  // Cross-check the slot wiring of tangent_hamiltonian_vf against the matrix,
  // using symbolic derivatives for the gradient on the tangent bundle.
  const BuiltinSystem osc = oscillator(1, {1.3});
  const Expr g = tangent_lift(osc.def.H);
  const std::vector<Expr> vf = tangent_hamiltonian_vf(g, 1);
  const auto S = tangent_symplectic_matrix(1);

  std::vector<Expr> gradient;
  for (CoordKind k : {CoordKind::q, CoordKind::p, CoordKind::dq, CoordKind::dp})
    gradient.push_back(diff(g, k, 1));

  Rng rng(0xca7u);
  for (int pt = 0; pt < 10; ++pt) {
    const TangentState s = random_tangent_state(rng, 1);
    const EvalEnv env = make_env(s, &osc.def.params);
    for (std::size_t i = 0; i < 4; ++i) {
      double si = 0.0;
      for (std::size_t j = 0; j < 4; ++j)
        if (S[j][i] != 0.0) si += S[j][i] * eval(gradient[j], env);
      CHECK(eval(vf[i], env) == doctest::Approx(si).epsilon(1e-13));
    }
  }
}

TEST_CASE("lifted integrals of the oscillator stay in involution symbolically") {
  const BuiltinSystem osc = oscillator(2, {1.0, 1.618});
  const Expr lf1 = tangent_lift(osc.def.F[0]);
  const Expr lf2 = tangent_lift(osc.def.F[1]);
  Rng rng(0xca8u);
  for (int pt = 0; pt < 10; ++pt) {
    const TangentState s = random_tangent_state(rng, 2);
    const EvalEnv env = make_env(s, &osc.def.params);
    CHECK(std::abs(eval(tangent_poisson(lf1, lf2), env)) < 1e-13);
    CHECK(std::abs(eval(tangent_poisson(osc.def.F[0], lf2), env)) < 1e-13);
  }
}
