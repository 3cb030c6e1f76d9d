#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstring>
#include <vector>

#include "cisjac/errors.hpp"
#include "cisjac/expr.hpp"
#include "cisjac/jets.hpp"
#include "cisjac/rng.hpp"
#include "cisjac/state.hpp"
#include "testutil.hpp"

using namespace cisjac;
using test::random_expr;
using test::random_phase_state;

namespace {

bool bitwise_equal(double a, double b) {
  return std::memcmp(&a, &b, sizeof(double)) == 0;
}

std::vector<double> fd_gradient(const Expr& e, const PhaseState& x,
                                const ParamMap* params) {
  const std::size_t n = 2 * x.dof();
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> v(n, 0.0);
    v[i] = 1.0;
    g[i] = test::fd_directional(e, x, v, params);
  }
  return g;
}

}  // namespace

TEST_CASE("gradient of the angular momentum") {
  const Expr L = parse_expr("q1*p2 - q2*p1", 2);
  const PhaseState x({1.0, 2.0}, {3.0, 4.0});
  const std::vector<double> g = grad(L, x, nullptr);
  REQUIRE(g.size() == 4);
  CHECK(g[0] == 4.0);   // d/dq1 = p2
  CHECK(g[1] == -3.0);  // d/dq2 = -p1
  CHECK(g[2] == -2.0);  // d/dp1 = -q2
  CHECK(g[3] == 1.0);   // d/dp2 = q1
}

TEST_CASE("hessian-vector product of a cubic") {
  const Expr e = parse_expr("q1^2*p1", 1);
  const PhaseState x({2.0}, {3.0});
  const double v[] = {1.0, 1.0};
  const std::vector<double> hv = hess_vec(e, x, v, nullptr);
  REQUIRE(hv.size() == 2);
  CHECK(hv[0] == 10.0);  // 2*p1*vq + 2*q1*vp
  CHECK(hv[1] == 4.0);   // 2*q1*vq
}

TEST_CASE("jet arithmetic propagates the classic identities") {
  for (double x : {-1.7, -0.3, 0.4, 2.1}) {
    const Jet1 j{x, 1.0};
    const Jet1 s = sin(j), c = cos(j);
    const Jet1 one = s * s + c * c;
    CHECK(one.val == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(one.dot) < 1e-15);

    const Jet1 le = log(exp(j));
    CHECK(le.val == doctest::Approx(x).epsilon(1e-14));
    CHECK(le.dot == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("first-order jets agree with symbolic differentiation") {
  const ParamMap params{{"a", 1.3}, {"b", -0.7}};
  Rng rng(0x1e71u);
  std::size_t checked = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const Expr f = random_expr(rng, 2, params);
    std::vector<Expr> df;
    for (CoordKind k : {CoordKind::q, CoordKind::p})
      for (std::uint32_t i = 1; i <= 2; ++i) df.push_back(diff(f, k, i));
    for (int pt = 0; pt < 3; ++pt) {
      const PhaseState x = random_phase_state(rng, 2, -1.5, 1.5);
      try {
        const std::vector<double> g = grad(f, x, &params);
        const EvalEnv env = make_env(x, &params);
        bool usable = true;
        double sym[4];
        for (std::size_t i = 0; i < 4; ++i) {
          sym[i] = eval(df[i], env);
          if (!std::isfinite(sym[i]) || std::abs(sym[i]) > 1e8) usable = false;
        }
        if (!usable) continue;
        for (std::size_t i = 0; i < 4; ++i)
          CHECK(g[i] == doctest::Approx(sym[i]).epsilon(1e-11));
        ++checked;
      } catch (const EvalError&) {
        continue;
      }
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("gradients agree with central differences") {
  const ParamMap params{{"a", 1.3}, {"b", -0.7}};
  Rng rng(0x1e72u);
  std::size_t checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Expr f = random_expr(rng, 2, params);
    for (int pt = 0; pt < 2; ++pt) {
      const PhaseState x = random_phase_state(rng, 2, -1.5, 1.5);
      try {
        const std::vector<double> g = grad(f, x, &params);
        const std::vector<double> fd = fd_gradient(f, x, &params);
        bool usable = true;
        for (double v : g)
          if (!std::isfinite(v) || std::abs(v) > 1e6) usable = false;
        for (double v : fd)
          if (!std::isfinite(v)) usable = false;
        if (!usable) continue;
        for (std::size_t i = 0; i < 4; ++i)
          CHECK(std::abs(g[i] - fd[i]) <= 5e-5 * (1.0 + std::abs(g[i])));
        ++checked;
      } catch (const EvalError&) {
        continue;
      }
    }
  }
  CHECK(checked > 60);
}

TEST_CASE("hessian-vector products agree with differenced gradients") {
  const ParamMap params{{"a", 1.3}};
  Rng rng(0x1e73u);
  constexpr double h = 1e-5;
  std::size_t checked = 0;
  for (int trial = 0; trial < 80; ++trial) {
    const Expr f = random_expr(rng, 2, params);
    for (int pt = 0; pt < 2; ++pt) {
      const PhaseState x = random_phase_state(rng, 2, -1.2, 1.2);
      std::vector<double> v(4);
      for (double& vi : v) vi = rng.uniform(-1.0, 1.0);
      try {
        const std::vector<double> hv = hess_vec(f, x, v, &params);
        PhaseState xp = x, xm = x;
        for (std::size_t i = 0; i < 2; ++i) {
          xp.q[i] += h * v[i];
          xm.q[i] -= h * v[i];
          xp.p[i] += h * v[2 + i];
          xm.p[i] -= h * v[2 + i];
        }
        const std::vector<double> gp = grad(f, xp, &params);
        const std::vector<double> gm = grad(f, xm, &params);
        bool usable = true;
        for (std::size_t i = 0; i < 4; ++i) {
          if (!std::isfinite(hv[i]) || std::abs(hv[i]) > 1e6) usable = false;
          if (!std::isfinite(gp[i]) || !std::isfinite(gm[i])) usable = false;
        }
        if (!usable) continue;
        for (std::size_t i = 0; i < 4; ++i) {
          const double fd = (gp[i] - gm[i]) / (2.0 * h);
          CHECK(std::abs(hv[i] - fd) <= 2e-4 * (1.0 + std::abs(hv[i])));
        }
        ++checked;
      } catch (const EvalError&) {
        continue;
      }
    }
  }
  CHECK(checked > 50);
}

TEST_CASE("second-order jets are bitwise symmetric in the seed directions") {
  const ParamMap params{{"a", 1.3}, {"b", -0.7}};
  Rng rng(0x1e74u);
  std::size_t checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const Expr f = random_expr(rng, 2, params);
    for (int pt = 0; pt < 2; ++pt) {
      std::vector<Jet2> fwd(4), swp(4);
      for (std::size_t i = 0; i < 4; ++i) {
        const double v = rng.uniform(-1.5, 1.5);
        const double ea = rng.uniform(-1.0, 1.0);
        const double eb = rng.uniform(-1.0, 1.0);
        fwd[i] = Jet2{v, ea, eb, 0.0};
        swp[i] = Jet2{v, eb, ea, 0.0};
      }
      try {
        const Jet2 r1 = eval_jet2(f, fwd, 2, &params);
        const Jet2 r2 = eval_jet2(f, swp, 2, &params);
        CHECK(bitwise_equal(r1.val, r2.val));
        CHECK(bitwise_equal(r1.da, r2.db));
        CHECK(bitwise_equal(r1.db, r2.da));
        CHECK(bitwise_equal(r1.dab, r2.dab));
        ++checked;
      } catch (const EvalError&) {
        continue;
      }
    }
  }
  CHECK(checked > 200);
}

TEST_CASE("directional derivative matches the gradient pairing") {
  const Expr f = parse_expr("sin(q1*p2) + q2^3/(p1^2 + 1)", 2);
  Rng rng(0x1e75u);
  for (int pt = 0; pt < 20; ++pt) {
    const PhaseState x = random_phase_state(rng, 2, -1.5, 1.5);
    std::vector<double> v(4);
    for (double& vi : v) vi = rng.uniform(-1.0, 1.0);
    const std::vector<double> g = grad(f, x, nullptr);
    double dot = 0.0;
    for (std::size_t i = 0; i < 4; ++i) dot += g[i] * v[i];
    CHECK(directional(f, x, v, nullptr) == doctest::Approx(dot).epsilon(1e-12));
  }
}

TEST_CASE("jet evaluation reports domain and contract failures") {
  std::vector<Jet1> seeds{Jet1{-2.0, 1.0}, Jet1{0.0, 0.0}};
  CHECK_THROWS_AS(eval_jet1(parse_expr("log(q1)", 1), seeds, 1, nullptr), EvalError);
  CHECK_THROWS_AS(eval_jet1(parse_expr("p1/ (q1 + 2)", 1), seeds, 1, nullptr),
                  EvalError);
  CHECK_THROWS_AS(eval_jet1(parse_expr("z1", 1), seeds, 1, nullptr), EvalError);
  CHECK_THROWS_AS(eval_jet1(parse_expr("w1*q1", 1, ParamMap{{"w1", 1.0}}), seeds, 1,
                            nullptr),
                  EvalError);
}

TEST_CASE("derivatives of powers handle negative bases with integer exponents") {
  // pow with a constant integer exponent must differentiate where the base
  // is negative (the chain rule never calls a fractional power there).
  const Expr f = parse_expr("q1^3", 1);
  const PhaseState x({-1.5}, {0.0});
  const std::vector<double> g = grad(f, x, nullptr);
  CHECK(g[0] == doctest::Approx(3.0 * 1.5 * 1.5).epsilon(1e-14));

  const Expr h = parse_expr("q1^0.5", 1);
  const PhaseState bad({-1.0}, {0.0});
  CHECK_THROWS_AS(grad(h, bad, nullptr), EvalError);
}
