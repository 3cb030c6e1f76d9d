#include "cisjac/canonical.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace cisjac {

namespace {

std::size_t infer_dof(const Expr& f, const Expr& g) {
  const auto all = {CoordKind::q, CoordKind::p, CoordKind::dq, CoordKind::dp};
  return std::max<std::size_t>(std::max(f.max_index(all), g.max_index(all)), 1);
}

Expr d(const Expr& e, CoordKind kind, std::uint32_t i) { return diff(e, kind, i); }

}  // namespace

std::vector<std::vector<double>> symplectic_matrix(std::size_t m) {
  std::vector<std::vector<double>> S(2 * m, std::vector<double>(2 * m, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    S[i][m + i] = -1.0;  // q row, p column
    S[m + i][i] = 1.0;   // p row, q column
  }
  return S;
}

std::vector<std::vector<double>> tangent_symplectic_matrix(std::size_t m) {
  std::vector<std::vector<double>> S(4 * m, std::vector<double>(4 * m, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t q = i, p = m + i, dq = 2 * m + i, dp = 3 * m + i;
    S[p][dq] = 1.0;
    S[dq][p] = -1.0;
    S[dp][q] = 1.0;
    S[q][dp] = -1.0;
  }
  return S;
}

Expr poisson(const Expr& f, const Expr& g) {
  const std::size_t m = infer_dof(f, g);
  Expr sum = Expr::constant(0.0);
  for (std::uint32_t i = 1; i <= m; ++i)
    sum = sum + (d(f, CoordKind::p, i) * d(g, CoordKind::q, i) -
                 d(f, CoordKind::q, i) * d(g, CoordKind::p, i));
  return simplify(sum);
}

std::vector<Expr> hamiltonian_vf(const Expr& H, std::size_t m) {
  std::vector<Expr> out;
  out.reserve(2 * m);
  for (std::uint32_t i = 1; i <= m; ++i) out.push_back(d(H, CoordKind::p, i));
  for (std::uint32_t i = 1; i <= m; ++i)
    out.push_back(simplify(-d(H, CoordKind::q, i)));
  return out;
}

Expr tangent_lift(const Expr& f, Chart chart) {
  const CoordKind base_q = chart == Chart::darboux ? CoordKind::q : CoordKind::z;
  const CoordKind base_p = chart == Chart::darboux ? CoordKind::p : CoordKind::I;
  const CoordKind fib_q = chart == Chart::darboux ? CoordKind::dq : CoordKind::dz;
  const CoordKind fib_p = chart == Chart::darboux ? CoordKind::dp : CoordKind::dI;
  const std::size_t m = std::max<std::size_t>(f.max_index({base_q, base_p}), 1);
  Expr sum = Expr::constant(0.0);
  for (std::uint32_t i = 1; i <= m; ++i)
    sum = sum + (Expr::coordinate(fib_q, i) * d(f, base_q, i) +
                 Expr::coordinate(fib_p, i) * d(f, base_p, i));
  return simplify(sum);
}

Expr tangent_poisson(const Expr& g, const Expr& gp) {
  const std::size_t m = infer_dof(g, gp);
  Expr sum = Expr::constant(0.0);
  for (std::uint32_t i = 1; i <= m; ++i) {
    sum = sum + (d(g, CoordKind::p, i) * d(gp, CoordKind::dq, i) -
                 d(g, CoordKind::dq, i) * d(gp, CoordKind::p, i));
    sum = sum + (d(g, CoordKind::dp, i) * d(gp, CoordKind::q, i) -
                 d(g, CoordKind::q, i) * d(gp, CoordKind::dp, i));
  }
  return simplify(sum);
}

std::vector<Expr> tangent_hamiltonian_vf(const Expr& g, std::size_t m) {
  std::vector<Expr> out;
  out.reserve(4 * m);
  for (std::uint32_t i = 1; i <= m; ++i) out.push_back(d(g, CoordKind::dp, i));
  for (std::uint32_t i = 1; i <= m; ++i)
    out.push_back(simplify(-d(g, CoordKind::dq, i)));
  for (std::uint32_t i = 1; i <= m; ++i) out.push_back(d(g, CoordKind::p, i));
  for (std::uint32_t i = 1; i <= m; ++i)
    out.push_back(simplify(-d(g, CoordKind::q, i)));
  return out;
}

LiftIdentityResiduals check_lift_identities(const Expr& f, const Expr& g,
                                            std::span<const TangentState> points,
                                            const ParamMap* params) {
  const Expr lf = tangent_lift(f);
  const Expr lg = tangent_lift(g);
  const Expr base = poisson(f, g);
  const Expr pullback = tangent_poisson(f, g);
  const Expr mixed_l = tangent_poisson(lf, g);
  const Expr mixed_r = tangent_poisson(f, lg);
  const Expr both = tangent_poisson(lf, lg);
  const Expr lifted_base = tangent_lift(base);

  LiftIdentityResiduals r;
  for (const TangentState& s : points) {
    const EvalEnv env = make_env(s, params);
    const double b = eval(base, env);
    r.pullback = std::max(r.pullback, std::abs(eval(pullback, env)));
    r.mixed = std::max(r.mixed, std::abs(eval(mixed_l, env) - b));
    r.mixed = std::max(r.mixed, std::abs(eval(mixed_r, env) - b));
    r.lift = std::max(r.lift, std::abs(eval(both, env) - eval(lifted_base, env)));
  }
  return r;
}

}  // namespace cisjac
