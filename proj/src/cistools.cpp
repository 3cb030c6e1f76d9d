#include "cisjac/cistools.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cisjac/canonical.hpp"
#include "cisjac/compiled.hpp"
#include "cisjac/errors.hpp"
#include "cisjac/jets.hpp"
#include "cisjac/rng.hpp"

namespace cisjac {

namespace {

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

IntegrabilityReport validate_cis(const SystemDef& sys, std::size_t n,
                                 std::uint64_t seed, SampleBox box,
                                 const ExclusionFn& exclude) {
  IntegrabilityReport rep;
  rep.samples_requested = n;
  rep.seed = seed;

  std::vector<Expr> brackets_h;
  for (const Expr& f : sys.F) brackets_h.push_back(poisson(sys.H, f));
  std::vector<Expr> brackets_ff;
  for (std::size_t j = 0; j < sys.F.size(); ++j)
    for (std::size_t k = j + 1; k < sys.F.size(); ++k)
      brackets_ff.push_back(poisson(sys.F[j], sys.F[k]));

  Rng rng(seed);
  for (std::size_t s = 0; s < n; ++s) {
    PhaseState x(sys.m);
    for (std::size_t i = 0; i < sys.m; ++i) {
      x.q[i] = rng.uniform(box.lo, box.hi);
      x.p[i] = rng.uniform(box.lo, box.hi);
    }
    if (exclude && exclude(x)) {
      ++rep.samples_skipped;
      continue;
    }
    try {
      const EvalEnv env = make_env(x, &sys.params);
      double hb = 0.0, ffb = 0.0;
      for (const Expr& e : brackets_h) hb = std::max(hb, std::abs(eval(e, env)));
      for (const Expr& e : brackets_ff) ffb = std::max(ffb, std::abs(eval(e, env)));
      const double indep = singular_ratio(integral_jacobian(sys, x));
      rep.max_h_bracket = std::max(rep.max_h_bracket, hb);
      rep.max_ff_bracket = std::max(rep.max_ff_bracket, ffb);
      rep.min_independence = std::min(rep.min_independence, indep);
      ++rep.samples_evaluated;
    } catch (const EvalError&) {
      ++rep.samples_skipped;
    }
  }
  if (rep.samples_evaluated == 0) rep.min_independence = 0.0;
  return rep;
}

IntegrabilityReport validate_lifted_cis(const SystemDef& sys, std::size_t n,
                                        std::uint64_t seed, SampleBox box,
                                        const ExclusionFn& exclude) {
  IntegrabilityReport rep;
  rep.samples_requested = n;
  rep.seed = seed;

  const Expr lifted_h = tangent_lift(sys.H);
  std::vector<Expr> integrals = sys.F;
  for (const Expr& f : sys.F) integrals.push_back(tangent_lift(f));

  std::vector<Expr> brackets_h;
  for (const Expr& g : integrals) brackets_h.push_back(tangent_poisson(lifted_h, g));
  std::vector<Expr> brackets_ff;
  for (std::size_t j = 0; j < integrals.size(); ++j)
    for (std::size_t k = j + 1; k < integrals.size(); ++k)
      brackets_ff.push_back(tangent_poisson(integrals[j], integrals[k]));

  // Rows of the 2m-by-4m Jacobian, as expressions.
  const CoordKind kinds[4] = {CoordKind::q, CoordKind::p, CoordKind::dq, CoordKind::dp};
  std::vector<std::vector<Expr>> jac_rows;
  for (const Expr& g : integrals) {
    std::vector<Expr> row;
    for (CoordKind kind : kinds)
      for (std::uint32_t i = 1; i <= sys.m; ++i) row.push_back(diff(g, kind, i));
    jac_rows.push_back(std::move(row));
  }

  Rng rng(seed);
  for (std::size_t s = 0; s < n; ++s) {
    TangentState ts(sys.m);
    for (std::size_t i = 0; i < sys.m; ++i) {
      ts.x.q[i] = rng.uniform(box.lo, box.hi);
      ts.x.p[i] = rng.uniform(box.lo, box.hi);
      ts.dq[i] = rng.uniform(box.lo, box.hi);
      ts.dp[i] = rng.uniform(box.lo, box.hi);
    }
    if (exclude && exclude(ts.x)) {
      ++rep.samples_skipped;
      continue;
    }
    try {
      const EvalEnv env = make_env(ts, &sys.params);
      double hb = 0.0, ffb = 0.0;
      for (const Expr& e : brackets_h) hb = std::max(hb, std::abs(eval(e, env)));
      for (const Expr& e : brackets_ff) ffb = std::max(ffb, std::abs(eval(e, env)));
      Mat J(integrals.size(), 4 * sys.m);
      for (std::size_t r = 0; r < jac_rows.size(); ++r)
        for (std::size_t c = 0; c < jac_rows[r].size(); ++c)
          J(r, c) = eval(jac_rows[r][c], env);
      rep.max_h_bracket = std::max(rep.max_h_bracket, hb);
      rep.max_ff_bracket = std::max(rep.max_ff_bracket, ffb);
      rep.min_independence = std::min(rep.min_independence, singular_ratio(J));
      ++rep.samples_evaluated;
    } catch (const EvalError&) {
      ++rep.samples_skipped;
    }
  }
  if (rep.samples_evaluated == 0) rep.min_independence = 0.0;
  return rep;
}

double DriftReport::max_integral_drift() const {
  return max_abs(integral_drift);
}

double DriftReport::max_lifted_drift() const {
  return max_abs(lifted_drift);
}

DriftReport drift(const SystemDef& sys, const Trajectory& traj) {
  const bool tangent = traj.dim == 4 * sys.m;
  if (!tangent && traj.dim != 2 * sys.m)
    throw ValidationError("trajectory dimension does not match the system");
  if (traj.states.empty()) throw ValidationError("trajectory has no recorded states");

  const StateLayout layout{sys.m, sys.chart, tangent};
  std::vector<CompiledExpr> fs;
  for (const Expr& f : sys.F) fs.emplace_back(f, layout, sys.params);
  std::vector<CompiledExpr> lifted;
  if (tangent)
    for (const Expr& f : sys.F)
      lifted.emplace_back(tangent_lift(f, sys.chart), layout, sys.params);

  DriftReport rep;
  rep.integral_drift.assign(sys.F.size(), 0.0);
  if (tangent) rep.lifted_drift.assign(sys.F.size(), 0.0);

  std::vector<double> scratch;
  std::vector<double> f0(sys.F.size()), l0(lifted.size());
  for (std::size_t k = 0; k < fs.size(); ++k) f0[k] = fs[k].eval(traj.states[0], scratch);
  for (std::size_t k = 0; k < lifted.size(); ++k)
    l0[k] = lifted[k].eval(traj.states[0], scratch);

  for (const std::vector<double>& y : traj.states) {
    for (std::size_t k = 0; k < fs.size(); ++k)
      rep.integral_drift[k] =
          std::max(rep.integral_drift[k], std::abs(fs[k].eval(y, scratch) - f0[k]));
    for (std::size_t k = 0; k < lifted.size(); ++k)
      rep.lifted_drift[k] =
          std::max(rep.lifted_drift[k], std::abs(lifted[k].eval(y, scratch) - l0[k]));
  }
  return rep;
}

Mat integral_jacobian(const SystemDef& sys, const PhaseState& x) {
  Mat J(sys.F.size(), 2 * sys.m);
  for (std::size_t k = 0; k < sys.F.size(); ++k) {
    const std::vector<double> g = grad(sys.F[k], x, &sys.params);
    for (std::size_t c = 0; c < 2 * sys.m; ++c) J(k, c) = g[c];
  }
  return J;
}

ReconstructionResult reconstruct_jacobi(const SystemDef& sys, const PhaseState& s0,
                                        const PhaseState& s0p, double rank_tol) {
  if (s0.dof() != sys.m || s0p.dof() != sys.m)
    throw ValidationError("states do not match the system dimension");

  ReconstructionResult out;
  const EvalEnv env0 = make_env(s0, &sys.params);
  const EvalEnv env0p = make_env(s0p, &sys.params);
  for (const Expr& f : sys.F) out.delta_f.push_back(eval(f, env0p) - eval(f, env0));

  const Mat A = integral_jacobian(sys, s0);
  out.singular_ratio = singular_ratio(A);
  if (!(out.singular_ratio > rank_tol))
    throw ValidationError(
        "integral map is rank-deficient at the base point (singular-value ratio " +
        format_double(out.singular_ratio) + " <= " + format_double(rank_tol) +
        "); offsets cannot be reconstructed there");

  out.v0 = min_norm_solve(A, out.delta_f);

  // Residual of the defining equations, measured through the lifted integrals.
  TangentState ts;
  ts.x = s0;
  ts.dq.assign(out.v0.begin(), out.v0.begin() + static_cast<long>(sys.m));
  ts.dp.assign(out.v0.begin() + static_cast<long>(sys.m), out.v0.end());
  const EvalEnv tenv = make_env(ts, &sys.params);
  for (std::size_t k = 0; k < sys.F.size(); ++k) {
    const double lhs = eval(tangent_lift(sys.F[k]), tenv);
    out.initial_residual =
        std::max(out.initial_residual, std::abs(lhs - out.delta_f[k]));
  }
  return out;
}

std::vector<double> reconstruct_action(const SystemDef& aa, std::span<const double> I0,
                                       std::span<const double> I0p) {
  if (aa.chart != Chart::action_angle)
    throw ValidationError("reconstruct_action needs an action-angle system");
  if (I0.size() != aa.m || I0p.size() != aa.m)
    throw ValidationError("action vectors do not match the system dimension");

  ActionAngleState s(aa.m), sp(aa.m);
  std::copy(I0.begin(), I0.end(), s.I.begin());
  std::copy(I0p.begin(), I0p.end(), sp.I.begin());
  const EvalEnv env = make_env(s, &aa.params);
  const EvalEnv envp = make_env(sp, &aa.params);

  std::vector<double> rhs(aa.m);
  Mat J(aa.m, aa.m);
  for (std::size_t k = 0; k < aa.m; ++k) {
    rhs[k] = eval(aa.F[k], envp) - eval(aa.F[k], env);
    for (std::uint32_t j = 1; j <= aa.m; ++j)
      J(k, j - 1) = eval(diff(aa.F[k], CoordKind::I, j), env);
  }
  return solve_square(J, rhs);
}

PersistenceSeries verify_persistence(const SystemDef& sys, const PhaseState& s0,
                                     const PhaseState& s0p, const IntegratorConfig& cfg,
                                     std::size_t record_every) {
  PersistenceSeries series;
  series.recon = reconstruct_jacobi(sys, s0, s0p);

  TangentState ts;
  ts.x = s0;
  ts.dq.assign(series.recon.v0.begin(), series.recon.v0.begin() + static_cast<long>(sys.m));
  ts.dp.assign(series.recon.v0.begin() + static_cast<long>(sys.m), series.recon.v0.end());

  series.tangent_traj = integrate_tangent(sys, ts, cfg, record_every);
  series.pair_traj = integrate_system(sys, s0p, cfg, record_every);
  const Trajectory& tangent_traj = series.tangent_traj;
  const Trajectory& pair_traj = series.pair_traj;
  if (!tangent_traj.ok())
    throw NumericError("tangent trajectory failed: " + tangent_traj.failure);
  if (!pair_traj.ok())
    throw NumericError("companion trajectory failed: " + pair_traj.failure);

  const StateLayout tl{sys.m, sys.chart, /*tangent=*/true};
  const StateLayout bl{sys.m, sys.chart, /*tangent=*/false};
  std::vector<CompiledExpr> lifted, base_t, base_b;
  for (const Expr& f : sys.F) {
    lifted.emplace_back(tangent_lift(f), tl, sys.params);
    base_t.emplace_back(f, tl, sys.params);
    base_b.emplace_back(f, bl, sys.params);
  }

  std::vector<double> scratch;
  series.times = tangent_traj.times;
  for (std::size_t t = 0; t < tangent_traj.states.size(); ++t) {
    const std::vector<double>& y = tangent_traj.states[t];
    const std::vector<double>& yp = pair_traj.states[t];
    std::vector<double> row(sys.F.size());
    for (std::size_t k = 0; k < sys.F.size(); ++k) {
      const double lhs = lifted[k].eval(y, scratch);
      const double rhs = base_b[k].eval(yp, scratch) - base_t[k].eval(y, scratch);
      row[k] = std::abs(lhs - rhs);
      series.max_residual = std::max(series.max_residual, row[k]);
    }
    series.residuals.push_back(std::move(row));
  }
  return series;
}

DivergenceSeries divergence_experiment(const SystemDef& sys, const PhaseState& s0,
                                       double eps, std::span<const double> direction,
                                       const IntegratorConfig& cfg,
                                       std::size_t record_every) {
  if (direction.size() != 2 * sys.m)
    throw ValidationError("direction must have 2m components");
  std::vector<double> flat = s0.flat();
  for (std::size_t i = 0; i < flat.size(); ++i) flat[i] += eps * direction[i];
  const PhaseState s0p = PhaseState::from_flat(flat);

  DivergenceSeries series;
  series.persistence = verify_persistence(sys, s0, s0p, cfg, record_every);

  // Separation between the true neighbor and the first-order shadow s(t)+v(t).
  const Trajectory& tt = series.persistence.tangent_traj;
  const Trajectory& bt = series.persistence.pair_traj;

  double denom = 0.0;
  for (std::size_t t = 0; t < tt.states.size(); ++t) {
    const std::vector<double>& y = tt.states[t];
    const std::vector<double>& yp = bt.states[t];
    double d2 = 0.0;
    for (std::size_t i = 0; i < 2 * sys.m; ++i) {
      const double shadow = y[i] + y[2 * sys.m + i];
      d2 += (yp[i] - shadow) * (yp[i] - shadow);
    }
    const double d = std::sqrt(d2);
    series.separation.push_back(d);
    if (tt.times[t] <= 1.0) denom = std::max(denom, d);
  }
  series.growth_factor =
      denom > 0.0 && !series.separation.empty() ? series.separation.back() / denom : 0.0;
  return series;
}

}  // namespace cisjac
