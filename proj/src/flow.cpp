#include "cisjac/flow.hpp"

#include <algorithm>
#include <cmath>

#include "cisjac/canonical.hpp"
#include "cisjac/errors.hpp"
#include "cisjac/jets.hpp"
#include "cisjac/rng.hpp"

namespace cisjac {

const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::midpoint:
      return "midpoint";
    case Scheme::verlet:
      return "verlet";
    case Scheme::rk4:
      return "rk4";
  }
  return "?";
}

Scheme parse_scheme(std::string_view name) {
  if (name == "midpoint") return Scheme::midpoint;
  if (name == "verlet") return Scheme::verlet;
  if (name == "rk4") return Scheme::rk4;
  throw ValidationError("unknown integrator '" + std::string(name) +
                        "' (expected midpoint, verlet or rk4)");
}

void VectorField::eval(std::span<const double> state, std::span<double> out,
                       std::vector<double>& scratch) const {
  for (std::size_t i = 0; i < compiled.size(); ++i)
    out[i] = compiled[i].eval(state, scratch);
}

VectorField make_vector_field(std::vector<Expr> components, const StateLayout& layout,
                              const ParamMap& params) {
  if (components.size() != layout.dim())
    throw std::logic_error("vector field component count does not match layout");
  VectorField vf;
  vf.layout = layout;
  vf.compiled.reserve(components.size());
  for (const Expr& c : components) vf.compiled.emplace_back(c, layout, params);
  vf.symbolic = std::move(components);
  return vf;
}

VectorField base_vector_field(const SystemDef& sys) {
  if (sys.chart != Chart::darboux)
    throw ValidationError(
        "numeric integration needs a Darboux-chart system; action-angle systems flow "
        "in closed form (exact_flow_action_angle)");
  const StateLayout layout{sys.m, sys.chart, /*tangent=*/false};
  return make_vector_field(hamiltonian_vf(sys.H, sys.m), layout, sys.params);
}

VectorField tangent_vector_field(const SystemDef& sys) {
  if (sys.chart != Chart::darboux)
    throw ValidationError(
        "numeric integration needs a Darboux-chart system; action-angle systems flow "
        "in closed form (exact_flow_action_angle)");
  const StateLayout layout{sys.m, sys.chart, /*tangent=*/true};
  // The generator of the lifted flow is the fiber derivative of H; its
  // Hamilton equations on TM start with the base equations verbatim.
  return make_vector_field(tangent_hamiltonian_vf(tangent_lift(sys.H), sys.m), layout,
                           sys.params);
}

namespace {

void check_finite(std::span<const double> y, std::size_t step) {
  for (double v : y)
    if (!std::isfinite(v))
      throw NumericError("state became non-finite at step " + std::to_string(step));
}

}  // namespace

void step_rk4(const VectorField& vf, std::span<double> y, double h,
              std::vector<double>& scratch) {
  const std::size_t n = y.size();
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  vf.eval(y, k1, scratch);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
  vf.eval(tmp, k2, scratch);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
  vf.eval(tmp, k3, scratch);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
  vf.eval(tmp, k4, scratch);
  for (std::size_t i = 0; i < n; ++i)
    y[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

void step_midpoint(const VectorField& vf, std::span<double> y, double h,
                   const IntegratorConfig& cfg, std::vector<double>& scratch) {
  const std::size_t n = y.size();
  std::vector<double> z(n), znew(n), mid(n), f(n);
  // Euler predictor.
  vf.eval(y, f, scratch);
  for (std::size_t i = 0; i < n; ++i) z[i] = y[i] + h * f[i];
  for (int it = 0; it < cfg.max_fixed_point_iters; ++it) {
    for (std::size_t i = 0; i < n; ++i) mid[i] = 0.5 * (y[i] + z[i]);
    vf.eval(mid, f, scratch);
    double delta = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      znew[i] = y[i] + h * f[i];
      delta = std::max(delta, std::abs(znew[i] - z[i]));
    }
    z.swap(znew);
    if (delta < cfg.fixed_point_tol) {
      std::copy(z.begin(), z.end(), y.begin());
      return;
    }
  }
  throw NumericError("implicit midpoint failed to converge in " +
                     std::to_string(cfg.max_fixed_point_iters) +
                     " iterations (try a smaller step size)");
}

VerletStepper::VerletStepper(const SystemDef& sys, bool tangent) {
  if (sys.chart != Chart::darboux)
    throw ValidationError("verlet integration requires a Darboux chart");
  if (!sys.separable)
    throw ValidationError(
        "verlet requires a separable Hamiltonian; declare 'separable true' in the "
        "system file if H = T(p) + V(q)");
  // Trust but verify: mixed second derivatives d2H/dq_i dp_j must vanish.
  Rng rng(0x5eba11u);
  int checked = 0;
  double worst = 0.0;
  for (int attempt = 0; attempt < 30 && checked < 10; ++attempt) {
    PhaseState x(sys.m);
    for (std::size_t i = 0; i < sys.m; ++i) {
      x.q[i] = rng.uniform(-2.0, 2.0);
      x.p[i] = rng.uniform(-2.0, 2.0);
    }
    for (std::size_t j = 0; j < sys.m; ++j) {
      std::vector<double> v(2 * sys.m, 0.0);
      v[sys.m + j] = 1.0;  // unit vector along p_j
      std::vector<double> w;
      try {
        w = hess_vec(sys.H, x, v, &sys.params);
      } catch (const EvalError&) {
        goto next_attempt;  // point outside H's domain; resample
      }
      for (std::size_t i = 0; i < sys.m; ++i) worst = std::max(worst, std::abs(w[i]));
    }
    ++checked;
  next_attempt:;
  }
  if (checked < 5)
    throw ValidationError(
        "could not verify separability: too few sample points inside the domain of H");
  if (worst > 1e-10)
    throw ValidationError("Hamiltonian is declared separable but has mixed second "
                          "derivative of size " +
                          format_double(worst));

  vf_ = tangent ? tangent_vector_field(sys) : base_vector_field(sys);
  for (std::size_t i = 0; i < sys.m; ++i) {
    pos_.push_back(i);           // q block
    mom_.push_back(sys.m + i);   // p block
    if (tangent) {
      pos_.push_back(2 * sys.m + i);  // dq block
      mom_.push_back(3 * sys.m + i);  // dp block
    }
  }
}

void VerletStepper::step(std::span<double> y, double h,
                         std::vector<double>& scratch) const {
  // Kick-drift-kick: momentum velocities depend only on positions and
  // position velocities only on momenta, so each half-update is explicit.
  std::vector<double> f(y.size());
  vf_.eval(y, f, scratch);
  for (std::size_t i : mom_) y[i] += 0.5 * h * f[i];
  vf_.eval(y, f, scratch);
  for (std::size_t i : pos_) y[i] += h * f[i];
  vf_.eval(y, f, scratch);
  for (std::size_t i : mom_) y[i] += 0.5 * h * f[i];
}

namespace {

Trajectory run(const VectorField* vf, const VerletStepper* verlet,
               std::span<const double> y0, const IntegratorConfig& cfg,
               std::size_t record_every) {
  // Negative steps integrate backwards in time; only zero is meaningless.
  if (cfg.h == 0.0 || !std::isfinite(cfg.h))
    throw ValidationError("step size must be nonzero and finite");
  if (record_every == 0) record_every = 1;
  Trajectory traj;
  traj.h = cfg.h;
  traj.scheme = cfg.scheme;
  traj.dim = y0.size();
  std::vector<double> y(y0.begin(), y0.end());
  std::vector<double> scratch;
  traj.times.push_back(0.0);
  traj.states.emplace_back(y);
  for (std::size_t s = 1; s <= cfg.steps; ++s) {
    try {
      switch (cfg.scheme) {
        case Scheme::midpoint:
          step_midpoint(*vf, y, cfg.h, cfg, scratch);
          break;
        case Scheme::rk4:
          step_rk4(*vf, y, cfg.h, scratch);
          break;
        case Scheme::verlet:
          verlet->step(y, cfg.h, scratch);
          break;
      }
      check_finite(y, s);
    } catch (const std::exception& err) {
      traj.failed_step = s;
      traj.failure = err.what();
      return traj;
    }
    if (s % record_every == 0 || s == cfg.steps) {
      traj.times.push_back(cfg.h * static_cast<double>(s));
      traj.states.emplace_back(y);
    }
  }
  return traj;
}

}  // namespace

Trajectory integrate(const VectorField& vf, std::span<const double> y0,
                     const IntegratorConfig& cfg, std::size_t record_every) {
  if (cfg.scheme == Scheme::verlet)
    throw std::invalid_argument(
        "integrate(VectorField) cannot run verlet; use integrate_system");
  if (y0.size() != vf.dim())
    throw ValidationError("initial state size does not match the vector field");
  return run(&vf, nullptr, y0, cfg, record_every);
}

Trajectory integrate_system(const SystemDef& sys, const PhaseState& x0,
                            const IntegratorConfig& cfg, std::size_t record_every) {
  if (x0.dof() != sys.m)
    throw ValidationError("initial state has " + std::to_string(x0.dof()) +
                          " degrees of freedom, system has " + std::to_string(sys.m));
  const std::vector<double> y0 = x0.flat();
  if (cfg.scheme == Scheme::verlet) {
    const VerletStepper stepper(sys, /*tangent=*/false);
    return run(nullptr, &stepper, y0, cfg, record_every);
  }
  const VectorField vf = base_vector_field(sys);
  return run(&vf, nullptr, y0, cfg, record_every);
}

Trajectory integrate_tangent(const SystemDef& sys, const TangentState& s0,
                             const IntegratorConfig& cfg, std::size_t record_every) {
  if (s0.dof() != sys.m)
    throw ValidationError("initial state has " + std::to_string(s0.dof()) +
                          " degrees of freedom, system has " + std::to_string(sys.m));
  const std::vector<double> y0 = s0.flat();
  if (cfg.scheme == Scheme::verlet) {
    const VerletStepper stepper(sys, /*tangent=*/true);
    return run(nullptr, &stepper, y0, cfg, record_every);
  }
  const VectorField vf = tangent_vector_field(sys);
  return run(&vf, nullptr, y0, cfg, record_every);
}

ActionAngleState exact_flow_action_angle(const SystemDef& aa,
                                         const ActionAngleState& s0, double t) {
  if (aa.chart != Chart::action_angle)
    throw ValidationError("exact flow requires an action-angle system");
  if (s0.dof() != aa.m)
    throw ValidationError("state dimension does not match the system");
  if (aa.H.references_kind(CoordKind::z) || aa.H.references_kind(CoordKind::dz) ||
      aa.H.references_kind(CoordKind::dI))
    throw ValidationError("exact flow requires H to depend on the actions only");

  const EvalEnv env = make_env(s0, &aa.params);
  ActionAngleState out = s0;
  for (std::uint32_t i = 1; i <= aa.m; ++i) {
    const double omega = eval(diff(aa.H, CoordKind::I, i), env);
    out.z[i - 1] = wrap_angle(s0.z[i - 1] + t * omega);
  }
  if (s0.has_tangent()) {
    // dI is constant; dz advances by t * (d omega / dI) dI.
    for (std::uint32_t i = 1; i <= aa.m; ++i) {
      double acc = 0.0;
      for (std::uint32_t j = 1; j <= aa.m; ++j) {
        const Expr hij = diff(diff(aa.H, CoordKind::I, i), CoordKind::I, j);
        acc += eval(hij, env) * s0.dI[j - 1];
      }
      out.dz[i - 1] = s0.dz[i - 1] + t * acc;
    }
  }
  return out;
}

}  // namespace cisjac
