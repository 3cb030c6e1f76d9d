#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cisjac/compiled.hpp"
#include "cisjac/expr.hpp"
#include "cisjac/state.hpp"
#include "cisjac/system.hpp"

namespace cisjac {

enum class Scheme : std::uint8_t { midpoint, verlet, rk4 };

const char* scheme_name(Scheme s);
Scheme parse_scheme(std::string_view name);  // ValidationError on unknown name

struct IntegratorConfig {
  Scheme scheme = Scheme::midpoint;
  double h = 1e-3;
  std::size_t steps = 0;
  // Implicit midpoint stops its fixed-point iteration when successive
  // iterates agree to this max-norm tolerance.
  double fixed_point_tol = 1e-13;
  int max_fixed_point_iters = 50;
};

// Recorded orbit.  `states` holds flat state vectors at the times in `times`;
// step 0 and the final step are always recorded.  If a step fails (domain
// error, non-convergence, non-finite state), integration stops there:
// `failed_step` is the 1-based index of the step that could not be completed
// and `failure` describes why; the recorded prefix remains valid.
struct Trajectory {
  double t0 = 0.0;
  double h = 0.0;
  Scheme scheme = Scheme::midpoint;
  std::size_t dim = 0;
  std::vector<double> times;
  std::vector<std::vector<double>> states;
  std::optional<std::size_t> failed_step;
  std::string failure;

  bool ok() const { return !failed_step.has_value(); }
  const std::vector<double>& back() const { return states.back(); }
};

// Compiled first-order vector field over a flat state layout.
struct VectorField {
  StateLayout layout;
  std::vector<Expr> symbolic;
  std::vector<CompiledExpr> compiled;

  std::size_t dim() const { return layout.dim(); }
  void eval(std::span<const double> state, std::span<double> out,
            std::vector<double>& scratch) const;
};

VectorField make_vector_field(std::vector<Expr> components, const StateLayout& layout,
                              const ParamMap& params);

// Hamilton equations of sys on phase space: 2m components (dH/dp_i, -dH/dq_i).
VectorField base_vector_field(const SystemDef& sys);

// Tangent-bundle flow of sys: 4m components.  The first 2m are the base
// equations verbatim (the base block of a tangent run reproduces the base run
// exactly); the last 2m transport the fiber by the linearized flow.
VectorField tangent_vector_field(const SystemDef& sys);

// Stoermer-Verlet for separable Hamiltonians.  Valid whenever the flat state
// splits into position slots whose velocities depend only on momentum slots
// and vice versa; for a separable H = T(p) + V(q) this holds for the base
// system with (q | p) and for the tangent system with (q, dq | p, dp).
// Construction checks sys.separable and then verifies numerically that the
// mixed second derivatives d2H/dq dp vanish at sampled points; throws
// ValidationError otherwise.
class VerletStepper {
 public:
  VerletStepper(const SystemDef& sys, bool tangent);

  void step(std::span<double> y, double h, std::vector<double>& scratch) const;
  const VectorField& field() const { return vf_; }

 private:
  VectorField vf_;
  std::vector<std::size_t> pos_;  // slots updated from momentum-dependent rhs
  std::vector<std::size_t> mom_;
};

// One classical 4-stage Runge-Kutta step; y is updated in place.
void step_rk4(const VectorField& vf, std::span<double> y, double h,
              std::vector<double>& scratch);

// One implicit-midpoint step; throws NumericError if the fixed-point
// iteration fails to converge.
void step_midpoint(const VectorField& vf, std::span<double> y, double h,
                   const IntegratorConfig& cfg, std::vector<double>& scratch);

// Integrate vf from y0 (midpoint and rk4 only; Verlet needs the system and
// goes through integrate_system / integrate_tangent).  Records step 0, every
// record_every-th step and the final step.
Trajectory integrate(const VectorField& vf, std::span<const double> y0,
                     const IntegratorConfig& cfg, std::size_t record_every = 1);

Trajectory integrate_system(const SystemDef& sys, const PhaseState& x0,
                            const IntegratorConfig& cfg, std::size_t record_every = 1);

Trajectory integrate_tangent(const SystemDef& sys, const TangentState& s0,
                             const IntegratorConfig& cfg, std::size_t record_every = 1);

// Closed-form flow in an action-angle chart: actions are constant, angles
// advance linearly with frequencies dH/dI evaluated at the initial actions,
// and an attached tangent vector is transported by the exact linearization
// (dI constant, dz advancing by t * Hess_I(H) dI).  Angles are wrapped to
// [0, 2*pi).  Requires aa.chart == action_angle and H depending only on I.
ActionAngleState exact_flow_action_angle(const SystemDef& aa,
                                         const ActionAngleState& s0, double t);

}  // namespace cisjac
