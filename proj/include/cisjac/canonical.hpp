#pragma once

#include <span>
#include <vector>

#include "cisjac/expr.hpp"
#include "cisjac/state.hpp"
#include "cisjac/system.hpp"

namespace cisjac {

// Sign conventions used throughout (flat order q1..qm, p1..pm):
//   {f, g} = sum_i (df/dp_i * dg/dq_i  -  df/dq_i * dg/dp_i)
// so {q1, p1} = -1 and time evolution reads d/dt f = {H, f}.

// Matrix S with {f, g} = grad(f)^T S grad(g); S = [[0, -I], [I, 0]] in (q, p)
// block order.
std::vector<std::vector<double>> symplectic_matrix(std::size_t m);

// Matrix for the tangent-bundle bracket in flat order (q, p, dq, dp):
// nonzeros are S[p_i][dq_i] = +1, S[dq_i][p_i] = -1, S[dp_i][q_i] = +1,
// S[q_i][dp_i] = -1.
std::vector<std::vector<double>> tangent_symplectic_matrix(std::size_t m);

// Symbolic Poisson bracket; the number of degrees of freedom is inferred from
// the coordinates referenced by f and g.
Expr poisson(const Expr& f, const Expr& g);

// Hamiltonian vector field of H: returns 2m components in flat order,
// (dq_i/dt, dp_i/dt) = (dH/dp_i, -dH/dq_i).
std::vector<Expr> hamiltonian_vf(const Expr& H, std::size_t m);

// Fiber-linear derivative of f along the tangent fibers:
//   lift(f) = sum_i (dq_i * df/dq_i + dp_i * df/dp_i)
// (dz/dI in an action-angle chart).  Applied to a first integral it measures
// the first-order offset of that integral along a connecting vector.
Expr tangent_lift(const Expr& f, Chart chart = Chart::darboux);

// Bracket on the tangent bundle:
//   {g, g'}_T = sum_i ( dg/dp_i dg'/ddq_i - dg/ddq_i dg'/dp_i
//                     + dg/ddp_i dg'/dq_i - dg/dq_i  dg'/ddp_i ).
// Base functions are in involution under it; it restricts to the base bracket
// when one argument is a lifted function.
Expr tangent_poisson(const Expr& g, const Expr& gp);

// Vector field on TM generated by g (typically g = tangent_lift(H)) under the
// tangent bracket; returns 4m components in flat order (q, p, dq, dp):
// (dg/ddp_i, -dg/ddq_i, dg/dp_i, -dg/dq_i).
std::vector<Expr> tangent_hamiltonian_vf(const Expr& g, std::size_t m);

// Max-abs residuals, over the given probe points, of the structural
// identities tying the two brackets together:
//   pullback: {f, g}_T                          == 0
//   mixed:    {lift f, g}_T  and  {f, lift g}_T == {f, g}
//   lift:     {lift f, lift g}_T                == lift {f, g}
struct LiftIdentityResiduals {
  double pullback = 0.0;
  double mixed = 0.0;
  double lift = 0.0;
};

LiftIdentityResiduals check_lift_identities(const Expr& f, const Expr& g,
                                            std::span<const TangentState> points,
                                            const ParamMap* params);

}  // namespace cisjac
