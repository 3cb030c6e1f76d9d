#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "cisjac/flow.hpp"
#include "cisjac/linalg.hpp"
#include "cisjac/state.hpp"
#include "cisjac/system.hpp"

namespace cisjac {

struct SampleBox {
  double lo = -2.0;
  double hi = 2.0;
};

using ExclusionFn = std::function<bool(const PhaseState&)>;

// Monte-Carlo evidence that a system is completely integrable: all pairwise
// brackets of {H, F_1..F_m} vanish and the integral differentials stay
// linearly independent, over n points sampled uniformly from the box.
// Points rejected by `exclude` or falling outside the domain of the
// expressions are counted in samples_skipped.
struct IntegrabilityReport {
  std::size_t samples_requested = 0;
  std::size_t samples_evaluated = 0;
  std::size_t samples_skipped = 0;
  std::uint64_t seed = 0;
  double max_h_bracket = 0.0;     // max over samples/k of |{H, F_k}|
  double max_ff_bracket = 0.0;    // max over samples/(j<k) of |{F_j, F_k}|
  double min_independence = 1.0;  // min over samples of sigma_min/sigma_max of dF

  bool is_cis(double bracket_tol = 1e-9, double independence_tol = 1e-8) const {
    return samples_evaluated > 0 && max_h_bracket < bracket_tol &&
           max_ff_bracket < bracket_tol && min_independence > independence_tol;
  }
};

IntegrabilityReport validate_cis(const SystemDef& sys, std::size_t n,
                                 std::uint64_t seed, SampleBox box = {},
                                 const ExclusionFn& exclude = nullptr);

// Same check for the induced system on the tangent bundle: Hamiltonian
// lift(H), integrals F_1..F_m (pulled back) together with lift(F_1)..lift(F_m),
// brackets taken in the tangent-bundle structure, independence of the full
// 2m-by-4m Jacobian.  Tangent fiber components are sampled from the same box.
IntegrabilityReport validate_lifted_cis(const SystemDef& sys, std::size_t n,
                                        std::uint64_t seed, SampleBox box = {},
                                        const ExclusionFn& exclude = nullptr);

// Conservation along a recorded orbit: per-integral max |F_k(t) - F_k(0)|.
// For a tangent-bundle trajectory (dim == 4m) the lifted integrals
// lift(F_k) are tracked as well.
struct DriftReport {
  std::vector<double> integral_drift;
  std::vector<double> lifted_drift;

  double max_integral_drift() const;
  double max_lifted_drift() const;
};

DriftReport drift(const SystemDef& sys, const Trajectory& traj);

// Jacobian of the integral map at x: m rows, 2m columns (d/dq, d/dp).
Mat integral_jacobian(const SystemDef& sys, const PhaseState& x);

// Connecting vector between two nearby states, recovered from the integral
// offsets alone: the minimum-norm v0 with dF(s0) v0 = F(s0') - F(s0).
// Throws ValidationError when dF(s0) is rank-deficient (singular-value ratio
// below rank_tol), e.g. at critical points of the integral map.
struct ReconstructionResult {
  std::vector<double> v0;
  std::vector<double> delta_f;
  double initial_residual = 0.0;  // max_k |lift F_k(s0, v0) - delta_f[k]|
  double singular_ratio = 0.0;    // of dF(s0)
};

ReconstructionResult reconstruct_jacobi(const SystemDef& sys, const PhaseState& s0,
                                        const PhaseState& s0p, double rank_tol = 1e-8);

// Action-chart counterpart: the integral offsets determine the action offset
// through the square system (dF/dI) dI = F(I') - F(I); angle offsets are
// invisible to the integrals.
std::vector<double> reconstruct_action(const SystemDef& aa, std::span<const double> I0,
                                       std::span<const double> I0p);

// How well the initial reconstruction persists under the flow: integrate the
// tangent system from (s0, v0) and the base system from s0', and record at
// each time |lift F_k(s(t), v(t)) - (F_k(s'(t)) - F_k(s(t)))| per integral.
// Both sides of that difference are conserved, so the residual staying at its
// initial size is the sharp expectation.
struct PersistenceSeries {
  ReconstructionResult recon;
  std::vector<double> times;
  std::vector<std::vector<double>> residuals;  // [time][k]
  double max_residual = 0.0;
  Trajectory tangent_traj;  // (s(t), v(t)) on the tangent bundle
  Trajectory pair_traj;     // s'(t)
};

PersistenceSeries verify_persistence(const SystemDef& sys, const PhaseState& s0,
                                     const PhaseState& s0p, const IntegratorConfig& cfg,
                                     std::size_t record_every = 1);

// Persistence experiment for a pair s0, s0 + eps*direction, additionally
// recording the separation D(t) = |s'(t) - (s(t) + v(t))|_2 between the true
// neighbor and its first-order shadow.
struct DivergenceSeries {
  PersistenceSeries persistence;
  std::vector<double> separation;
  double growth_factor = 0.0;  // D(T) / max{D(t) : t <= 1}
};

DivergenceSeries divergence_experiment(const SystemDef& sys, const PhaseState& s0,
                                       double eps, std::span<const double> direction,
                                       const IntegratorConfig& cfg,
                                       std::size_t record_every = 1);

}  // namespace cisjac
