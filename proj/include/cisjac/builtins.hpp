#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cisjac/state.hpp"
#include "cisjac/system.hpp"

namespace cisjac {

// A change of variables to action-angle form, with its tangent prolongation
// and the system definition expressed on the action-angle side (where the
// flow is linear and can be evaluated in closed form).
struct ActionAngleChart {
  SystemDef aa;  // chart == action_angle, H a function of the actions only
  std::function<ActionAngleState(const PhaseState&)> forward;
  std::function<PhaseState(const ActionAngleState&)> inverse;
  std::function<ActionAngleState(const TangentState&)> forward_tangent;
  std::function<TangentState(const ActionAngleState&)> inverse_tangent;
};

struct BuiltinSystem {
  std::string name;
  SystemDef def;
  std::optional<ActionAngleChart> chart;
  // Initial conditions to keep away from when sampling randomly: chart
  // singularities, collisions, critical points of the integral map.
  std::function<bool(const PhaseState&)> exclude;
};

// Uncoupled harmonic oscillators with frequencies w (defaults to all 1).
// Integrals F_k are the actions (p_k^2 + w_k^2 q_k^2) / (2 w_k).
BuiltinSystem oscillator(std::size_t m, std::vector<double> w = {});

// Planar gravitational two-body problem; integrals are the energy and the
// angular momentum q1*p2 - q2*p1.
BuiltinSystem kepler(double mu = 1.0);

// One-dof anharmonic oscillator H = p^2/2 + q^4/4 (amplitude-dependent
// period, so nearby orbits shear apart linearly in time).
BuiltinSystem quartic();

// Source text of the equivalent .cis file for each builtin.
std::string oscillator_source(std::size_t m, const std::vector<double>& w);
std::string kepler_source(double mu);
std::string quartic_source();

// Parse a shorthand like "osc:m=2,w=1,1", "kepler:mu=1" or "quartic".
// Returns nullopt if `spec` does not name a builtin (the caller may then try
// it as a file path); malformed arguments raise ValidationError.
std::optional<BuiltinSystem> make_builtin(std::string_view spec);

// Shorthand patterns, for help text.
std::vector<std::string> builtin_names();

}  // namespace cisjac
