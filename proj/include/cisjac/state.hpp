#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "cisjac/expr.hpp"

namespace cisjac {

// Point on phase space in a Darboux chart.  Flat order: q1..qm, p1..pm.
struct PhaseState {
  std::vector<double> q;
  std::vector<double> p;

  PhaseState() = default;
  PhaseState(std::vector<double> q_, std::vector<double> p_)
      : q(std::move(q_)), p(std::move(p_)) {}
  explicit PhaseState(std::size_t m) : q(m, 0.0), p(m, 0.0) {}

  std::size_t dof() const { return q.size(); }

  std::vector<double> flat() const {
    std::vector<double> out;
    out.reserve(2 * q.size());
    out.insert(out.end(), q.begin(), q.end());
    out.insert(out.end(), p.begin(), p.end());
    return out;
  }

  static PhaseState from_flat(std::span<const double> v) {
    const std::size_t m = v.size() / 2;
    PhaseState s(m);
    for (std::size_t i = 0; i < m; ++i) {
      s.q[i] = v[i];
      s.p[i] = v[m + i];
    }
    return s;
  }

  bool finite() const {
    for (double x : q)
      if (!std::isfinite(x)) return false;
    for (double x : p)
      if (!std::isfinite(x)) return false;
    return true;
  }
};

// Point on the tangent bundle over a Darboux chart.  Flat order:
// q1..qm, p1..pm, dq1..dqm, dp1..dpm.
struct TangentState {
  PhaseState x;
  std::vector<double> dq;
  std::vector<double> dp;

  TangentState() = default;
  TangentState(PhaseState x_, std::vector<double> dq_, std::vector<double> dp_)
      : x(std::move(x_)), dq(std::move(dq_)), dp(std::move(dp_)) {}
  explicit TangentState(std::size_t m) : x(m), dq(m, 0.0), dp(m, 0.0) {}

  std::size_t dof() const { return x.dof(); }

  std::vector<double> flat() const {
    std::vector<double> out = x.flat();
    out.reserve(4 * dof());
    out.insert(out.end(), dq.begin(), dq.end());
    out.insert(out.end(), dp.begin(), dp.end());
    return out;
  }

  static TangentState from_flat(std::span<const double> v) {
    const std::size_t m = v.size() / 4;
    TangentState s(m);
    for (std::size_t i = 0; i < m; ++i) {
      s.x.q[i] = v[i];
      s.x.p[i] = v[m + i];
      s.dq[i] = v[2 * m + i];
      s.dp[i] = v[3 * m + i];
    }
    return s;
  }

  bool finite() const {
    if (!x.finite()) return false;
    for (double v : dq)
      if (!std::isfinite(v)) return false;
    for (double v : dp)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

// Point in an action-angle chart, optionally with a tangent vector attached
// (dz/dI empty means "no tangent part").  Flat order: z1..zm, I1..Im[, dz, dI].
struct ActionAngleState {
  std::vector<double> z;
  std::vector<double> I;
  std::vector<double> dz;
  std::vector<double> dI;

  ActionAngleState() = default;
  explicit ActionAngleState(std::size_t m, bool tangent = false)
      : z(m, 0.0), I(m, 0.0) {
    if (tangent) {
      dz.assign(m, 0.0);
      dI.assign(m, 0.0);
    }
  }

  std::size_t dof() const { return z.size(); }
  bool has_tangent() const { return !dz.empty(); }
};

// Wrap an angle into [0, 2*pi).
inline double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double w = std::fmod(a, two_pi);
  if (w < 0.0) w += two_pi;
  // fmod of a tiny negative can round back up to exactly two_pi.
  if (w >= two_pi) w -= two_pi;
  return w;
}

// Shortest angular distance between a and b on the circle, in [0, pi].
inline double angle_distance(double a, double b) {
  double d = wrap_angle(a - b);
  constexpr double two_pi = 2.0 * std::numbers::pi;
  return d > std::numbers::pi ? two_pi - d : d;
}

inline EvalEnv make_env(const PhaseState& s, const ParamMap* params = nullptr) {
  EvalEnv env;
  env.q = std::span<const double>(s.q);
  env.p = std::span<const double>(s.p);
  env.params = params;
  return env;
}

inline EvalEnv make_env(const TangentState& s, const ParamMap* params = nullptr) {
  EvalEnv env = make_env(s.x, params);
  env.dq = std::span<const double>(s.dq);
  env.dp = std::span<const double>(s.dp);
  return env;
}

inline EvalEnv make_env(const ActionAngleState& s, const ParamMap* params = nullptr) {
  EvalEnv env;
  env.z = std::span<const double>(s.z);
  env.I = std::span<const double>(s.I);
  if (s.has_tangent()) {
    env.dz = std::span<const double>(s.dz);
    env.dI = std::span<const double>(s.dI);
  }
  env.params = params;
  return env;
}

}  // namespace cisjac
