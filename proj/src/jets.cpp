#include "cisjac/jets.hpp"

#include <cmath>

#include "cisjac/detail/scalar_ops.hpp"
#include "cisjac/errors.hpp"

namespace cisjac {

Jet1 operator-(const Jet1& f) { return {-f.val, -f.dot}; }
Jet1 operator+(const Jet1& f, const Jet1& g) { return {f.val + g.val, f.dot + g.dot}; }
Jet1 operator-(const Jet1& f, const Jet1& g) { return {f.val - g.val, f.dot - g.dot}; }
Jet1 operator*(const Jet1& f, const Jet1& g) {
  return {f.val * g.val, f.dot * g.val + f.val * g.dot};
}
Jet1 operator/(const Jet1& f, const Jet1& g) {
  const double v = f.val / g.val;
  return {v, (f.dot - v * g.dot) / g.val};
}

// Jet2 products group the cross terms (da*db + db*da) as one commutative pair
// so that swapping the seed directions is a bitwise no-op.
Jet2 operator-(const Jet2& f) { return {-f.val, -f.da, -f.db, -f.dab}; }
Jet2 operator+(const Jet2& f, const Jet2& g) {
  return {f.val + g.val, f.da + g.da, f.db + g.db, f.dab + g.dab};
}
Jet2 operator-(const Jet2& f, const Jet2& g) {
  return {f.val - g.val, f.da - g.da, f.db - g.db, f.dab - g.dab};
}
Jet2 operator*(const Jet2& f, const Jet2& g) {
  return {f.val * g.val,
          f.da * g.val + f.val * g.da,
          f.db * g.val + f.val * g.db,
          f.dab * g.val + (f.da * g.db + f.db * g.da) + f.val * g.dab};
}
Jet2 operator/(const Jet2& f, const Jet2& g) {
  Jet2 h;
  h.val = f.val / g.val;
  h.da = (f.da - h.val * g.da) / g.val;
  h.db = (f.db - h.val * g.db) / g.val;
  h.dab = (f.dab - (h.da * g.db + h.db * g.da) - h.val * g.dab) / g.val;
  return h;
}

namespace {

// Chain rule for a univariate primitive with value u, first derivative d1 and
// second derivative d2 at f.val.
inline Jet1 chain(const Jet1& f, double u, double d1) { return {u, d1 * f.dot}; }
inline Jet2 chain(const Jet2& f, double u, double d1, double d2) {
  return {u, d1 * f.da, d1 * f.db, d1 * f.dab + d2 * (f.da * f.db)};
}

}  // namespace

Jet1 sin(const Jet1& f) { return chain(f, std::sin(f.val), std::cos(f.val)); }
Jet1 cos(const Jet1& f) { return chain(f, std::cos(f.val), -std::sin(f.val)); }
Jet1 tan(const Jet1& f) {
  const double t = std::tan(f.val);
  return chain(f, t, 1.0 + t * t);
}
Jet1 exp(const Jet1& f) {
  const double u = std::exp(f.val);
  return chain(f, u, u);
}
Jet1 log(const Jet1& f) { return chain(f, std::log(f.val), 1.0 / f.val); }
Jet1 sqrt(const Jet1& f) {
  const double u = std::sqrt(f.val);
  return chain(f, u, 0.5 / u);
}
Jet1 sinh(const Jet1& f) { return chain(f, std::sinh(f.val), std::cosh(f.val)); }
Jet1 cosh(const Jet1& f) { return chain(f, std::cosh(f.val), std::sinh(f.val)); }
Jet1 pow(const Jet1& f, const Jet1& g) {
  // Exponent is always a constant expression (enforced at build time).
  const double c = g.val;
  const double u = std::pow(f.val, c);
  return chain(f, u, c * std::pow(f.val, c - 1.0));
}

Jet2 sin(const Jet2& f) {
  const double s = std::sin(f.val);
  return chain(f, s, std::cos(f.val), -s);
}
Jet2 cos(const Jet2& f) {
  const double c = std::cos(f.val);
  return chain(f, c, -std::sin(f.val), -c);
}
Jet2 tan(const Jet2& f) {
  const double t = std::tan(f.val);
  const double sec2 = 1.0 + t * t;
  return chain(f, t, sec2, 2.0 * t * sec2);
}
Jet2 exp(const Jet2& f) {
  const double u = std::exp(f.val);
  return chain(f, u, u, u);
}
Jet2 log(const Jet2& f) {
  const double inv = 1.0 / f.val;
  return chain(f, std::log(f.val), inv, -inv * inv);
}
Jet2 sqrt(const Jet2& f) {
  const double u = std::sqrt(f.val);
  const double d1 = 0.5 / u;
  return chain(f, u, d1, -0.5 * d1 / f.val);
}
Jet2 sinh(const Jet2& f) {
  const double s = std::sinh(f.val);
  return chain(f, s, std::cosh(f.val), s);
}
Jet2 cosh(const Jet2& f) {
  const double c = std::cosh(f.val);
  return chain(f, c, std::sinh(f.val), c);
}
Jet2 pow(const Jet2& f, const Jet2& g) {
  const double c = g.val;
  const double u = std::pow(f.val, c);
  const double d1 = c * std::pow(f.val, c - 1.0);
  const double d2 = c * (c - 1.0) * std::pow(f.val, c - 2.0);
  return chain(f, u, d1, d2);
}

namespace {

template <class J>
J eval_jet(const Expr& e, std::span<const J> seeds, std::size_t m,
           const ParamMap* params) {
  const auto coord = [&](CoordKind kind, std::uint32_t index) -> J {
    switch (kind) {
      case CoordKind::q:
        return seeds[index - 1];
      case CoordKind::p:
        return seeds[m + index - 1];
      default:
        throw EvalError("jet evaluation supports only q/p coordinates, got " +
                        std::string(coord_kind_name(kind)) + std::to_string(index));
    }
  };
  const auto param = [&](const std::string& name) -> J {
    if (params) {
      auto it = params->find(name);
      if (it != params->end()) return J(it->second);
    }
    throw EvalError("unbound parameter '" + name + "'");
  };
  return detail::eval_tree<J>(e, coord, param);
}

}  // namespace

Jet1 eval_jet1(const Expr& e, std::span<const Jet1> seeds, std::size_t m,
               const ParamMap* params) {
  return eval_jet<Jet1>(e, seeds, m, params);
}

Jet2 eval_jet2(const Expr& e, std::span<const Jet2> seeds, std::size_t m,
               const ParamMap* params) {
  return eval_jet<Jet2>(e, seeds, m, params);
}

std::vector<double> grad(const Expr& e, const PhaseState& x, const ParamMap* params) {
  const std::size_t m = x.dof();
  const std::vector<double> flat = x.flat();
  std::vector<Jet1> seeds(2 * m);
  for (std::size_t i = 0; i < 2 * m; ++i) seeds[i] = Jet1(flat[i], 0.0);
  std::vector<double> out(2 * m, 0.0);
  for (std::size_t i = 0; i < 2 * m; ++i) {
    seeds[i].dot = 1.0;
    out[i] = eval_jet1(e, seeds, m, params).dot;
    seeds[i].dot = 0.0;
  }
  return out;
}

std::vector<double> hess_vec(const Expr& e, const PhaseState& x,
                             std::span<const double> v, const ParamMap* params) {
  const std::size_t m = x.dof();
  const std::vector<double> flat = x.flat();
  std::vector<Jet2> seeds(2 * m);
  for (std::size_t i = 0; i < 2 * m; ++i) seeds[i] = Jet2(flat[i], 0.0, v[i], 0.0);
  std::vector<double> out(2 * m, 0.0);
  for (std::size_t i = 0; i < 2 * m; ++i) {
    seeds[i].da = 1.0;
    out[i] = eval_jet2(e, seeds, m, params).dab;
    seeds[i].da = 0.0;
  }
  return out;
}

double directional(const Expr& e, const PhaseState& x, std::span<const double> v,
                   const ParamMap* params) {
  const std::size_t m = x.dof();
  const std::vector<double> flat = x.flat();
  std::vector<Jet1> seeds(2 * m);
  for (std::size_t i = 0; i < 2 * m; ++i) seeds[i] = Jet1(flat[i], v[i]);
  return eval_jet1(e, seeds, m, params).dot;
}

}  // namespace cisjac
