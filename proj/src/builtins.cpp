#include "cisjac/builtins.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "cisjac/errors.hpp"

namespace cisjac {

namespace {

double parse_number(std::string_view s, const char* what) {
  double out = 0.0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  if (ec != std::errc{} || ptr != end)
    throw ValidationError("bad " + std::string(what) + " value '" + std::string(s) + "'");
  return out;
}

std::size_t parse_count(std::string_view s, const char* what) {
  std::size_t out = 0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  if (ec != std::errc{} || ptr != end || out == 0)
    throw ValidationError("bad " + std::string(what) + " value '" + std::string(s) + "'");
  return out;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  while (!s.empty()) {
    const auto c = s.find(sep);
    out.push_back(s.substr(0, c));
    if (c == std::string_view::npos) break;
    s.remove_prefix(c + 1);
  }
  return out;
}

}  // namespace

std::string oscillator_source(std::size_t m, const std::vector<double>& w) {
  std::ostringstream os;
  os << "# " << m << " uncoupled harmonic oscillator" << (m == 1 ? "" : "s")
     << "; integrals are the actions\n";
  os << "dim " << m << "\n";
  for (std::size_t k = 1; k <= m; ++k)
    os << "param w" << k << " " << format_double(w[k - 1]) << "\n";
  os << "separable true\n";
  os << "H ";
  for (std::size_t k = 1; k <= m; ++k) {
    if (k > 1) os << " + ";
    os << "(p" << k << "^2 + (w" << k << "^2)*q" << k << "^2)/2";
  }
  os << "\n";
  for (std::size_t k = 1; k <= m; ++k)
    os << "F" << k << " (p" << k << "^2 + (w" << k << "^2)*q" << k << "^2)/(2*w" << k
       << ")\n";
  return os.str();
}

std::string kepler_source(double mu) {
  std::ostringstream os;
  os << "# planar two-body problem; integrals are energy and angular momentum\n";
  os << "dim 2\n";
  os << "param mu " << format_double(mu) << "\n";
  os << "separable true\n";
  os << "H (p1^2 + p2^2)/2 - mu/sqrt(q1^2 + q2^2)\n";
  os << "F1 (p1^2 + p2^2)/2 - mu/sqrt(q1^2 + q2^2)\n";
  os << "F2 q1*p2 - q2*p1\n";
  return os.str();
}

std::string quartic_source() {
  return "# anharmonic oscillator with amplitude-dependent period\n"
         "dim 1\n"
         "separable true\n"
         "H p1^2/2 + q1^4/4\n"
         "F1 p1^2/2 + q1^4/4\n";
}

BuiltinSystem oscillator(std::size_t m, std::vector<double> w) {
  if (m == 0) throw ValidationError("oscillator needs at least one degree of freedom");
  if (w.empty()) w.assign(m, 1.0);
  if (w.size() != m)
    throw ValidationError("oscillator got " + std::to_string(w.size()) +
                          " frequencies for " + std::to_string(m) + " degrees of freedom");
  for (double wk : w)
    if (!(wk > 0.0)) throw ValidationError("oscillator frequencies must be positive");

  BuiltinSystem b;
  b.name = "osc";
  b.def = parse_system(oscillator_source(m, w));

  ActionAngleChart chart;
  chart.aa.m = m;
  chart.aa.chart = Chart::action_angle;
  Expr H = Expr::constant(0.0);
  for (std::size_t k = 1; k <= m; ++k) {
    const std::string name = "w" + std::to_string(k);
    chart.aa.params[name] = w[k - 1];
    H = H + Expr::parameter(name) * Expr::coordinate(CoordKind::I, static_cast<std::uint32_t>(k));
    chart.aa.F.push_back(Expr::coordinate(CoordKind::I, static_cast<std::uint32_t>(k)));
  }
  chart.aa.H = simplify(H);
  chart.aa.validate();

  const std::vector<double> ws = w;
  chart.forward = [ws](const PhaseState& x) {
    ActionAngleState s(x.dof());
    for (std::size_t k = 0; k < x.dof(); ++k) {
      const double q = x.q[k], p = x.p[k], wk = ws[k];
      s.I[k] = (p * p + wk * wk * q * q) / (2.0 * wk);
      if (s.I[k] == 0.0)
        throw EvalError("action-angle chart is singular at the origin of dof " +
                        std::to_string(k + 1));
      s.z[k] = wrap_angle(std::atan2(wk * q, p));
    }
    return s;
  };
  chart.inverse = [ws](const ActionAngleState& s) {
    PhaseState x(s.dof());
    for (std::size_t k = 0; k < s.dof(); ++k) {
      const double wk = ws[k];
      // The chart covers I > 0 only; I = 0 is the origin, where the angle is
      // undefined and the forward map refuses to go.
      if (s.I[k] <= 0.0) throw EvalError("action must be positive");
      x.q[k] = std::sqrt(2.0 * s.I[k] / wk) * std::sin(s.z[k]);
      x.p[k] = std::sqrt(2.0 * s.I[k] * wk) * std::cos(s.z[k]);
    }
    return x;
  };
  chart.forward_tangent = [ws, fwd = chart.forward](const TangentState& t) {
    ActionAngleState s = fwd(t.x);
    s.dz.resize(t.dof());
    s.dI.resize(t.dof());
    for (std::size_t k = 0; k < t.dof(); ++k) {
      const double q = t.x.q[k], p = t.x.p[k], wk = ws[k];
      const double r2 = wk * wk * q * q + p * p;
      s.dI[k] = wk * q * t.dq[k] + (p / wk) * t.dp[k];
      s.dz[k] = wk * (p * t.dq[k] - q * t.dp[k]) / r2;
    }
    return s;
  };
  chart.inverse_tangent = [ws, inv = chart.inverse](const ActionAngleState& s) {
    if (!s.has_tangent()) throw EvalError("state has no tangent part");
    TangentState t;
    t.x = inv(s);
    t.dq.resize(s.dof());
    t.dp.resize(s.dof());
    for (std::size_t k = 0; k < s.dof(); ++k) {
      const double wk = ws[k];
      if (s.I[k] <= 0.0)
        throw EvalError("tangent chart inverse is singular at zero action");
      const double amp = std::sqrt(2.0 * s.I[k] * wk);  // = w * sqrt(2 I / w)
      const double sz = std::sin(s.z[k]), cz = std::cos(s.z[k]);
      t.dq[k] = (amp / wk) * cz * s.dz[k] + (sz / amp) * s.dI[k];
      t.dp[k] = -amp * sz * s.dz[k] + (wk / amp) * cz * s.dI[k];
    }
    return t;
  };
  b.chart = std::move(chart);

  b.exclude = [ws](const PhaseState& x) {
    for (std::size_t k = 0; k < x.dof(); ++k) {
      const double q = x.q[k], p = x.p[k], wk = ws[k];
      if ((p * p + wk * wk * q * q) / (2.0 * wk) < 1e-3) return true;
    }
    return false;
  };
  return b;
}

BuiltinSystem kepler(double mu) {
  if (!(mu > 0.0)) throw ValidationError("kepler needs mu > 0");
  BuiltinSystem b;
  b.name = "kepler";
  b.def = parse_system(kepler_source(mu));
  b.exclude = [](const PhaseState& x) {
    const double r = std::hypot(x.q[0], x.q[1]);
    const double L = x.q[0] * x.p[1] - x.q[1] * x.p[0];
    return r < 0.1 || std::abs(L) < 0.05;
  };
  return b;
}

BuiltinSystem quartic() {
  BuiltinSystem b;
  b.name = "quartic";
  b.def = parse_system(quartic_source());
  b.exclude = [](const PhaseState& x) {
    return x.q[0] * x.q[0] + x.p[0] * x.p[0] < 0.01;
  };
  return b;
}

std::optional<BuiltinSystem> make_builtin(std::string_view spec) {
  std::string_view head = spec;
  std::string_view args;
  if (const auto c = spec.find(':'); c != std::string_view::npos) {
    head = spec.substr(0, c);
    args = spec.substr(c + 1);
  }

  if (head == "osc") {
    std::size_t m = 0;
    std::vector<double> w;
    bool in_w = false;
    for (std::string_view tok : args.empty() ? std::vector<std::string_view>{}
                                             : split(args, ',')) {
      const auto eq = tok.find('=');
      if (eq != std::string_view::npos) {
        const std::string_view key = tok.substr(0, eq);
        const std::string_view val = tok.substr(eq + 1);
        if (key == "m") {
          m = parse_count(val, "m");
          in_w = false;
        } else if (key == "w") {
          w.push_back(parse_number(val, "frequency"));
          in_w = true;
        } else {
          throw ValidationError("unknown oscillator option '" + std::string(key) + "'");
        }
      } else if (in_w) {
        w.push_back(parse_number(tok, "frequency"));
      } else {
        throw ValidationError("unexpected oscillator argument '" + std::string(tok) + "'");
      }
    }
    if (m == 0) m = w.empty() ? 1 : w.size();
    return oscillator(m, std::move(w));
  }
  if (head == "kepler") {
    double mu = 1.0;
    for (std::string_view tok : args.empty() ? std::vector<std::string_view>{}
                                             : split(args, ',')) {
      const auto eq = tok.find('=');
      if (eq == std::string_view::npos || tok.substr(0, eq) != "mu")
        throw ValidationError("unexpected kepler argument '" + std::string(tok) + "'");
      mu = parse_number(tok.substr(eq + 1), "mu");
    }
    return kepler(mu);
  }
  if (head == "quartic") {
    if (!args.empty())
      throw ValidationError("quartic takes no arguments");
    return quartic();
  }
  return std::nullopt;
}

std::vector<std::string> builtin_names() {
  return {"osc[:m=<n>][,w=<w1>,<w2>,...]", "kepler[:mu=<mu>]", "quartic"};
}

}  // namespace cisjac
