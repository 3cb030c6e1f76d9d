#include "cisjac/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cisjac/builtins.hpp"
#include "cisjac/canonical.hpp"
#include "cisjac/cistools.hpp"
#include "cisjac/compiled.hpp"
#include "cisjac/csv.hpp"
#include "cisjac/errors.hpp"
#include "cisjac/flow.hpp"
#include "cisjac/rng.hpp"
#include "cisjac/system.hpp"

namespace cisjac {

namespace {

struct LoadedSystem {
  SystemDef def;
  std::string display;
  ExclusionFn exclude;  // may be empty
};

LoadedSystem load_system(const std::string& spec) {
  if (std::optional<BuiltinSystem> b = make_builtin(spec)) {
    return {std::move(b->def), spec, std::move(b->exclude)};
  }
  std::ifstream in(spec, std::ios::binary);
  if (!in)
    throw ValidationError("cannot read system file '" + spec +
                          "' (and it does not name a builtin system)");
  std::ostringstream buf;
  buf << in.rdbuf();
  return {parse_system(buf.str()), spec, nullptr};
}

std::vector<double> parse_list(const std::string& s, const char* what) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t end = s.find(',', start);
    if (end == std::string::npos) end = s.size();
    const std::string item = s.substr(start, end - start);
    try {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw ValidationError("bad " + std::string(what) + " entry '" + item +
                            "' (expected comma-separated numbers)");
    }
    start = end + 1;
  }
  return out;
}

std::string hex_fingerprint(std::uint64_t fp) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << fp;
  return os.str();
}

std::string list_str(std::span<const double> v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_double(v[i]);
  }
  return out + "]";
}

std::uint64_t seed_from_env() {
  if (const char* env = std::getenv("CISJAC_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw ValidationError("CISJAC_SEED must be an unsigned integer");
    }
  }
  return 0;
}

// Options shared by the integrating subcommands.
struct RunOpts {
  double h = 1e-3;
  std::size_t steps = 0;
  double T = 0.0;
  bool has_T = false;
  std::string integrator = "midpoint";
  std::size_t record_every = 1;
  std::string out_path;
};

void add_run_opts(CLI::App* cmd, RunOpts& r, bool with_out = true) {
  cmd->add_option("--h", r.h, "step size")->capture_default_str();
  auto* steps = cmd->add_option("--steps", r.steps, "number of steps");
  auto* T = cmd->add_option("--T", r.T, "total time (steps = round(T/h))");
  steps->excludes(T);
  T->excludes(steps);
  cmd->add_option("--integrator", r.integrator, "midpoint, verlet or rk4")
      ->capture_default_str();
  cmd->add_option("--record-every", r.record_every,
                  "record every k-th step (0 treated as 1)")
      ->capture_default_str();
  if (with_out)
    cmd->add_option("--out", r.out_path, "write CSV here instead of stdout");
  cmd->parse_complete_callback([&r, T] { r.has_T = T->count() > 0; });
}

IntegratorConfig make_config(const RunOpts& r) {
  IntegratorConfig cfg;
  cfg.scheme = parse_scheme(r.integrator);
  if (!(r.h > 0.0)) throw ValidationError("step size must be positive");
  cfg.h = r.h;
  if (r.has_T) {
    if (!(r.T > 0.0)) throw ValidationError("total time must be positive");
    cfg.steps = static_cast<std::size_t>(std::llround(r.T / r.h));
    if (cfg.steps == 0) cfg.steps = 1;
  } else {
    cfg.steps = r.steps;
  }
  return cfg;
}

// Stream selection for CSV output.
class CsvSink {
 public:
  explicit CsvSink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw ValidationError("cannot open output file '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

PhaseState state_from_flag(const std::string& flag, std::size_t m, const char* what) {
  const std::vector<double> v = parse_list(flag, what);
  if (v.size() != 2 * m)
    throw ValidationError(std::string(what) + " must have 2m = " +
                          std::to_string(2 * m) + " entries, got " +
                          std::to_string(v.size()));
  return PhaseState::from_flat(v);
}

void describe_system(std::ostream& os, const LoadedSystem& ls) {
  os << "system: " << ls.display << " (m=" << ls.def.m << ", "
     << (ls.def.separable ? "separable" : "not separable") << ")\n";
  os << "fingerprint: " << hex_fingerprint(ls.def.fingerprint()) << "\n";
}

// ---- check ----------------------------------------------------------------

int do_check(const LoadedSystem& ls, std::size_t samples, std::uint64_t seed,
             const std::string& box_flag) {
  SampleBox box;
  if (!box_flag.empty()) {
    const std::vector<double> b = parse_list(box_flag, "--box");
    if (b.size() != 2 || !(b[0] < b[1]))
      throw ValidationError("--box needs 'lo,hi' with lo < hi");
    box.lo = b[0];
    box.hi = b[1];
  }

  describe_system(std::cout, ls);
  std::cout << "H: " << to_string(ls.def.H) << "\n";
  for (std::size_t k = 0; k < ls.def.F.size(); ++k)
    std::cout << "F" << (k + 1) << ": " << to_string(ls.def.F[k]) << "\n";

  const IntegrabilityReport base = validate_cis(ls.def, samples, seed, box, ls.exclude);
  const IntegrabilityReport lifted =
      validate_lifted_cis(ls.def, samples, seed, box, ls.exclude);

  const auto show = [](const char* label, const IntegrabilityReport& r) {
    std::cout << label << ": " << r.samples_evaluated << "/" << r.samples_requested
              << " points evaluated (" << r.samples_skipped << " skipped)\n";
    std::cout << "  max |{H,F}|  = " << format_double(r.max_h_bracket) << "\n";
    std::cout << "  max |{F,F}|  = " << format_double(r.max_ff_bracket) << "\n";
    std::cout << "  min independence (sigma ratio) = "
              << format_double(r.min_independence) << "\n";
  };
  std::cout << "seed: " << seed << ", box: [" << format_double(box.lo) << ", "
            << format_double(box.hi) << "]\n";
  show("phase space", base);
  show("tangent bundle", lifted);

  const bool ok = base.is_cis() && lifted.is_cis();
  std::cout << "verdict: "
            << (ok ? "completely integrable (lift included)"
                   : "NOT verified as completely integrable")
            << "\n";
  return ok ? 0 : 1;
}

// ---- brackets --------------------------------------------------------------

int do_brackets(const LoadedSystem& ls, std::size_t samples, std::uint64_t seed) {
  const SystemDef& sys = ls.def;
  describe_system(std::cout, ls);
  std::cout << "H: " << to_string(sys.H) << "\n";
  std::cout << "lift H: " << to_string(tangent_lift(sys.H)) << "\n";
  for (std::size_t k = 0; k < sys.F.size(); ++k) {
    std::cout << "F" << (k + 1) << ": " << to_string(sys.F[k]) << "\n";
    std::cout << "lift F" << (k + 1) << ": " << to_string(tangent_lift(sys.F[k]))
              << "\n";
  }
  for (std::size_t k = 0; k < sys.F.size(); ++k)
    std::cout << "{H, F" << (k + 1) << "}: " << to_string(poisson(sys.H, sys.F[k]))
              << "\n";
  for (std::size_t j = 0; j < sys.F.size(); ++j)
    for (std::size_t k = j + 1; k < sys.F.size(); ++k)
      std::cout << "{F" << (j + 1) << ", F" << (k + 1)
                << "}: " << to_string(poisson(sys.F[j], sys.F[k])) << "\n";

  // Numeric residuals of the bracket identities over random tangent points.
  Rng rng(seed);
  std::vector<TangentState> pts;
  for (std::size_t s = 0; s < samples && pts.size() < samples; ++s) {
    TangentState ts(sys.m);
    for (std::size_t i = 0; i < sys.m; ++i) {
      ts.x.q[i] = rng.uniform(-2.0, 2.0);
      ts.x.p[i] = rng.uniform(-2.0, 2.0);
      ts.dq[i] = rng.uniform(-2.0, 2.0);
      ts.dp[i] = rng.uniform(-2.0, 2.0);
    }
    if (ls.exclude && ls.exclude(ts.x)) continue;
    try {
      const EvalEnv env = make_env(ts, &sys.params);
      eval(sys.H, env);
      for (const Expr& f : sys.F) eval(f, env);
    } catch (const EvalError&) {
      continue;
    }
    pts.push_back(std::move(ts));
  }
  if (pts.empty()) throw ValidationError("no usable sample points for identity checks");

  std::vector<Expr> fns;
  fns.push_back(sys.H);
  for (const Expr& f : sys.F) fns.push_back(f);
  LiftIdentityResiduals worst;
  for (std::size_t a = 0; a < fns.size(); ++a)
    for (std::size_t b = a + 1; b < fns.size(); ++b) {
      const LiftIdentityResiduals r =
          check_lift_identities(fns[a], fns[b], pts, &sys.params);
      worst.pullback = std::max(worst.pullback, r.pullback);
      worst.mixed = std::max(worst.mixed, r.mixed);
      worst.lift = std::max(worst.lift, r.lift);
    }
  std::cout << "identity residuals over " << pts.size() << " points (seed " << seed
            << "):\n";
  std::cout << "  {f, g}_T for base f, g:          max = "
            << format_double(worst.pullback) << "\n";
  std::cout << "  {lift f, g}_T - {f, g}:          max = " << format_double(worst.mixed)
            << "\n";
  std::cout << "  {lift f, lift g}_T - lift{f, g}: max = " << format_double(worst.lift)
            << "\n";
  return 0;
}

// ---- simulate / tangent -----------------------------------------------------

int emit_trajectory_csv(const SystemDef& sys, const Trajectory& traj, bool tangent,
                        std::ostream& os) {
  const StateLayout layout{sys.m, sys.chart, tangent};
  std::vector<CompiledExpr> fs;
  for (const Expr& f : sys.F) fs.emplace_back(f, layout, sys.params);
  std::vector<CompiledExpr> lifted;
  if (tangent)
    for (const Expr& f : sys.F)
      lifted.emplace_back(tangent_lift(f, sys.chart), layout, sys.params);

  std::vector<std::string> cols = state_columns(sys.m, sys.chart, tangent);
  for (std::size_t k = 1; k <= fs.size(); ++k) cols.push_back("F" + std::to_string(k));
  for (std::size_t k = 1; k <= lifted.size(); ++k)
    cols.push_back("TF" + std::to_string(k));
  write_csv_header(os, cols);

  std::vector<double> scratch;
  std::vector<double> row;
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    row.assign(traj.states[i].begin(), traj.states[i].end());
    for (const CompiledExpr& f : fs) row.push_back(f.eval(traj.states[i], scratch));
    for (const CompiledExpr& f : lifted) row.push_back(f.eval(traj.states[i], scratch));
    write_csv_row(os, traj.times[i], row);
  }
  return 0;
}

int finish_run(const SystemDef& sys, const Trajectory& traj, bool tangent,
               const RunOpts& ropts) {
  CsvSink sink(ropts.out_path);
  emit_trajectory_csv(sys, traj, tangent, sink.stream());

  const long long steps =
      traj.times.empty()
          ? 0
          : std::llround((traj.times.back() - traj.times.front()) / traj.h);
  std::cerr << "integrated " << steps << " " << scheme_name(traj.scheme)
            << " steps of h=" << format_double(traj.h) << " ("
            << traj.times.size() << " rows recorded)\n";
  const DriftReport d = drift(sys, traj);
  std::cerr << "integral drift: max_k |F_k(t) - F_k(0)| = "
            << format_double(d.max_integral_drift()) << "\n";
  if (tangent)
    std::cerr << "lifted integral drift: max_k |TF_k(t) - TF_k(0)| = "
              << format_double(d.max_lifted_drift()) << "\n";
  if (!traj.ok()) {
    std::cerr << "error: step " << *traj.failed_step << " failed: " << traj.failure
              << "\n";
    return 3;
  }
  return 0;
}

int do_simulate(const LoadedSystem& ls, const std::string& x0_flag,
                const RunOpts& ropts) {
  const PhaseState x0 = state_from_flag(x0_flag, ls.def.m, "--x0");
  const IntegratorConfig cfg = make_config(ropts);
  const Trajectory traj =
      integrate_system(ls.def, x0, cfg, ropts.record_every ? ropts.record_every : 1);
  return finish_run(ls.def, traj, /*tangent=*/false, ropts);
}

int do_tangent(const LoadedSystem& ls, const std::string& x0_flag,
               const std::string& v0_flag, const RunOpts& ropts) {
  const PhaseState x0 = state_from_flag(x0_flag, ls.def.m, "--x0");
  const std::vector<double> v0 = parse_list(v0_flag, "--v0");
  if (v0.size() != 2 * ls.def.m)
    throw ValidationError("--v0 must have 2m = " + std::to_string(2 * ls.def.m) +
                          " entries, got " + std::to_string(v0.size()));
  TangentState s0;
  s0.x = x0;
  s0.dq.assign(v0.begin(), v0.begin() + static_cast<long>(ls.def.m));
  s0.dp.assign(v0.begin() + static_cast<long>(ls.def.m), v0.end());

  const IntegratorConfig cfg = make_config(ropts);
  const Trajectory traj =
      integrate_tangent(ls.def, s0, cfg, ropts.record_every ? ropts.record_every : 1);
  return finish_run(ls.def, traj, /*tangent=*/true, ropts);
}

// ---- reconstruct ------------------------------------------------------------

int do_reconstruct(const LoadedSystem& ls, const std::string& x0_flag,
                   const std::string& x0p_flag, double rank_tol, bool verify,
                   const RunOpts& ropts) {
  const PhaseState x0 = state_from_flag(x0_flag, ls.def.m, "--x0");
  const PhaseState x0p = state_from_flag(x0p_flag, ls.def.m, "--x0p");

  if (!verify) {
    const ReconstructionResult r = reconstruct_jacobi(ls.def, x0, x0p, rank_tol);
    std::cout << "delta F: " << list_str(r.delta_f) << "\n";
    std::cout << "singular ratio of dF(x0): " << format_double(r.singular_ratio)
              << "\n";
    std::cout << "v0: " << list_str(r.v0) << "\n";
    std::cout << "initial residual: " << format_double(r.initial_residual) << "\n";
    return 0;
  }

  const IntegratorConfig cfg = make_config(ropts);
  const PersistenceSeries series = verify_persistence(
      ls.def, x0, x0p, cfg, ropts.record_every ? ropts.record_every : 1);
  std::cout << "delta F: " << list_str(series.recon.delta_f) << "\n";
  std::cout << "singular ratio of dF(x0): " << format_double(series.recon.singular_ratio)
            << "\n";
  std::cout << "v0: " << list_str(series.recon.v0) << "\n";
  std::cout << "initial residual: " << format_double(series.recon.initial_residual)
            << "\n";
  std::cout << "persistence residual over " << cfg.steps << " steps of "
            << scheme_name(cfg.scheme) << " (h=" << format_double(cfg.h)
            << "): max = " << format_double(series.max_residual) << "\n";

  if (!ropts.out_path.empty()) {
    CsvSink sink(ropts.out_path);
    std::vector<std::string> cols;
    for (std::size_t k = 1; k <= ls.def.F.size(); ++k)
      cols.push_back("R" + std::to_string(k));
    write_csv_header(sink.stream(), cols);
    for (std::size_t i = 0; i < series.times.size(); ++i)
      write_csv_row(sink.stream(), series.times[i], series.residuals[i]);
  }
  return 0;
}

// ---- diverge ----------------------------------------------------------------

int do_diverge(const LoadedSystem& ls, const std::string& x0_flag, double epsilon,
               const std::string& dir_flag, const RunOpts& ropts) {
  const PhaseState x0 = state_from_flag(x0_flag, ls.def.m, "--x0");
  const std::vector<double> dir = parse_list(dir_flag, "--direction");
  if (dir.size() != 2 * ls.def.m)
    throw ValidationError("--direction must have 2m = " + std::to_string(2 * ls.def.m) +
                          " entries, got " + std::to_string(dir.size()));
  if (epsilon == 0.0) throw ValidationError("--epsilon must be nonzero");

  const IntegratorConfig cfg = make_config(ropts);
  const DivergenceSeries series = divergence_experiment(
      ls.def, x0, epsilon, dir, cfg, ropts.record_every ? ropts.record_every : 1);

  {
    CsvSink sink(ropts.out_path);
    std::vector<std::string> cols = {"D"};
    for (std::size_t k = 1; k <= ls.def.F.size(); ++k)
      cols.push_back("R" + std::to_string(k));
    write_csv_header(sink.stream(), cols);
    std::vector<double> row;
    for (std::size_t i = 0; i < series.persistence.times.size(); ++i) {
      row.clear();
      row.push_back(series.separation[i]);
      row.insert(row.end(), series.persistence.residuals[i].begin(),
                 series.persistence.residuals[i].end());
      write_csv_row(sink.stream(), series.persistence.times[i], row);
    }
  }

  std::cerr << "v0: " << list_str(series.persistence.recon.v0) << "\n";
  std::cerr << "max persistence residual: "
            << format_double(series.persistence.max_residual) << "\n";
  std::cerr << "final separation D(T): " << format_double(series.separation.back())
            << "\n";
  std::cerr << "growth factor D(T) / max(D, t<=1): "
            << format_double(series.growth_factor) << "\n";
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{
      "flow completely integrable Hamiltonian systems, lift them to the tangent "
      "bundle, and verify conservation, integrability and first-order "
      "reconstruction of integral offsets"};
  app.require_subcommand(1);

  std::string system_spec;
  std::uint64_t seed = 0;
  std::size_t check_samples = 256;
  std::size_t bracket_samples = 32;
  std::string box_flag;
  std::string x0_flag, x0p_flag, v0_flag, dir_flag;
  double rank_tol = 1e-8;
  double epsilon = 1e-3;
  bool verify = false;
  RunOpts sim_opts, tan_opts, rec_opts, div_opts;

  const auto add_system = [&system_spec](CLI::App* cmd) {
    // Subcommands take --h as the step size, so their help flag is long-only.
    cmd->set_help_flag("--help", "print this help message and exit");
    cmd->add_option("--system", system_spec,
                    "system file, or builtin: osc[:m=..,w=..], kepler[:mu=..], quartic")
        ->required();
  };

  CLI::App* check = app.add_subcommand(
      "check", "verify complete integrability of the system and its tangent lift");
  add_system(check);
  check->add_option("--samples", check_samples, "sample points")->capture_default_str();
  check->add_option("--seed", seed, "sampling seed (default: CISJAC_SEED or 0)");
  check->add_option("--box", box_flag, "sampling box as 'lo,hi' (default -2,2)");

  CLI::App* brackets = app.add_subcommand(
      "brackets", "print the symbolic brackets and lifted-bracket identity residuals");
  add_system(brackets);
  brackets->add_option("--samples", bracket_samples, "sample points")
      ->capture_default_str();
  brackets->add_option("--seed", seed, "sampling seed (default: CISJAC_SEED or 0)");

  CLI::App* simulate =
      app.add_subcommand("simulate", "integrate the base system; CSV to stdout");
  add_system(simulate);
  simulate->add_option("--x0", x0_flag, "initial state q1,..,p1,.. (use --x0=.. form)")
      ->required();
  add_run_opts(simulate, sim_opts);

  CLI::App* tangent = app.add_subcommand(
      "tangent", "integrate the tangent-lifted system; CSV to stdout");
  add_system(tangent);
  tangent->add_option("--x0", x0_flag, "initial base state q1,..,p1,..")->required();
  tangent->add_option("--v0", v0_flag, "initial tangent vector dq1,..,dp1,..")
      ->required();
  add_run_opts(tangent, tan_opts);

  CLI::App* reconstruct = app.add_subcommand(
      "reconstruct",
      "recover the connecting vector between two states from integral offsets");
  add_system(reconstruct);
  reconstruct->add_option("--x0", x0_flag, "base state")->required();
  reconstruct->add_option("--x0p", x0p_flag, "neighbor state")->required();
  reconstruct->add_option("--rank-tol", rank_tol, "singular-ratio gate")
      ->capture_default_str();
  reconstruct->add_flag("--verify", verify,
                        "also integrate and report the persistence residual");
  add_run_opts(reconstruct, rec_opts);

  CLI::App* diverge = app.add_subcommand(
      "diverge",
      "track a perturbed orbit against its first-order shadow; CSV of separation "
      "and persistence residuals");
  add_system(diverge);
  diverge->add_option("--x0", x0_flag, "base state")->required();
  diverge->add_option("--epsilon", epsilon, "perturbation size")->capture_default_str();
  diverge->add_option("--direction", dir_flag, "perturbation direction, 2m entries")
      ->required();
  add_run_opts(diverge, div_opts);

  try {
    seed = seed_from_env();
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    const LoadedSystem ls = load_system(system_spec);
    if (check->parsed()) return do_check(ls, check_samples, seed, box_flag);
    if (brackets->parsed()) return do_brackets(ls, bracket_samples, seed);
    if (simulate->parsed()) return do_simulate(ls, x0_flag, sim_opts);
    if (tangent->parsed()) return do_tangent(ls, x0_flag, v0_flag, tan_opts);
    if (reconstruct->parsed())
      return do_reconstruct(ls, x0_flag, x0p_flag, rank_tol, verify, rec_opts);
    if (diverge->parsed()) return do_diverge(ls, x0_flag, epsilon, dir_flag, div_opts);
    std::cerr << "error: no subcommand\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const EvalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace cisjac
