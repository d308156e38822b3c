#include "qpnls/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/core.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include "qpnls/combin.hpp"
#include "qpnls/error.hpp"
#include "qpnls/oracle.hpp"
#include "qpnls/parallel.hpp"
#include "qpnls/picard.hpp"
#include "qpnls/snapshot.hpp"
#include "qpnls/verify.hpp"

namespace qpnls::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string num(double v) { return fmt::format("{:.17g}", v); }

std::string snapshot_name(int k) { return "snapshot_k" + std::to_string(k) + ".json"; }

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json mode_json(const ModeIndex& m) { return json::array({m.m, m.n}); }

// Everything a finished run directory holds, reloaded.
struct LoadedRun {
  json manifest;
  RunConfig config;
  std::string hash;
  PicardState state;
};

LoadedRun load_run(const fs::path& dir) {
  LoadedRun run;
  try {
    run.manifest = json::parse(read_text(dir / "manifest.json"));
  } catch (const json::exception& e) {
    throw ValidationError(std::string("manifest.json is malformed: ") + e.what());
  }
  try {
    run.config = parse_config(run.manifest.at("config").dump());
    run.hash = run.manifest.at("config_hash").get<std::string>();
    run.state.epsilon = run.manifest.at("epsilon").get<double>();
    run.state.converged = run.manifest.at("converged").get<bool>();
    const int k_final = run.manifest.at("k_final").get<int>();
    for (int k = 0; k <= k_final; ++k) {
      auto snap = read_snapshot(dir / snapshot_name(k));
      if (snap.config_hash != run.hash)
        throw ValidationError(snapshot_name(k) + " was produced by a different configuration");
      if (snap.k != k) throw ValidationError(snapshot_name(k) + " holds iterate " + std::to_string(snap.k));
      if (!run.state.iterates.empty() && !snap.field.same_shape(run.state.iterates.front()))
        throw ValidationError(snapshot_name(k) + " does not match the shape of snapshot_k0.json");
      run.state.iterates.push_back(std::move(snap.field));
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("manifest.json is malformed: ") + e.what());
  }
  if (config_hash(run.config) != run.hash)
    throw ValidationError("manifest config does not reproduce its recorded hash");
  for (int k = 1; k <= run.state.last_k(); ++k)
    run.state.cauchy.push_back(cauchy_diff(run.state.iterates[static_cast<std::size_t>(k)],
                                           run.state.iterates[static_cast<std::size_t>(k - 1)]));
  return run;
}

json report_json(const BoundReport& r, const ModeTable& table, const std::string& hash) {
  json j;
  j["bound"] = r.bound_name;
  j["worst_ratio"] = finite_or_null(r.worst_ratio);
  j["worst_location"] = {{"k", r.worst_location.k},
                         {"node", r.worst_location.node},
                         {"mode", mode_json(table[r.worst_location.mode])}};
  j["tol"] = r.tol;
  j["pass"] = r.pass;
  j["in_regime"] = r.in_regime;
  j["informational"] = r.informational;
  if (!r.note.empty()) j["note"] = r.note;
  j["config_hash"] = hash;
  return j;
}

struct Deviation {
  double norm = 0.0;
  double bound = 0.0;
  bool converged = false;
};

// Picard run at (epsilon, t) with the config's lattice; deviation at the last node.
Deviation deviation_run(const RunConfig& c, double epsilon, double t) {
  const auto basis = c.basis();
  const auto initial = generate_initial(basis, c.box(), c.profile, c.seed);
  const auto grid = TimeGrid::uniform(t, c.nodes);
  const auto state = iterate(initial, grid, epsilon, PicardOptions{c.k_max, c.tol});
  const auto node = grid.num_points() - 1;
  Deviation d;
  d.norm = asymptotic_deviation(state.latest(), state.iterates.front(), c.profile, c.rho1, c.rho2, node);
  const double amp = amplitude_constant(c.profile, c.nu1(), c.nu2());
  d.bound = amp * amp * amp * std::abs(epsilon) * t *
            deviation_constant(initial, c.profile, c.rho1, c.rho2);
  d.converged = state.converged;
  return d;
}

}  // namespace

int cmd_run(const RunConfig& c, const RunOptions& options, std::ostream& log) {
  const fs::path dir = options.out.value_or(fs::path(c.output_dir));
  const auto basis = FrequencyBasis::checked(c.omega, c.omega_prime, c.rx, c.ry);
  const double t_end = resolve_t_end(c);
  const bool expo = c.profile.kind == DecayProfile::Kind::exponential;
  const double horizon = regime_horizon(c.profile, c.nu1(), c.nu2(), c.epsilon);
  if (expo && t_end > horizon) {
    if (!options.override_te)
      throw ValidationError(fmt::format(
          "t_end = {} exceeds the proven horizon T_eps = {}; pass --override-te to run anyway",
          num(t_end), num(horizon)));
    fmt::print(log, "warning: t_end = {} exceeds T_eps = {}\n", num(t_end), num(horizon));
  }
  if (basis.periodic_degenerate())
    fmt::print(log, "note: nu_j = 1 in some direction; the data is periodic there\n");

  const auto initial = generate_initial(basis, c.box(), c.profile, c.seed);
  const auto grid = TimeGrid::uniform(t_end, c.nodes);
  const auto state = iterate(initial, grid, c.epsilon, PicardOptions{c.k_max, c.tol});
  const std::string hash = config_hash(c);

  json names = json::array();
  for (int k = 0; k <= state.last_k(); ++k) {
    write_snapshot(dir / snapshot_name(k), state.iterates[static_cast<std::size_t>(k)], k,
                   c.epsilon, hash);
    names.push_back(snapshot_name(k));
  }

  std::string diffs = "# config_hash: " + hash + "\nk,sup_diff\n";
  for (int k = 1; k <= state.last_k(); ++k) diffs += fmt::format("{},{}\n", k, num(state.diff(k)));
  write_text(dir / "diffs.csv", diffs);

  json m;
  m["config"] = json::parse(canonical_json(c));
  m["config_hash"] = hash;
  m["epsilon"] = c.epsilon;
  m["t_end"] = t_end;
  m["nodes"] = c.nodes;
  m["t_eps"] = expo ? finite_or_null(horizon) : json(nullptr);
  m["amplitude_constant"] = expo ? json(amplitude_constant(c.profile, c.nu1(), c.nu2())) : json(nullptr);
  m["margin_x"] = finite_or_null(independence_margin(FrequencyBasis(c.omega, {1.0}), c.rx, 0));
  m["margin_y"] = finite_or_null(independence_margin(FrequencyBasis({1.0}, c.omega_prime), 0, c.ry));
  m["margin"] = finite_or_null(independence_margin(basis, c.rx, c.ry));
  m["periodic_degenerate"] = basis.periodic_degenerate();
  m["in_regime"] = expo ? json(t_end <= horizon) : json(nullptr);
  m["converged"] = state.converged;
  m["k_final"] = state.last_k();
  m["snapshots"] = names;
  write_text(dir / "manifest.json", m.dump(2) + "\n");

  fmt::print(log, "run: k = {}, converged = {}, last diff = {}, wrote {}\n", state.last_k(),
             state.converged, state.cauchy.empty() ? "n/a" : num(state.cauchy.back()), dir.string());
  return kOk;
}

int cmd_tree(int k, std::optional<int> ell_cap, double x, std::ostream& csv) {
  if (k < 1) throw ValidationError("--k must be >= 1");
  if (!(x >= 0.0)) throw ValidationError("--x must be >= 0");
  const int cap = ell_cap.value_or(k <= 3 ? kNoCap : 12);
  const auto counts = branch_census(k, cap);
  const auto dees = inverse_dee_census(k, cap);
  const double closed = x < 0.5 ? majorant_closed_form(x) : std::numeric_limits<double>::quiet_NaN();
  csv << "ell,count,dee_sum,partial_sum,closed_form,tail_bound\n";
  double partial = 0.0;
  for (const auto& [ell, count] : counts) {
    const double dee_sum = dees.at(ell);
    partial += std::pow(x, ell) * dee_sum;
    csv << fmt::format("{},{},{},{},{},{}\n", ell, count, num(dee_sum), num(partial), num(closed),
                       num(majorant_tail_bound(ell, x)));
  }
  return kOk;
}

int cmd_verify(const fs::path& run_dir, const std::optional<RunConfig>& config, std::ostream& out) {
  auto run = load_run(run_dir);
  if (config && config_hash(*config) != run.hash)
    throw ValidationError("config hash " + config_hash(*config) + " does not match run directory hash " +
                          run.hash);
  const auto& table = run.state.iterates.front().table();
  std::vector<BoundReport> reports;
  reports.push_back(check_uniform_decay(run.state, run.config.profile));
  for (auto& r : check_cauchy(run.state, run.config.profile)) reports.push_back(std::move(r));
  reports.push_back(check_asymptotic_deviation(run.state, run.config.profile, run.config.rho1,
                                               run.config.rho2));
  bool failed = false;
  for (const auto& r : reports) {
    out << report_json(r, table, run.hash).dump() << "\n";
    failed = failed || (r.in_regime && !r.informational && !r.pass);
  }
  return failed ? kBoundFailure : kOk;
}

int cmd_sweep(const RunConfig& c, const fs::path& out_dir, std::ostream& log) {
  if (!c.sweep) throw ValidationError("config has no sweep section");
  const auto& s = *c.sweep;
  if (s.epsilons.size() < 3) throw ValidationError("a sweep needs at least 3 epsilon values");
  if (c.profile.kind != DecayProfile::Kind::exponential)
    throw ValidationError("sweeps need an exponential profile");
  FrequencyBasis::checked(c.omega, c.omega_prime, c.rx, c.ry);
  const std::string hash = config_hash(c);
  bool bound_failed = false;

  std::string horizon_csv = "# config_hash: " + hash +
                            "\nepsilon,t_end,deviation_norm,deviation_over_eps_t,in_regime,converged\n";
  for (double eps : s.epsilons) {
    const double t = std::min(s.horizon_constant * std::pow(eps, -1.0 + s.eta), s.t_cap);
    const bool regime = t <= regime_horizon(c.profile, c.nu1(), c.nu2(), eps);
    try {
      const auto d = deviation_run(c, eps, t);
      horizon_csv += fmt::format("{},{},{},{},{},{}\n", num(eps), num(t), num(d.norm),
                                 num(d.norm / (eps * t)), regime, d.converged);
      if (regime && d.norm > d.bound * (1.0 + kDefaultBoundTol)) bound_failed = true;
    } catch (const DivergenceError&) {
      horizon_csv += fmt::format("{},{},nan,nan,{},false\n", num(eps), num(t), regime);
    }
  }
  write_text(out_dir / "sweep.csv", horizon_csv);

  const double t_fix = s.fixed_t.value_or(resolve_t_end(c));
  std::string fixed_csv = "# config_hash: " + hash +
                          "\nepsilon,t,deviation_norm,deviation_over_eps_t,bound,bound_ratio,in_regime,converged\n";
  std::vector<double> lx, ly, scaled;
  for (double eps : s.epsilons) {
    const bool regime = t_fix <= regime_horizon(c.profile, c.nu1(), c.nu2(), eps);
    const auto d = deviation_run(c, eps, t_fix);
    fixed_csv += fmt::format("{},{},{},{},{},{},{},{}\n", num(eps), num(t_fix), num(d.norm),
                             num(d.norm / (eps * t_fix)), num(d.bound), num(d.norm / d.bound), regime,
                             d.converged);
    if (regime && d.norm > d.bound * (1.0 + kDefaultBoundTol)) bound_failed = true;
    lx.push_back(std::log(eps));
    ly.push_back(std::log(d.norm));
    scaled.push_back(d.norm / (eps * t_fix));
  }
  write_text(out_dir / "sweep_fixed_t.csv", fixed_csv);

  // Least-squares line through (log eps, log deviation).
  const double n = static_cast<double>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / n;
  const auto [lo, hi] = std::minmax_element(scaled.begin(), scaled.end());
  json fit;
  fit["slope"] = finite_or_null(slope);
  fit["intercept"] = finite_or_null(intercept);
  fit["fixed_t"] = t_fix;
  fit["spread"] = finite_or_null(*hi / *lo - 1.0);
  fit["config_hash"] = hash;
  write_text(out_dir / "sweep_fit.json", fit.dump(2) + "\n");
  fmt::print(log, "sweep: slope = {}, spread = {}, wrote {}\n", num(slope), num(*hi / *lo - 1.0),
             out_dir.string());
  return bound_failed ? kBoundFailure : kOk;
}

int cmd_oracle(const fs::path& run_dir, std::optional<int> steps, std::ostream& out) {
  auto run = load_run(run_dir);
  if (!run.state.converged)
    throw ValidationError("oracle comparison needs a converged run (raise k_max or loosen tol)");
  const auto& first = run.state.iterates.front();
  const auto& grid = first.grid();
  const int n_steps = steps.value_or(8 * grid.intervals());
  const auto ode = rk4_integrate(first.snapshot(0), run.state.epsilon, grid, n_steps);
  const double sup = compare(run.state, ode);
  write_text(run_dir / "oracle_trajectory.json", snapshot_json(ode.field, -1, run.state.epsilon, run.hash));
  json s;
  s["sup_diff"] = sup;
  s["mass_drift"] = ode.mass_drift;
  s["energy_drift"] = ode.energy_drift;
  s["steps"] = n_steps;
  s["config_hash"] = run.hash;
  write_text(run_dir / "oracle_summary.json", s.dump(2) + "\n");
  out << s.dump() << "\n";
  return kOk;
}

int cmd_synth(const fs::path& run_dir, const std::string& grid_spec, std::optional<int> node,
              std::ostream& csv) {
  double v[6];
  {
    std::string spec = grid_spec;
    std::replace(spec.begin(), spec.end(), ',', ' ');
    std::istringstream in(spec);
    for (double& x : v)
      if (!(in >> x)) throw ValidationError("--grid needs xmin,xmax,nx,ymin,ymax,ny");
    std::string rest;
    if (in >> rest) throw ValidationError("--grid needs exactly six values");
  }
  const int nx = static_cast<int>(v[2]), ny = static_cast<int>(v[5]);
  if (nx < 1 || ny < 1 || nx != v[2] || ny != v[5])
    throw ValidationError("--grid sample counts must be positive integers");
  auto run = load_run(run_dir);
  const auto& lin = run.state.iterates.front();
  const auto& fin = run.state.latest();
  const std::size_t at = node ? static_cast<std::size_t>(*node) : lin.num_nodes() - 1;
  if (node && (*node < 0 || at >= lin.num_nodes())) throw ValidationError("--node out of range");

  std::vector<std::pair<double, double>> pts;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      pts.emplace_back(nx == 1 ? v[0] : v[0] + (v[1] - v[0]) * i / (nx - 1),
                       ny == 1 ? v[3] : v[3] + (v[4] - v[3]) * j / (ny - 1));
  const auto u = synthesize(fin, at, pts);
  const auto u0 = synthesize(lin, at, pts);
  csv << "# config_hash: " << run.hash << "\n";
  csv << "x,y,re_u,im_u,abs_u,re_u0,im_u0\n";
  for (std::size_t p = 0; p < pts.size(); ++p)
    csv << fmt::format("{},{},{},{},{},{},{}\n", num(pts[p].first), num(pts[p].second),
                       num(u[p].real()), num(u[p].imag()), num(std::abs(u[p])), num(u0[p].real()),
                       num(u0[p].imag()));
  return kOk;
}

int main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Picard iteration and bound checks for cubic NLS with quasi-periodic data"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "cap on worker threads")->check(CLI::PositiveNumber);

  std::string config_path, out_path, run_dir, grid_spec;
  bool override_te = false;
  int k = 3, node = -1, steps = 0, ell_cap = -1;
  double x = 4.0 / 27.0;

  auto* run = app.add_subcommand("run", "run the Picard iteration and write snapshots");
  run->add_option("--config", config_path, "config JSON")->required();
  run->add_option("--out", out_path, "output directory (overrides output_dir)");
  run->add_flag("--override-te", override_te, "permit t_end beyond T_eps");

  auto* tree = app.add_subcommand("tree", "branch census and majorant table as CSV");
  tree->add_option("--k", k, "branch level");
  tree->add_option("--ell-cap", ell_cap, "largest ell enumerated");
  tree->add_option("--x", x, "majorant argument");
  tree->add_option("--out", out_path, "CSV path (default stdout)");

  auto* verify = app.add_subcommand("verify", "bound reports for a run directory as JSON lines");
  verify->add_option("run_dir", run_dir, "run directory")->required();
  verify->add_option("--config", config_path, "config the run must match");

  auto* sweep = app.add_subcommand("sweep", "epsilon sweep of the deviation from the linear flow");
  sweep->add_option("--config", config_path, "config JSON with a sweep section")->required();
  sweep->add_option("--out", out_path, "output directory (overrides output_dir)");

  auto* oracle = app.add_subcommand("oracle", "compare a converged run against RK4");
  oracle->add_option("run_dir", run_dir, "run directory")->required();
  oracle->add_option("--steps", steps, "RK4 steps (multiple of the node count)");

  auto* synth = app.add_subcommand("synth", "sample u and the linear solution in physical space");
  synth->add_option("run_dir", run_dir, "run directory")->required();
  synth->add_option("--grid", grid_spec, "xmin,xmax,nx,ymin,ymax,ny")->required();
  synth->add_option("--node", node, "time node (default last)");
  synth->add_option("--out", out_path, "CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidation;
  }

  // Writes to --out when given, else to `out`.
  auto emit = [&](const std::function<int(std::ostream&)>& body) {
    if (out_path.empty()) return body(out);
    std::ostringstream buf;
    const int code = body(buf);
    write_text(out_path, buf.str());
    return code;
  };

  try {
    if (threads > 0) set_threads(threads);
    if (*run) {
      RunOptions opts;
      if (!out_path.empty()) opts.out = out_path;
      opts.override_te = override_te;
      return cmd_run(load_config(config_path), opts, err);
    }
    if (*tree) {
      const std::optional<int> cap = ell_cap >= 0 ? std::optional<int>(ell_cap) : std::nullopt;
      return emit([&](std::ostream& o) { return cmd_tree(k, cap, x, o); });
    }
    if (*verify) {
      std::optional<RunConfig> cfg;
      if (!config_path.empty()) cfg = load_config(config_path);
      return cmd_verify(run_dir, cfg, out);
    }
    if (*sweep) {
      const auto cfg = load_config(config_path);
      return cmd_sweep(cfg, out_path.empty() ? fs::path(cfg.output_dir) : fs::path(out_path), err);
    }
    if (*oracle) return cmd_oracle(run_dir, steps > 0 ? std::optional<int>(steps) : std::nullopt, out);
    if (*synth) {
      const std::optional<int> at = node >= 0 ? std::optional<int>(node) : std::nullopt;
      return emit([&](std::ostream& o) { return cmd_synth(run_dir, grid_spec, at, o); });
    }
  } catch (const MissingArtifactError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kMissingArtifact;
  } catch (const DivergenceError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kDivergence;
  } catch (const BlowUpError& e) {
    fmt::print(err, "error: {} (t = {})\n", e.what(), num(e.time()));
    return kDivergence;
  } catch (const ValidationError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kValidation;
  } catch (const UnsupportedError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kValidation;
  } catch (const MalformedBranchError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kValidation;
  } catch (const Error& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kFailure;
  }
  return kFailure;
}

}  // namespace qpnls::cli
