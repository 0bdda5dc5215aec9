#include "yflow/app.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>

#include "json.hpp"
#include "yflow/io.hpp"
#include "yflow/parallel.hpp"

namespace yflow {

namespace {

using nlohmann::json;

// JSON has no infinities; they are written as strings.
json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return nullptr;
  return v > 0 ? "inf" : "-inf";
}

std::filesystem::path out_dir(const AppOptions& opt, const Scenario& sc) {
  std::filesystem::path dir = opt.out;
  if (dir.empty()) dir = !sc.out_dir.empty() ? sc.out_dir : std::filesystem::path("out") / sc.name;
  std::filesystem::create_directories(dir);
  return dir;
}

Scenario load(const AppOptions& opt) {
  if (opt.scenario.empty()) throw ScenarioError("--scenario is required");
  if (opt.threads > 0) set_num_threads(opt.threads);
  return load_scenario(opt.scenario);
}

void emit(const std::filesystem::path& path, const json& j, std::ostream& log) {
  std::ofstream out(path, std::ios::trunc);
  out << j.dump(2) << '\n';
  if (!out) throw ScenarioError("cannot write '" + path.string() + "'");
  log << j.dump(2) << '\n';
}

FlowConfig effective_config(const Scenario& sc, const Until& until) {
  FlowConfig cfg = sc.flow;
  if (until.t) cfg.t_max = *until.t;
  if (until.steps) cfg.max_steps = *until.steps;
  cfg.validate();
  return cfg;
}

json records_summary(const Trajectory& traj) {
  json j;
  j["records"] = traj.records.size();
  if (!traj.records.empty()) {
    const auto& r = traj.records.back();
    j["t_final"] = num(r.t);
    j["energy_final"] = num(r.energy);
    j["min_u_final"] = num(r.min_u);
    j["max_u_final"] = num(r.max_u);
    j["residual_sup_final"] = num(r.residual_sup);
  }
  return j;
}

struct Check {
  std::string name;
  bool pass;
  json detail;
};

json to_json(const EnvelopeReport& rep) {
  json v = json::array();
  for (std::size_t i = 0; i < rep.violations.size() && i < 20; ++i) {
    const auto& x = rep.violations[i];
    v.push_back({{"record", x.record}, {"t", num(x.t)}, {"kind", x.kind}, {"value", num(x.value)},
                 {"bound", num(x.bound)}});
  }
  return {{"C0", num(rep.C0)},
          {"C1", num(rep.C1)},
          {"lower_bound", num(rep.lower_bound)},
          {"lower_applicable", rep.lower_applicable},
          {"trap_checked", rep.trap_checked},
          {"trap_bound", num(rep.trap_bound)},
          {"violation_count", rep.violations.size()},
          {"violations", v},
          {"lp_log_slope", num(rep.lp_log_slope)},
          {"lp_log_intercept", num(rep.lp_log_intercept)},
          {"lp_points", rep.lp_points}};
}

json to_json(const DecayReport& rep) {
  json orders = json::array();
  for (const auto& o : rep.orders)
    orders.push_back({{"p", o.p},
                      {"final", num(o.final_value)},
                      {"below_threshold", o.below_threshold},
                      {"eventually_decreasing", o.eventually_decreasing}});
  return {{"applicable", rep.applicable}, {"threshold", rep.threshold}, {"orders", orders}};
}

json to_json(const SupersolutionCertificate& c) {
  return {{"delta", num(c.delta)},         {"m0", num(c.m0)},
          {"m1", num(c.m1)},               {"lambda_D", num(c.lambda_D)},
          {"min_L_ubar", num(c.min_L_ubar)}, {"delta_lo", num(c.delta_lo)},
          {"delta_hi", num(c.delta_hi)},   {"c_omega", num(c.c_omega)},
          {"sup_f_omega", num(c.sup_f_omega)}, {"inf_absf_complement", num(c.inf_absf_complement)},
          {"max_ubar", num(c.ubar.max())}};
}

// Runs every assertion the scenario requests on a finished trajectory.
std::vector<Check> assess(const Scenario& sc, const Trajectory& traj, const ScalarField* final_u) {
  const auto& d = sc.diagnostics;
  const Background& bg = sc.bg();
  std::vector<Check> checks;

  if (!d.expect_outcome.empty())
    checks.push_back({"outcome", d.expect_outcome == to_string(traj.outcome),
                      {{"expected", d.expect_outcome}, {"actual", to_string(traj.outcome)}}});

  if (d.energy_monotone) {
    std::size_t bad = 0;
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < traj.records.size(); ++i) {
      const double e0 = traj.records[i].energy, e1 = traj.records[i + 1].energy;
      const double excess = (e1 - e0) / (1.0 + std::abs(e0));
      worst = std::max(worst, excess);
      if (excess > d.energy_tol) ++bad;
    }
    checks.push_back({"energy_monotone", bad == 0, {{"violations", bad}, {"worst_relative_increase", num(worst)}}});
  }

  if (d.envelopes) {
    const auto rep = envelope_check(bg, traj, sc.certificate ? &*sc.certificate : nullptr);
    checks.push_back({"envelopes", rep.ok(), to_json(rep)});
  }

  if (d.decay) {
    const auto rep = decay_check(traj, d.decay_orders, d.decay_threshold);
    checks.push_back({"decay", rep.ok(), to_json(rep)});
  }

  if (!std::isnan(d.dissipation_max_error)) {
    const double err = dissipation_identity_error(traj);
    checks.push_back({"dissipation_identity", err <= d.dissipation_max_error,
                      {{"relative_error", num(err)}, {"limit", d.dissipation_max_error}}});
  }

  if (!std::isnan(d.growth_min_exponent)) {
    if (traj.outcome != Outcome::BlowUp) {
      checks.push_back({"growth", false, {{"reason", "trajectory did not blow up"}}});
    } else {
      const auto fit = growth_fit(traj);
      checks.push_back({"growth",
                        fit.exponent >= d.growth_min_exponent,
                        {{"exponent", num(fit.exponent)},
                         {"r_squared", num(fit.r_squared)},
                         {"t_begin", num(fit.t_begin)},
                         {"t_end", num(fit.t_end)},
                         {"limit", d.growth_min_exponent}}});
    }
  }

  if (final_u && !std::isnan(d.final_residual_max)) {
    const double r = stationary_residual(bg, *final_u);
    checks.push_back({"final_residual", r <= d.final_residual_max,
                      {{"stationary_residual", num(r)}, {"limit", d.final_residual_max}}});
  }

  if (final_u && !std::isnan(d.mass_growth_factor)) {
    const auto omega = realize_mask(bg, sc.mask);
    const auto eig = dirichlet_eigen(bg, omega, sc.supersolution.eigen_tol);
    const double m0 = weighted_mass(bg, sc.u0, eig.phi, omega);
    const double m1 = weighted_mass(bg, *final_u, eig.phi, omega);
    checks.push_back({"weighted_mass_growth", m1 >= d.mass_growth_factor * m0,
                      {{"initial", num(m0)}, {"final", num(m1)}, {"factor", num(m1 / m0)},
                       {"limit", d.mass_growth_factor}}});
  }
  return checks;
}

int finish(json report, const std::vector<Check>& checks, const std::filesystem::path& path, std::ostream& log) {
  bool ok = true;
  json arr = json::array();
  for (const auto& c : checks) {
    ok = ok && c.pass;
    arr.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  }
  report["checks"] = arr;
  report["pass"] = ok;
  emit(path, report, log);
  return ok ? 0 : 1;
}

int drive(const Scenario& sc, const AppOptions& opt, std::optional<RunCursor> cursor, std::ostream& log,
          const char* command) {
  const auto dir = out_dir(opt, sc);
  const FlowConfig cfg = effective_config(sc, opt.until);
  const auto orders = cfg.lp_orders.empty() ? default_lp_orders(sc.grid->dim()) : cfg.lp_orders;

  RunHooks hooks;
  hooks.checkpoint_every = opt.checkpoint_every;
  if (opt.checkpoint_every > 0)
    hooks.on_checkpoint = [&](const RunCursor& c) { save_checkpoint(dir / "checkpoint", c, orders); };

  json report{{"command", command}, {"scenario", sc.name}};
  Trajectory traj;
  try {
    traj = cursor ? resume(sc.bg(), std::move(*cursor), cfg, hooks) : run(sc.bg(), sc.u0, cfg, hooks);
  } catch (const RunFailure& e) {
    write_csv(dir / "trajectory.csv", e.partial());
    report["error"] = e.what();
    report["trajectory"] = records_summary(e.partial());
    return finish(report, {{"run", false, {{"error", e.what()}}}}, dir / "summary.json", log);
  }
  write_csv(dir / "trajectory.csv", traj);
  save_snapshot(dir / "final_u.yflo", traj.final_state.u);
  report["outcome"] = to_string(traj.outcome);
  report["steps"] = traj.final_state.step;
  report["trajectory"] = records_summary(traj);
  if (sc.certificate) report["certificate"] = to_json(*sc.certificate);
  return finish(report, assess(sc, traj, &traj.final_state.u), dir / "summary.json", log);
}

}  // namespace

Until parse_until(const std::string& text) {
  Until u;
  if (text.empty()) return u;
  try {
    std::size_t used = 0;
    if (text.rfind("steps:", 0) == 0) {
      const auto s = text.substr(6);
      const long long v = std::stoll(s, &used);
      if (used != s.size() || v < 0) throw std::invalid_argument(text);
      u.steps = v;
    } else {
      const auto s = text.rfind("t:", 0) == 0 ? text.substr(2) : text;
      const double v = std::stod(s, &used);
      if (used != s.size() || !(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(text);
      u.t = v;
    }
  } catch (const std::exception&) {
    throw InvalidArgument("--until expects t:<time>, steps:<count> or a positive time, got '" + text + "'");
  }
  return u;
}

int cmd_run(const AppOptions& opt, std::ostream& log) {
  const auto sc = load(opt);
  return drive(sc, opt, std::nullopt, log, "run");
}

int cmd_resume(const AppOptions& opt, std::ostream& log) {
  const auto sc = load(opt);
  const auto dir = out_dir(opt, sc);
  auto cursor = load_checkpoint(dir / "checkpoint", sc.grid);
  return drive(sc, opt, std::move(cursor), log, "resume");
}

int cmd_eigen(const AppOptions& opt, std::ostream& log) {
  const auto sc = load(opt);
  const auto dir = out_dir(opt, sc);
  const auto omega = realize_mask(sc.bg(), sc.mask);
  const auto eig = dirichlet_eigen(sc.bg(), omega, sc.supersolution.eigen_tol);
  if (!eig.empty_domain) save_snapshot(dir / "phi.yflo", eig.phi);
  json report{{"command", "eigen"},
              {"scenario", sc.name},
              {"mask_points", omega.count()},
              {"lambda", num(eig.lambda)},
              {"residual", num(eig.residual)},
              {"iterations", eig.iterations},
              {"empty_domain", eig.empty_domain}};
  return finish(report, {}, dir / "eigen.json", log);
}

int cmd_check(const AppOptions& opt, std::ostream& log) {
  const auto sc = load(opt);
  const auto dir = out_dir(opt, sc);
  const auto omega = realize_mask(sc.bg(), sc.mask);
  const auto rep = check_hypotheses(sc.bg(), omega, sc.supersolution);
  json report{{"command", "check"},
              {"scenario", sc.name},
              {"omega_points", omega.count()},
              {"omega_empty", omega.is_empty()},
              {"lambda_omega", num(rep.lambda_omega)},
              {"sup_f_omega", num(rep.sup_f_omega)},
              {"max_f_complement", num(rep.max_f_complement)},
              {"inf_absf_complement", num(rep.inf_absf_complement)},
              {"c_omega", num(rep.c_omega)},
              {"h1", rep.h1_holds},
              {"h2", rep.h2_holds},
              {"h2_evaluated", rep.h2_evaluated}};
  return finish(report, {{"h1", rep.h1_holds, {}}, {"h2", rep.h2_holds, {}}}, dir / "check.json", log);
}

int cmd_supersolution(const AppOptions& opt, std::ostream& log) {
  const auto sc = load(opt);
  const auto dir = out_dir(opt, sc);
  const auto omega = realize_mask(sc.bg(), sc.mask);
  json report{{"command", "supersolution"}, {"scenario", sc.name}};
  try {
    const auto cert = build_supersolution(sc.bg(), omega, sc.supersolution);
    save_snapshot(dir / "ubar.yflo", cert.ubar);
    report["certificate"] = to_json(cert);
    return finish(report, {{"verified", cert.min_L_ubar >= -sc.supersolution.verify_tol, {}}},
                  dir / "certificate.json", log);
  } catch (const H2Violated& e) {
    report["error"] = e.what();
    report["delta_lo"] = num(e.delta_lo());
    report["delta_hi"] = num(e.delta_hi());
    report["c_omega"] = num(e.c_omega());
    return finish(report, {{"window_nonempty", false, {}}}, dir / "certificate.json", log);
  }
}

int cmd_verify(const AppOptions& opt, std::ostream& log) {
  const auto sc = load(opt);
  const auto dir = out_dir(opt, sc);
  auto traj = read_csv(dir / "trajectory.csv", sc.grid->dim());
  std::ifstream sin(dir / "summary.json");
  if (!sin) throw ScenarioError("no summary.json in '" + dir.string() + "'");
  const auto summary = json::parse(sin);
  if (!summary.contains("outcome")) throw ScenarioError("summary.json records a failed run");
  traj.outcome = outcome_from_string(summary["outcome"].get<std::string>());
  const auto u = load_snapshot(dir / "final_u.yflo", sc.grid);
  json report{{"command", "verify"}, {"scenario", sc.name}, {"outcome", to_string(traj.outcome)}};
  report["trajectory"] = records_summary(traj);
  return finish(report, assess(sc, traj, &u), dir / "verify.json", log);
}

int run_command(const std::string& name, const AppOptions& opt, std::ostream& log, std::ostream& err) {
  try {
    if (name == "run") return cmd_run(opt, log);
    if (name == "resume") return cmd_resume(opt, log);
    if (name == "eigen") return cmd_eigen(opt, log);
    if (name == "check") return cmd_check(opt, log);
    if (name == "supersolution") return cmd_supersolution(opt, log);
    if (name == "verify") return cmd_verify(opt, log);
    throw InvalidArgument("unknown subcommand '" + name + "'");
  } catch (const std::exception& e) {
    json failure{{"command", name}, {"pass", false}, {"error", e.what()}};
    err << failure.dump() << '\n';
    return 2;
  }
}

}  // namespace yflow
