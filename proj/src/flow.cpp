#include "yflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "yflow/parallel.hpp"

namespace yflow {

namespace {

using detail::parallel_for;

constexpr int kMaxHalvings = 40;

std::string collapse_message(const FlowState& s, double dt) {
  std::ostringstream os;
  os.precision(17);
  os << "positivity collapse at t = " << s.t << " (step " << s.step << "): " << kMaxHalvings
     << " halvings down to dt = " << dt << " could not keep u positive and finite";
  return os.str();
}

// Velocity from a precomputed defect w = R_g - f.
void velocity_from_defect(const Background& bg, std::span<const double> u, std::span<const double> w,
                          std::span<double> out) {
  const double k = bg.flow_factor();
  parallel_for(u.size(), [&](std::size_t j) { out[j] = -k * w[j] * u[j]; });
}

void velocity_raw(const Background& bg, std::span<const double> u, std::span<double> scratch,
                  std::span<double> out) {
  detail::curvature_defect(bg, u, scratch);
  velocity_from_defect(bg, u, scratch, out);
}

bool positive_finite(std::span<const double> v) {
  for (double x : v)
    if (!(x > 0.0) || !std::isfinite(x)) return false;
  return true;
}

// One RK4 step from u with the first stage given; false if any stage input or
// the result is not strictly positive and finite.
bool try_rk4(const Background& bg, std::span<const double> u, std::span<const double> k1, double dt,
             std::vector<double>& out) {
  const std::size_t n = u.size();
  std::vector<double> stage(n), k2(n), k3(n), k4(n), scratch(n);

  parallel_for(n, [&](std::size_t j) { stage[j] = u[j] + 0.5 * dt * k1[j]; });
  if (!positive_finite(stage)) return false;
  velocity_raw(bg, stage, scratch, k2);

  parallel_for(n, [&](std::size_t j) { stage[j] = u[j] + 0.5 * dt * k2[j]; });
  if (!positive_finite(stage)) return false;
  velocity_raw(bg, stage, scratch, k3);

  parallel_for(n, [&](std::size_t j) { stage[j] = u[j] + dt * k3[j]; });
  if (!positive_finite(stage)) return false;
  velocity_raw(bg, stage, scratch, k4);

  out.resize(n);
  const double w = dt / 6.0;
  parallel_for(n, [&](std::size_t j) { out[j] = u[j] + w * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]); });
  return positive_finite(out);
}

FlowState advance(const Background& bg, const FlowState& state, std::span<const double> k1, double dt) {
  std::vector<double> out;
  double trial = dt;
  for (int halvings = 0; halvings <= kMaxHalvings; ++halvings) {
    if (try_rk4(bg, state.u.values(), k1, trial, out))
      return FlowState{ScalarField(state.u.grid_ptr(), std::move(out)), state.t + trial, state.step + 1, trial};
    if (halvings < kMaxHalvings) trial *= 0.5;
  }
  throw PositivityCollapse(state, trial);
}

double stable_dt_from(const Background& bg, std::span<const double> u, std::span<const double> w, double cfl) {
  const GridSpec& g = bg.grid();
  double denom = 0.0;
  for (double ih2 : g.inv_spacing_sq()) denom += 2.0 * ih2;
  const double umin = *std::min_element(u.begin(), u.end());
  const double k = bg.flow_factor();
  const double dmax = k * bg.c_n() * std::pow(umin, 1.0 - bg.N());
  const double diffusion_cap = cfl / denom / dmax;
  double rate = 0.0;
  for (double x : w) rate = std::max(rate, k * std::abs(x));
  const double reaction_cap = rate > 0.0 ? 0.5 / rate : std::numeric_limits<double>::infinity();
  return std::min(diffusion_cap, reaction_cap);
}

void check_cfl(double cfl) {
  if (!(cfl > 0.0 && cfl <= 1.0)) throw InvalidArgument("cfl_fraction must lie in (0, 1]");
}

}  // namespace

PositivityCollapse::PositivityCollapse(FlowState snapshot, double dt_tried)
    : Error(collapse_message(snapshot, dt_tried)), snapshot_(std::move(snapshot)) {}

RunFailure::RunFailure(const std::string& what, Trajectory partial) : Error(what), partial_(std::move(partial)) {}

void FlowConfig::validate() const {
  check_cfl(cfl_fraction);
  if (!(t_max > 0.0)) throw InvalidArgument("t_max must be positive");
  if (!(residual_stop > 0.0)) throw InvalidArgument("residual_stop must be positive");
  if (!(blowup_ceiling > 0.0)) throw InvalidArgument("blowup_ceiling must be positive");
  if (record_every < 1) throw InvalidArgument("record_every must be at least 1");
  for (double p : lp_orders)
    if (!(p >= 1.0)) throw InvalidArgument("lp_orders must be >= 1");
}

const char* to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::Converged: return "converged";
    case Outcome::Timeout: return "timeout";
    case Outcome::BlowUp: return "blow-up";
    case Outcome::StepLimit: return "step-limit";
  }
  return "unknown";
}

Outcome outcome_from_string(const std::string& name) {
  for (auto o : {Outcome::Converged, Outcome::Timeout, Outcome::BlowUp, Outcome::StepLimit})
    if (name == to_string(o)) return o;
  throw InvalidArgument("unknown outcome '" + name + "'");
}

ScalarField velocity(const Background& bg, const ScalarField& u) {
  require_same_grid(bg.grid(), u.grid());
  require_positive(u.values());
  std::vector<double> scratch(u.size()), out(u.size());
  velocity_raw(bg, u.values(), scratch, out);
  return ScalarField(u.grid_ptr(), std::move(out));
}

double stable_dt(const Background& bg, const ScalarField& u, double cfl_fraction) {
  require_same_grid(bg.grid(), u.grid());
  require_positive(u.values());
  check_cfl(cfl_fraction);
  std::vector<double> w(u.size());
  detail::curvature_defect(bg, u.values(), w);
  return stable_dt_from(bg, u.values(), w, cfl_fraction);
}

FlowState step(const Background& bg, const FlowState& state, double dt) {
  require_same_grid(bg.grid(), state.u.grid());
  require_positive(state.u.values());
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("step size must be positive and finite");
  std::vector<double> scratch(state.u.size()), k1(state.u.size());
  velocity_raw(bg, state.u.values(), scratch, k1);
  return advance(bg, state, k1, dt);
}

Trajectory run(const Background& bg, const ScalarField& u0, const FlowConfig& cfg, const RunHooks& hooks) {
  require_same_grid(bg.grid(), u0.grid());
  require_positive(u0.values());
  RunCursor cursor;
  cursor.state = FlowState{u0, 0.0, 0, 0.0};
  return resume(bg, std::move(cursor), cfg, hooks);
}

Trajectory resume(const Background& bg, RunCursor cursor, const FlowConfig& cfg, const RunHooks& hooks) {
  cfg.validate();
  require_same_grid(bg.grid(), cursor.state.u.grid());
  require_positive(cursor.state.u.values());

  Trajectory traj;
  traj.dimension = bg.n();
  traj.lp_orders = cfg.lp_orders.empty() ? default_lp_orders(bg.n()) : cfg.lp_orders;
  traj.records = std::move(cursor.records);

  FlowState state = std::move(cursor.state);
  const std::size_t n = state.u.size();
  std::vector<double> w(n), k1(n);
  detail::curvature_defect(bg, state.u.values(), w);

  double cum = cursor.dissipation_cum;
  double last_t = cursor.last_record_t;
  double last_rate = cursor.last_record_rate;
  long long last_step = cursor.last_record_step;

  auto record = [&]() {
    auto rec = measure_state(bg, state.u.values(), w, state.t, state.dt_last, traj.lp_orders);
    const double rate = defect_integral(bg, state.u.values(), w, 2.0);
    if (last_step >= 0) cum += 0.5 * (state.t - last_t) * (last_rate + rate);
    rec.dissipation_cum = cum;
    last_t = state.t;
    last_rate = rate;
    last_step = state.step;
    traj.records.push_back(rec);
    if (hooks.on_record) hooks.on_record(state, traj.records.back());
  };

  if (last_step < 0) record();

  const double t_eps = 1e-12 * std::max(1.0, cfg.t_max);
  try {
    while (true) {
      double sup = 0.0;
      for (double x : w) sup = std::max(sup, std::abs(x));
      const double umax = state.u.max();
      if (sup <= cfg.residual_stop) {
        traj.outcome = Outcome::Converged;
        break;
      }
      if (umax >= cfg.blowup_ceiling) {
        traj.outcome = Outcome::BlowUp;
        break;
      }
      if (state.t >= cfg.t_max - t_eps) {
        traj.outcome = Outcome::Timeout;
        break;
      }
      if (cfg.max_steps >= 0 && state.step >= cfg.max_steps) {
        traj.outcome = Outcome::StepLimit;
        break;
      }

      double dt = stable_dt_from(bg, state.u.values(), w, cfg.cfl_fraction);
      dt = std::min(dt, cfg.t_max - state.t);
      velocity_from_defect(bg, state.u.values(), w, k1);
      state = advance(bg, state, k1, dt);
      detail::curvature_defect(bg, state.u.values(), w);
      if (hooks.on_step) hooks.on_step(state);
      if (state.step % cfg.record_every == 0) record();
      if (hooks.checkpoint_every > 0 && hooks.on_checkpoint && state.step % hooks.checkpoint_every == 0)
        hooks.on_checkpoint(RunCursor{state, cum, last_t, last_rate, last_step, traj.records});
    }
  } catch (const PositivityCollapse& e) {
    traj.final_state = e.snapshot();
    throw RunFailure(e.what(), std::move(traj));
  }

  if (last_step != state.step) record();
  traj.final_state = std::move(state);
  return traj;
}

}  // namespace yflow
