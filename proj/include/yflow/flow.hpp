#pragma once

#include <functional>
#include <vector>

#include "yflow/errors.hpp"
#include "yflow/grid.hpp"
#include "yflow/operators.hpp"
#include "yflow/records.hpp"

namespace yflow {

/// Conformal factor at an accepted time level.
struct FlowState {
  ScalarField u;
  double t = 0.0;
  long long step = 0;
  double dt_last = 0.0;
};

struct FlowConfig {
  double cfl_fraction = 0.9;
  double t_max = 10.0;
  /// Converged once max |R_g - f| drops to this level.
  double residual_stop = 1e-8;
  double blowup_ceiling = 1e6;
  int record_every = 1;
  /// Orders p of the recorded int |R_g - f|^p dV_g; empty means default_lp_orders(n).
  std::vector<double> lp_orders;
  /// Stop after this many accepted steps; negative means no limit.
  long long max_steps = -1;

  void validate() const;
};

enum class Outcome { Converged, Timeout, BlowUp, StepLimit };

const char* to_string(Outcome outcome);
Outcome outcome_from_string(const std::string& name);

struct Trajectory {
  int dimension = 3;
  std::vector<double> lp_orders;
  std::vector<DiagnosticsRecord> records;
  FlowState final_state;
  Outcome outcome = Outcome::Timeout;
};

/// Everything the run loop needs to continue bitwise-identically.
struct RunCursor {
  FlowState state;
  double dissipation_cum = 0.0;
  double last_record_t = 0.0;
  double last_record_rate = 0.0;
  long long last_record_step = -1;
  std::vector<DiagnosticsRecord> records;
};

struct RunHooks {
  std::function<void(const FlowState&)> on_step;
  std::function<void(const FlowState&, const DiagnosticsRecord&)> on_record;
  std::function<void(const RunCursor&)> on_checkpoint;
  long long checkpoint_every = 0;
};

/// Raised when 40 successive step halvings cannot keep u positive and finite.
class PositivityCollapse : public Error {
 public:
  PositivityCollapse(FlowState snapshot, double dt_tried);
  const FlowState& snapshot() const noexcept { return snapshot_; }

 private:
  FlowState snapshot_;
};

/// A step failed during run(); carries everything recorded so far.
class RunFailure : public Error {
 public:
  RunFailure(const std::string& what, Trajectory partial);
  const Trajectory& partial() const noexcept { return partial_; }

 private:
  Trajectory partial_;
};

/// du/dt = -((n-2)/4)(R_g - f) u.
ScalarField velocity(const Background& bg, const ScalarField& u);

/// Explicit stability cap: cfl / (sum_i 2/h_i^2) / max D(u) with
/// D(u) = ((n-2)/4) c_n u^{1-N}, further capped by 0.5 / max ((n-2)/4)|R_g - f|.
double stable_dt(const Background& bg, const ScalarField& u, double cfl_fraction);

/// One classical RK4 step. Halves dt on loss of positivity or finiteness.
FlowState step(const Background& bg, const FlowState& state, double dt);

Trajectory run(const Background& bg, const ScalarField& u0, const FlowConfig& cfg, const RunHooks& hooks = {});
Trajectory resume(const Background& bg, RunCursor cursor, const FlowConfig& cfg, const RunHooks& hooks = {});

}  // namespace yflow
