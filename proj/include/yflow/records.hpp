#pragma once

#include <span>
#include <vector>

#include "yflow/operators.hpp"

namespace yflow {

/// One row of trajectory diagnostics.
struct DiagnosticsRecord {
  double t = 0.0;
  /// Size of the step that produced this state (0 for the initial state).
  double dt = 0.0;
  double energy = 0.0;
  double min_u = 0.0;
  double max_u = 0.0;
  /// int u^{2n/(n-2)} dV0.
  double volume_g = 0.0;
  /// max |R_g - f|.
  double residual_sup = 0.0;
  /// int |R_g - f|^p dV_g for each order of the owning trajectory.
  std::vector<double> residual_lp;
  /// Trapezoid accumulation of int (R_g - f)^2 dV_g over t at record cadence.
  double dissipation_cum = 0.0;
};

/// {2, n/2, n^2/(2(n-2))}.
std::vector<double> default_lp_orders(int n);

/// int |w|^p u^{2n/(n-2)} dV0 for the defect w = R_g - f.
double defect_integral(const Background& bg, std::span<const double> u, std::span<const double> defect, double p);

/// Measures everything except dissipation_cum.
DiagnosticsRecord measure_state(const Background& bg, std::span<const double> u, std::span<const double> defect,
                                double t, double dt, std::span<const double> orders);

}  // namespace yflow
