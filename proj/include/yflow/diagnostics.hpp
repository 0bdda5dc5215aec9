#pragma once

#include <optional>
#include <string>
#include <vector>

#include "yflow/flow.hpp"
#include "yflow/hypothesis.hpp"

namespace yflow {

/// Relative mismatch between the energy drop E(0) - E(t_end) and
/// ((n-2)/2) times the accumulated int int (R_g - f)^2 dV_g dt.
/// Needs at least 10 records; returns 0 when both sides vanish.
double dissipation_identity_error(const Trajectory& traj);

/// Centered time difference of R_g over three equally spaced states against
/// (n-1) Lap_g (R_g - f) + R_g (R_g - f) at the middle state. Relative L2 error.
double curvature_evolution_error(const Background& bg, const FlowState& s0, const FlowState& s1,
                                 const FlowState& s2);

/// Terms of the L^p evolution identity at the middle of a 3-state window.
struct LpIdentityTerms {
  double lhs = 0.0;       ///< centered difference of int |w|^p dV_g
  double gradient = 0.0;  ///< -(4(n-1)(p-1)/p) int u^2 |grad |w|^{p/2}|^2 dV0
  double cubic = 0.0;     ///< (p - n/2) int w |w|^p dV_g
  double forcing = 0.0;   ///< p int f |w|^p dV_g
  double rhs() const { return gradient + cubic + forcing; }
};

LpIdentityTerms lp_identity_terms(const Background& bg, const FlowState& s0, const FlowState& s1,
                                  const FlowState& s2, double p);

/// |lhs - rhs| / |rhs| for the L^p evolution identity; 0 when both vanish.
/// p must exceed 1; p < 2 is rejected when R_g - f nearly vanishes somewhere.
double lp_identity_error(const Background& bg, const FlowState& s0, const FlowState& s1, const FlowState& s2,
                     double p = 2.0);

struct EnvelopeViolation {
  std::size_t record = 0;
  double t = 0.0;
  std::string kind;  ///< "lower", "upper" or "trap"
  double value = 0.0;
  double bound = 0.0;
};

struct EnvelopeReport {
  double C0 = 0.0;  ///< +inf when f vanishes identically
  double C1 = 0.0;
  double lower_bound = 0.0;
  bool lower_applicable = true;
  double trap_bound = 0.0;
  bool trap_checked = false;
  std::vector<EnvelopeViolation> violations;
  /// Least-squares line through log int |w|^p dV_g versus t, p = n^2/(2(n-2)).
  double lp_log_slope = 0.0;
  double lp_log_intercept = 0.0;
  std::size_t lp_points = 0;
  bool ok() const { return violations.empty(); }
};

/// Per-record maximum-principle envelopes. The initial extrema come from the
/// first record. With a certificate the run must also stay below max ubar.
EnvelopeReport envelope_check(const Background& bg, const Trajectory& traj,
                              const SupersolutionCertificate* certificate = nullptr, double tol = 1e-8);

struct DecayOrder {
  double p = 0.0;
  double final_value = 0.0;
  bool below_threshold = false;
  bool eventually_decreasing = false;
};

struct DecayReport {
  bool applicable = true;
  double threshold = 0.0;
  std::vector<DecayOrder> orders;
  bool ok() const;
};

/// Final value below threshold and last quarter of the records monotone
/// within a 5% ripple, for each order. Blow-up runs are not applicable.
DecayReport decay_check(const Trajectory& traj, const std::vector<double>& orders = {}, double threshold = 1e-8);

struct GrowthFit {
  double exponent = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double t_begin = 0.0;
  double t_end = 0.0;
  std::size_t points = 0;
};

/// Slope of log max_u against log t over the last decade [t_end/10, t_end].
GrowthFit growth_fit(const Trajectory& traj);
/// Same fit on raw samples.
GrowthFit growth_fit(const std::vector<double>& t, const std::vector<double>& max_u);

/// int_mask u^N phi dV0 after rescaling phi to unit mass on the mask.
double weighted_mass(const Background& bg, const ScalarField& u, const ScalarField& phi, const SubdomainMask& mask);

}  // namespace yflow
