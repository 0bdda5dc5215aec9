#pragma once

#include "yflow/grid.hpp"
#include "yflow/operators.hpp"
#include "yflow/spectral.hpp"

namespace yflow {

/// Outcome of testing the sign condition (H1) and the ratio condition (H2)
/// on a candidate open set omega.
struct HypothesisReport {
  SubdomainMask omega;
  double lambda_omega = 0.0;
  bool h1_holds = false;
  /// sup of f over omega (-inf when omega is empty).
  double sup_f_omega = 0.0;
  /// inf of |f| over the complement (+inf when omega is the whole torus).
  double inf_absf_complement = 0.0;
  /// max of f over the complement (-inf when omega is the whole torus).
  double max_f_complement = 0.0;
  /// C_Omega = lambda_D m0^N / m1 of the construction; NaN until computed.
  double c_omega = 0.0;
  bool h2_holds = false;
  bool h2_evaluated = false;
};

/// Certificate that ubar satisfies -c_n Lap ubar + R0 ubar - f ubar^N >= 0.
struct SupersolutionCertificate {
  ScalarField ubar;
  double delta = 0.0;
  double m0 = 0.0;
  double m1 = 0.0;
  double lambda_D = 0.0;
  double min_L_ubar = 0.0;
  double delta_lo = 0.0;
  double delta_hi = 0.0;
  double c_omega = 0.0;
  double sup_f_omega = 0.0;
  double inf_absf_complement = 0.0;
};

/// Auxiliary objects of the supersolution construction: the enlarged set D,
/// its eigenfunction, the cutoff chi and base = chi phi + 1 - chi.
struct SupersolutionConstruction {
  SubdomainMask D;
  EigenResult eigen;
  ScalarField chi;
  ScalarField base;
  double m0 = 0.0;
  double m1 = 0.0;
  double lambda_D = 0.0;
};

struct SupersolutionOptions {
  int dilation = 2;
  int band = 2;
  double eigen_tol = 1e-10;
  /// Certificates with min L(ubar) below -verify_tol are rejected.
  double verify_tol = 1e-9;
};

/// {x : f(x) > -eps}. If -eps lies within 1e-12 of some grid value of f the
/// threshold is nudged upward until it clears every grid value.
SubdomainMask superlevel_mask(const Background& bg, double eps);

/// lambda_Omega and the sign of f off omega. Empty omega gives lambda = +inf.
HypothesisReport check_h1(const Background& bg, const SubdomainMask& omega, double eigen_tol = 1e-10);

/// Builds D, phi_0, chi and the constants m0, m1, lambda_D.
SupersolutionConstruction build_construction(const Background& bg, const SubdomainMask& omega,
                                             const SupersolutionOptions& options);

/// check_h1 followed, when H1 holds, by the construction and the H2 test.
HypothesisReport check_hypotheses(const Background& bg, const SubdomainMask& omega,
                                  const SupersolutionOptions& options);

/// ubar = delta (chi phi_0 + 1 - chi) with delta the geometric mean of the
/// admissible window (2 delta_lo when the window is unbounded above).
/// Throws H2Violated when the window is empty.
SupersolutionCertificate build_supersolution(const Background& bg, const SubdomainMask& omega,
                                             const SupersolutionOptions& options);
SupersolutionCertificate build_supersolution(const Background& bg, const SubdomainMask& omega, int dilation,
                                             int band);

/// min over the grid of -c_n Lap ubar + R0 ubar - f ubar^N.
double verify_supersolution(const Background& bg, const ScalarField& ubar);

}  // namespace yflow
