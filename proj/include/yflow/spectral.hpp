#pragma once

#include "yflow/grid.hpp"
#include "yflow/operators.hpp"

namespace yflow {

/// Principal Dirichlet eigenpair of L = -c_n Lap + R0 on a mask.
struct EigenResult {
  /// First eigenvalue; +infinity for an empty mask.
  double lambda = 0.0;
  /// Nonnegative, max-normalized to 1 on the mask, zero outside.
  ScalarField phi;
  /// max over the mask of |L phi - lambda phi|.
  double residual = 0.0;
  int iterations = 0;
  bool empty_domain = false;
};

struct EigenOptions {
  double tol = 1e-9;
  int max_iterations = 20000;
  /// Relative tolerance of the inner conjugate-gradient solves.
  double inner_tol = 1e-14;
};

/// Smallest eigenvalue of L restricted to `mask` with zero values imposed
/// outside, by shifted inverse iteration started from the mask indicator.
/// Inner solves use conjugate gradients on L - mu with mu = min(R0) - 1, which
/// keeps the masked operator symmetric positive definite.
EigenResult dirichlet_eigen(const Background& bg, const SubdomainMask& mask, const EigenOptions& options);
EigenResult dirichlet_eigen(const Background& bg, const SubdomainMask& mask, double tol);

/// int (c_n |grad w|^2 + R0 w^2) dV0 / int w^2 dV0 for w vanishing outside mask.
double rayleigh_quotient(const Background& bg, const ScalarField& w, const SubdomainMask& mask);

}  // namespace yflow
