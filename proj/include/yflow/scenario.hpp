#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "yflow/diagnostics.hpp"
#include "yflow/flow.hpp"
#include "yflow/hypothesis.hpp"

namespace yflow {

/// Periodic Gaussian A exp(-|x - c|^2 / (2 w^2)), summed over the nearest image and
/// its two neighbors along each axis.
struct Bump {
  double amplitude = 0.0;
  double width = 1.0;
  std::vector<double> center;
};

/// constant + sum of bumps + scale * snapshot + noise * U(-1, 1).
struct FieldSpec {
  double constant = 0.0;
  std::vector<Bump> bumps;
  std::filesystem::path snapshot;
  double snapshot_scale = 1.0;
  double noise = 0.0;
  /// u0 only: if set, u0 = supersolution_scale * ubar replaces everything else.
  std::optional<double> supersolution_scale;
};

struct MaskSpec {
  /// superlevel | empty | full | ball | slab
  std::string kind = "superlevel";
  double eps = 0.1;
  std::vector<double> center;
  double radius = 1.0;
  int axis = 0;
  double lo = 0.0;
  double hi = 0.0;
};

/// Assertions evaluated after `run` and `verify`. NaN disables a numeric check.
struct DiagnosticsConfig {
  bool envelopes = true;
  bool energy_monotone = true;
  double energy_tol = 1e-10;
  bool decay = false;
  double decay_threshold = 1e-8;
  std::vector<double> decay_orders;
  double dissipation_max_error = std::numeric_limits<double>::quiet_NaN();
  double growth_min_exponent = std::numeric_limits<double>::quiet_NaN();
  double mass_growth_factor = std::numeric_limits<double>::quiet_NaN();
  double final_residual_max = std::numeric_limits<double>::quiet_NaN();
  /// Required outcome, or empty for any.
  std::string expect_outcome;
};

struct Scenario {
  std::string name;
  std::uint64_t seed = 0;
  std::filesystem::path source;
  std::filesystem::path out_dir;
  GridPtr grid;
  FieldSpec R0_spec, f_spec, u0_spec;
  std::optional<Background> background;
  ScalarField u0;
  FlowConfig flow;
  MaskSpec mask;
  SupersolutionOptions supersolution;
  DiagnosticsConfig diagnostics;
  /// Present when u0 was built from a supersolution.
  std::optional<SupersolutionCertificate> certificate;

  const Background& bg() const { return *background; }
};

/// Parses a sectioned key = value file, realizes every field and validates
/// R0 < 0 and u0 > 0. Relative snapshot paths resolve against the file.
Scenario load_scenario(const std::filesystem::path& path);
/// Same, from text; relative paths resolve against `base_dir`.
Scenario parse_scenario(const std::string& text, const std::filesystem::path& base_dir = {});

ScalarField realize_field(const GridPtr& grid, const FieldSpec& spec, std::uint64_t seed, const std::string& what);
SubdomainMask realize_mask(const Background& bg, const MaskSpec& spec);

}  // namespace yflow
