#include "yflow/scenario.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "yflow/io.hpp"

namespace yflow {

namespace {

namespace pt = boost::property_tree;

const std::set<std::string> kFieldKeys{"constant", "bumps", "snapshot", "scale", "noise", "supersolution_scale"};

// Typed access to "section.key" with errors that name the field.
class Section {
 public:
  Section(const pt::ptree* tree, std::string name, const std::set<std::string>& allowed)
      : tree_(tree), name_(std::move(name)) {
    if (!tree_) return;
    for (const auto& [key, child] : *tree_) {
      if (!child.empty()) throw ScenarioError("[" + name_ + "] nests a section under '" + key + "'");
      if (!allowed.count(key)) throw ScenarioError("unknown key '" + name_ + "." + key + "'");
    }
  }

  bool has(const std::string& key) const { return tree_ && tree_->find(key) != tree_->not_found(); }

  std::string text(const std::string& key, const std::string& fallback = {}) const {
    if (!has(key)) return fallback;
    return tree_->get<std::string>(key);
  }

  double real(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    return to_real(key, text(key));
  }

  long long integer(const std::string& key, long long fallback) const {
    if (!has(key)) return fallback;
    const auto s = text(key);
    try {
      std::size_t used = 0;
      const long long v = std::stoll(s, &used);
      if (used != trim(s).size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ScenarioError(field(key) + ": expected an integer, got '" + s + "'");
    }
  }

  bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const auto s = trim(text(key));
    if (s == "true" || s == "yes" || s == "1" || s == "on") return true;
    if (s == "false" || s == "no" || s == "0" || s == "off") return false;
    throw ScenarioError(field(key) + ": expected a boolean, got '" + s + "'");
  }

  std::vector<double> reals(const std::string& key) const {
    std::vector<double> out;
    if (!has(key)) return out;
    std::stringstream ss(text(key));
    std::string tok;
    while (ss >> tok) out.push_back(to_real(key, tok));
    return out;
  }

  std::string field(const std::string& key) const { return name_ + "." + key; }

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  }

  double to_real(const std::string& key, const std::string& s) const {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != trim(s).size() || !std::isfinite(v)) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ScenarioError(field(key) + ": expected a finite number, got '" + s + "'");
    }
  }

  const pt::ptree* tree_;
  std::string name_;
};

const pt::ptree* child(const pt::ptree& root, const std::string& name) {
  auto it = root.find(name);
  return it == root.not_found() ? nullptr : &it->second;
}

std::vector<Bump> parse_bumps(const Section& s, int dim) {
  std::vector<Bump> out;
  if (!s.has("bumps")) return out;
  std::stringstream all(s.text("bumps"));
  std::string item;
  while (std::getline(all, item, ';')) {
    std::stringstream ss(item);
    std::vector<double> v;
    std::string tok;
    while (ss >> tok) {
      try {
        v.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw ScenarioError(s.field("bumps") + ": bad number '" + tok + "'");
      }
    }
    if (v.empty()) continue;
    if (v.size() != static_cast<std::size_t>(dim + 2))
      throw ScenarioError(s.field("bumps") + ": each bump needs amplitude, width and " + std::to_string(dim) +
                          " center coordinates");
    if (!(v[1] > 0.0)) throw ScenarioError(s.field("bumps") + ": bump width must be positive");
    out.push_back(Bump{v[0], v[1], std::vector<double>(v.begin() + 2, v.end())});
  }
  return out;
}

FieldSpec parse_field(const pt::ptree& root, const std::string& name, int dim, const std::filesystem::path& base,
                      bool allow_supersolution) {
  const Section s(child(root, name), name, kFieldKeys);
  FieldSpec spec;
  spec.constant = s.real("constant", 0.0);
  spec.bumps = parse_bumps(s, dim);
  if (s.has("snapshot")) {
    std::filesystem::path p = s.text("snapshot");
    spec.snapshot = p.is_relative() ? base / p : p;
  }
  spec.snapshot_scale = s.real("scale", 1.0);
  spec.noise = s.real("noise", 0.0);
  if (spec.noise < 0.0) throw ScenarioError(s.field("noise") + " must be nonnegative");
  if (s.has("supersolution_scale")) {
    if (!allow_supersolution) throw ScenarioError(s.field("supersolution_scale") + " is only valid for u0");
    spec.supersolution_scale = s.real("supersolution_scale", 1.0);
    if (!(*spec.supersolution_scale > 0.0))
      throw ScenarioError(s.field("supersolution_scale") + " must be positive");
  }
  return spec;
}

std::vector<int> parse_sizes(const Section& s, int n) {
  const auto v = s.reals("sizes");
  if (v.empty()) throw ScenarioError("missing " + s.field("sizes"));
  std::vector<int> out;
  for (double x : v) {
    if (x != std::floor(x)) throw ScenarioError(s.field("sizes") + " must be integers");
    out.push_back(static_cast<int>(x));
  }
  if (out.size() == 1) out.assign(n, out[0]);
  if (out.size() != static_cast<std::size_t>(n)) throw ScenarioError(s.field("sizes") + " must list 1 or n values");
  return out;
}

std::vector<double> parse_lengths(const Section& s, int n) {
  auto v = s.reals("lengths");
  if (v.empty()) v = {1.0};
  if (v.size() == 1) v.assign(n, v[0]);
  if (v.size() != static_cast<std::size_t>(n)) throw ScenarioError(s.field("lengths") + " must list 1 or n values");
  return v;
}

std::uint64_t name_hash(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

ScalarField realize_field(const GridPtr& grid, const FieldSpec& spec, std::uint64_t seed, const std::string& what) {
  const GridSpec& g = *grid;
  const int dim = g.dim();
  std::vector<double> v(g.size(), spec.constant);
  for (const auto& b : spec.bumps) {
    if (b.center.size() != static_cast<std::size_t>(dim))
      throw ScenarioError(what + ": bump center has the wrong dimension");
    const double inv = 1.0 / (2.0 * b.width * b.width);
    for (std::size_t i = 0; i < v.size(); ++i) {
      const auto x = g.coordinates(i);
      // Separable in the axes; the two adjacent images keep it smooth across the wrap.
      double prod = 1.0;
      for (int a = 0; a < dim; ++a) {
        const double L = g.lengths()[a];
        double d = x[a] - b.center[a];
        d -= L * std::round(d / L);
        prod *= std::exp(-d * d * inv) + std::exp(-(d - L) * (d - L) * inv) + std::exp(-(d + L) * (d + L) * inv);
      }
      v[i] += b.amplitude * prod;
    }
  }
  if (!spec.snapshot.empty()) {
    const auto snap = load_snapshot(spec.snapshot, grid);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += spec.snapshot_scale * snap[i];
  }
  if (spec.noise > 0.0) {
    std::mt19937_64 gen(seed ^ name_hash(what));
    for (auto& x : v) {
      const double unit = static_cast<double>(gen() >> 11) * 0x1.0p-53;
      x += spec.noise * (2.0 * unit - 1.0);
    }
  }
  return ScalarField(grid, std::move(v));
}

SubdomainMask realize_mask(const Background& bg, const MaskSpec& spec) {
  const GridSpec& g = bg.grid();
  const GridPtr& grid = bg.grid_ptr();
  if (spec.kind == "superlevel") return superlevel_mask(bg, spec.eps);
  if (spec.kind == "empty") return SubdomainMask::empty(grid);
  if (spec.kind == "full") return SubdomainMask::full(grid);
  std::vector<std::uint8_t> inside(g.size(), 0);
  if (spec.kind == "ball") {
    if (spec.center.size() != static_cast<std::size_t>(g.dim()))
      throw ScenarioError("mask.center must have n coordinates");
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto x = g.coordinates(i);
      double d2 = 0.0;
      for (int a = 0; a < g.dim(); ++a) {
        const double L = g.lengths()[a];
        double d = x[a] - spec.center[a];
        d -= L * std::round(d / L);
        d2 += d * d;
      }
      inside[i] = d2 < spec.radius * spec.radius ? 1 : 0;
    }
  } else if (spec.kind == "slab") {
    if (spec.axis < 0 || spec.axis >= g.dim()) throw ScenarioError("mask.axis out of range");
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double x = g.coordinates(i)[spec.axis];
      inside[i] = (x > spec.lo && x < spec.hi) ? 1 : 0;
    }
  } else {
    throw ScenarioError("unknown mask.kind '" + spec.kind + "'");
  }
  return SubdomainMask(grid, std::move(inside));
}

Scenario parse_scenario(const std::string& text, const std::filesystem::path& base_dir) {
  pt::ptree root;
  std::istringstream in(text);
  try {
    pt::ini_parser::read_ini(in, root);
  } catch (const pt::ini_parser_error& e) {
    throw ScenarioError("parse error at line " + std::to_string(e.line()) + ": " + e.message());
  }
  const std::set<std::string> sections{"scenario", "grid",  "R0",   "f",          "u0",
                                       "flow",     "mask",  "supersolution", "diagnostics"};
  for (const auto& [key, node] : root) {
    if (node.empty()) throw ScenarioError("key '" + key + "' must live inside a section");
    if (!sections.count(key)) throw ScenarioError("unknown section [" + key + "]");
  }

  Scenario sc;
  const Section head(child(root, "scenario"), "scenario", {"name", "seed", "out"});
  sc.name = head.text("name", "scenario");
  const long long seed = head.integer("seed", 0);
  if (seed < 0) throw ScenarioError("scenario.seed must be nonnegative");
  sc.seed = static_cast<std::uint64_t>(seed);
  if (head.has("out")) {
    std::filesystem::path p = head.text("out");
    sc.out_dir = p.is_relative() ? base_dir / p : p;
  }

  const Section grid(child(root, "grid"), "grid", {"n", "sizes", "lengths"});
  const long long n = grid.integer("n", 3);
  if (n < 3 || n > 8) throw ScenarioError("grid.n must lie in [3, 8]");
  try {
    sc.grid = GridSpec::make(parse_sizes(grid, static_cast<int>(n)), parse_lengths(grid, static_cast<int>(n)));
  } catch (const InvalidArgument& e) {
    throw ScenarioError(std::string("grid: ") + e.what());
  }

  sc.R0_spec = parse_field(root, "R0", static_cast<int>(n), base_dir, false);
  sc.f_spec = parse_field(root, "f", static_cast<int>(n), base_dir, false);
  sc.u0_spec = parse_field(root, "u0", static_cast<int>(n), base_dir, true);

  auto R0 = realize_field(sc.grid, sc.R0_spec, sc.seed, "R0");
  for (std::size_t i = 0; i < R0.size(); ++i)
    if (!(R0[i] < 0.0))
      throw ScenarioError("R0 not negative at index " + std::to_string(i) + " (value " + std::to_string(R0[i]) + ")");
  auto f = realize_field(sc.grid, sc.f_spec, sc.seed, "f");
  sc.background.emplace(std::move(R0), std::move(f));

  const Section flow(child(root, "flow"), "flow",
                     {"cfl", "t_max", "residual_stop", "blowup_ceiling", "record_every", "lp_orders", "max_steps"});
  sc.flow.cfl_fraction = flow.real("cfl", sc.flow.cfl_fraction);
  sc.flow.t_max = flow.real("t_max", sc.flow.t_max);
  sc.flow.residual_stop = flow.real("residual_stop", sc.flow.residual_stop);
  sc.flow.blowup_ceiling = flow.real("blowup_ceiling", sc.flow.blowup_ceiling);
  sc.flow.record_every = static_cast<int>(flow.integer("record_every", sc.flow.record_every));
  sc.flow.lp_orders = flow.reals("lp_orders");
  sc.flow.max_steps = flow.integer("max_steps", sc.flow.max_steps);
  try {
    sc.flow.validate();
  } catch (const InvalidArgument& e) {
    throw ScenarioError(std::string("flow: ") + e.what());
  }

  const Section mask(child(root, "mask"), "mask", {"kind", "eps", "center", "radius", "axis", "lo", "hi"});
  sc.mask.kind = mask.text("kind", sc.mask.kind);
  sc.mask.eps = mask.real("eps", sc.mask.eps);
  sc.mask.center = mask.reals("center");
  sc.mask.radius = mask.real("radius", sc.mask.radius);
  sc.mask.axis = static_cast<int>(mask.integer("axis", sc.mask.axis));
  sc.mask.lo = mask.real("lo", sc.mask.lo);
  sc.mask.hi = mask.real("hi", sc.mask.hi);

  const Section sup(child(root, "supersolution"), "supersolution", {"dilation", "band", "eigen_tol", "verify_tol"});
  sc.supersolution.dilation = static_cast<int>(sup.integer("dilation", sc.supersolution.dilation));
  sc.supersolution.band = static_cast<int>(sup.integer("band", sc.supersolution.band));
  sc.supersolution.eigen_tol = sup.real("eigen_tol", sc.supersolution.eigen_tol);
  sc.supersolution.verify_tol = sup.real("verify_tol", sc.supersolution.verify_tol);

  const Section diag(child(root, "diagnostics"), "diagnostics",
                     {"envelopes", "energy_monotone", "energy_tol", "decay", "decay_threshold", "decay_orders",
                      "dissipation_max_error", "growth_min_exponent", "mass_growth_factor", "final_residual_max",
                      "expect_outcome"});
  auto& d = sc.diagnostics;
  d.envelopes = diag.boolean("envelopes", d.envelopes);
  d.energy_monotone = diag.boolean("energy_monotone", d.energy_monotone);
  d.energy_tol = diag.real("energy_tol", d.energy_tol);
  d.decay = diag.boolean("decay", d.decay);
  d.decay_threshold = diag.real("decay_threshold", d.decay_threshold);
  d.decay_orders = diag.reals("decay_orders");
  d.dissipation_max_error = diag.real("dissipation_max_error", d.dissipation_max_error);
  d.growth_min_exponent = diag.real("growth_min_exponent", d.growth_min_exponent);
  d.mass_growth_factor = diag.real("mass_growth_factor", d.mass_growth_factor);
  d.final_residual_max = diag.real("final_residual_max", d.final_residual_max);
  d.expect_outcome = diag.text("expect_outcome");
  if (!d.expect_outcome.empty()) outcome_from_string(d.expect_outcome);

  if (sc.u0_spec.supersolution_scale) {
    const auto omega = realize_mask(sc.bg(), sc.mask);
    sc.certificate = build_supersolution(sc.bg(), omega, sc.supersolution);
    std::vector<double> u(sc.grid->size());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = *sc.u0_spec.supersolution_scale * sc.certificate->ubar[i];
    sc.u0 = ScalarField(sc.grid, std::move(u));
  } else {
    sc.u0 = realize_field(sc.grid, sc.u0_spec, sc.seed, "u0");
  }
  for (std::size_t i = 0; i < sc.u0.size(); ++i)
    if (!(sc.u0[i] > 0.0))
      throw ScenarioError("u0 not positive at index " + std::to_string(i) + " (value " + std::to_string(sc.u0[i]) +
                          ")");
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  auto sc = parse_scenario(ss.str(), path.parent_path());
  sc.source = path;
  return sc;
}

}  // namespace yflow
