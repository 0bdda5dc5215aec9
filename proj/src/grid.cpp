#include "yflow/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "yflow/errors.hpp"

namespace yflow {

namespace {
std::string format_g(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}
}  // namespace

NonFiniteValue::NonFiniteValue(std::size_t index, double value)
    : Error("non-finite value " + std::to_string(value) + " at index " + std::to_string(index)),
      index_(index),
      value_(value) {}

PositivityViolation::PositivityViolation(std::size_t index, double value)
    : Error("positivity violation: u = " + std::to_string(value) + " at index " +
            std::to_string(index)),
      index_(index),
      value_(value) {}

EigenNonConvergence::EigenNonConvergence(double best_residual, int iterations)
    : Error("eigen solver did not converge after " + std::to_string(iterations) +
            " iterations (best residual " + format_g(best_residual) + ")"),
      best_residual_(best_residual),
      iterations_(iterations) {}

namespace {
std::string h2_message(double lo, double hi, double c) {
  std::ostringstream os;
  os.precision(17);
  os << "H2 violated: delta window is empty (delta_lo = " << lo << ", delta_hi = " << hi
     << ", C_Omega = " << c << ")";
  return os.str();
}
}  // namespace

H2Violated::H2Violated(double delta_lo, double delta_hi, double c_omega)
    : Error(h2_message(delta_lo, delta_hi, c_omega)),
      delta_lo_(delta_lo),
      delta_hi_(delta_hi),
      c_omega_(c_omega) {}

GridSpec::GridSpec(std::vector<int> sizes, std::vector<double> lengths)
    : sizes_(std::move(sizes)), lengths_(std::move(lengths)) {
  if (sizes_.size() < 3) throw InvalidArgument("grid dimension must be at least 3");
  if (lengths_.size() != sizes_.size())
    throw InvalidArgument("grid sizes and lengths must have the same number of axes");
  for (std::size_t a = 0; a < sizes_.size(); ++a) {
    if (sizes_[a] < 4) throw InvalidArgument("grid axis " + std::to_string(a) + " has fewer than 4 points");
    if (!(lengths_[a] > 0.0) || !std::isfinite(lengths_[a]))
      throw InvalidArgument("grid axis " + std::to_string(a) + " has a non-positive length");
  }

  const std::size_t n = sizes_.size();
  strides_.assign(n, 1);
  for (std::size_t a = n - 1; a > 0; --a) strides_[a - 1] = strides_[a] * static_cast<std::size_t>(sizes_[a]);
  count_ = strides_[0] * static_cast<std::size_t>(sizes_[0]);
  if (count_ > std::numeric_limits<std::uint32_t>::max())
    throw InvalidArgument("grid too large");

  cell_volume_ = 1.0;
  for (std::size_t a = 0; a < n; ++a) {
    const double h = lengths_[a] / sizes_[a];
    spacings_.push_back(h);
    inv_h2_.push_back(1.0 / (h * h));
    cell_volume_ *= h;
  }

  plus_.resize(n * count_);
  minus_.resize(n * count_);
  for (std::size_t a = 0; a < n; ++a) {
    const std::size_t stride = strides_[a];
    const std::size_t len = static_cast<std::size_t>(sizes_[a]);
    for (std::size_t i = 0; i < count_; ++i) {
      const std::size_t k = (i / stride) % len;
      const std::size_t base = i - k * stride;
      plus_[a * count_ + i] = static_cast<std::uint32_t>(base + ((k + 1) % len) * stride);
      minus_[a * count_ + i] = static_cast<std::uint32_t>(base + ((k + len - 1) % len) * stride);
    }
  }
}

std::shared_ptr<const GridSpec> GridSpec::make(std::vector<int> sizes, std::vector<double> lengths) {
  return std::make_shared<const GridSpec>(std::move(sizes), std::move(lengths));
}

std::vector<int> GridSpec::multi_index(std::size_t index) const {
  std::vector<int> m(sizes_.size());
  for (std::size_t a = 0; a < sizes_.size(); ++a)
    m[a] = static_cast<int>((index / strides_[a]) % static_cast<std::size_t>(sizes_[a]));
  return m;
}

std::size_t GridSpec::flat_index(std::span<const int> multi) const {
  if (multi.size() != sizes_.size()) throw InvalidArgument("multi-index has wrong dimension");
  std::size_t idx = 0;
  for (std::size_t a = 0; a < sizes_.size(); ++a) {
    const int s = sizes_[a];
    const int k = ((multi[a] % s) + s) % s;
    idx += static_cast<std::size_t>(k) * strides_[a];
  }
  return idx;
}

std::vector<double> GridSpec::coordinates(std::size_t index) const {
  std::vector<double> x(sizes_.size());
  for (std::size_t a = 0; a < sizes_.size(); ++a) {
    const auto k = (index / strides_[a]) % static_cast<std::size_t>(sizes_[a]);
    x[a] = static_cast<double>(k) * spacings_[a];
  }
  return x;
}

bool GridSpec::same_shape(const GridSpec& other) const noexcept {
  return sizes_ == other.sizes_ && lengths_ == other.lengths_;
}

void require_same_grid(const GridSpec& a, const GridSpec& b) {
  if (&a != &b && !a.same_shape(b)) throw GridMismatch("operands live on different grids");
}

ScalarField::ScalarField(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw InvalidArgument("field requires a grid");
  if (values_.size() != grid_->size())
    throw InvalidArgument("field has " + std::to_string(values_.size()) + " values, grid has " +
                          std::to_string(grid_->size()) + " points");
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (!std::isfinite(values_[i])) throw NonFiniteValue(i, values_[i]);
}

ScalarField ScalarField::constant(GridPtr grid, double value) {
  const std::size_t n = grid->size();
  return ScalarField(std::move(grid), std::vector<double>(n, value));
}

ScalarField ScalarField::from_function(GridPtr grid,
                                       const std::function<double(std::span<const double>)>& fn) {
  std::vector<double> v(grid->size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto x = grid->coordinates(i);
    v[i] = fn(x);
  }
  return ScalarField(std::move(grid), std::move(v));
}

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

SubdomainMask::SubdomainMask(GridPtr grid, std::vector<std::uint8_t> inside)
    : grid_(std::move(grid)), inside_(std::move(inside)) {
  if (!grid_) throw InvalidArgument("mask requires a grid");
  if (inside_.size() != grid_->size()) throw InvalidArgument("mask length does not match grid");
  for (auto& b : inside_) b = b ? 1 : 0;
}

SubdomainMask SubdomainMask::empty(GridPtr grid) {
  const std::size_t n = grid->size();
  return SubdomainMask(std::move(grid), std::vector<std::uint8_t>(n, 0));
}

SubdomainMask SubdomainMask::full(GridPtr grid) {
  const std::size_t n = grid->size();
  return SubdomainMask(std::move(grid), std::vector<std::uint8_t>(n, 1));
}

std::size_t SubdomainMask::count() const noexcept {
  return static_cast<std::size_t>(std::count(inside_.begin(), inside_.end(), std::uint8_t{1}));
}

SubdomainMask SubdomainMask::complement() const {
  std::vector<std::uint8_t> out(inside_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = inside_[i] ? 0 : 1;
  return SubdomainMask(grid_, std::move(out));
}

bool SubdomainMask::subset_of(const SubdomainMask& other) const {
  require_same_grid(*grid_, *other.grid_);
  for (std::size_t i = 0; i < inside_.size(); ++i)
    if (inside_[i] && !other.inside_[i]) return false;
  return true;
}

std::vector<std::size_t> SubdomainMask::indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < inside_.size(); ++i)
    if (inside_[i]) out.push_back(i);
  return out;
}

bool operator==(const SubdomainMask& a, const SubdomainMask& b) {
  return a.grid_->same_shape(*b.grid_) && a.inside_ == b.inside_;
}

double integrate(const GridSpec& grid, std::span<const double> w) {
  if (w.size() != grid.size()) throw InvalidArgument("integrand length does not match grid");
  KahanSum sum;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!std::isfinite(w[i])) throw NonFiniteValue(i, w[i]);
    sum.add(w[i]);
  }
  return sum.value() * grid.cell_volume();
}

double integrate(const ScalarField& w) { return integrate(w.grid(), w.values()); }

double lp_norm(const ScalarField& w, const ScalarField& weight, double p) {
  if (!(p >= 1.0)) throw InvalidArgument("lp_norm requires p >= 1");
  require_same_grid(w.grid(), weight.grid());
  KahanSum sum;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (weight[i] < 0.0) throw InvalidArgument("lp_norm weight is negative at index " + std::to_string(i));
    sum.add(std::pow(std::abs(w[i]), p) * weight[i]);
  }
  return std::pow(sum.value() * w.grid().cell_volume(), 1.0 / p);
}

SubdomainMask dilate(const SubdomainMask& mask, int r) {
  if (r < 0) throw InvalidArgument("dilation radius must be nonnegative");
  if (r == 0) return mask;
  const GridSpec& g = mask.grid();
  std::vector<std::uint8_t> cur(mask.inside().begin(), mask.inside().end());
  std::vector<std::uint8_t> next(cur.size());
  // The Chebyshev ball is a product of 1-D intervals, so dilate one axis at a time.
  for (int axis = 0; axis < g.dim(); ++axis) {
    const int reach = std::min(r, g.sizes()[axis] / 2);
    for (std::size_t i = 0; i < cur.size(); ++i) {
      std::uint8_t v = cur[i];
      std::size_t fwd = i;
      std::size_t bwd = i;
      for (int s = 0; s < reach && !v; ++s) {
        fwd = g.neighbor(fwd, axis, +1);
        bwd = g.neighbor(bwd, axis, -1);
        v = cur[fwd] | cur[bwd];
      }
      next[i] = v;
    }
    cur.swap(next);
  }
  return SubdomainMask(mask.grid_ptr(), std::move(cur));
}

}  // namespace yflow
