#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace yflow {

/// Periodic structured grid on the flat torus prod_i [0, lengths[i]).
///
/// Points sit at x_i = k * h_i with h_i = lengths[i] / sizes[i]. Storage is
/// row-major (last axis fastest). Neighbor tables for the periodic 2n-point
/// stencil are built once at construction.
class GridSpec {
 public:
  GridSpec(std::vector<int> sizes, std::vector<double> lengths);

  static std::shared_ptr<const GridSpec> make(std::vector<int> sizes, std::vector<double> lengths);

  int dim() const noexcept { return static_cast<int>(sizes_.size()); }
  std::span<const int> sizes() const noexcept { return sizes_; }
  std::span<const double> lengths() const noexcept { return lengths_; }
  std::span<const double> spacings() const noexcept { return spacings_; }
  /// 1 / h_i^2 per axis.
  std::span<const double> inv_spacing_sq() const noexcept { return inv_h2_; }
  std::size_t size() const noexcept { return count_; }
  /// Background measure of one cell, prod_i h_i.
  double cell_volume() const noexcept { return cell_volume_; }

  /// Periodic neighbor of `index` one step along `axis` (dir = +1 or -1).
  std::size_t neighbor(std::size_t index, int axis, int dir) const noexcept {
    const auto& table = dir > 0 ? plus_ : minus_;
    return table[static_cast<std::size_t>(axis) * count_ + index];
  }

  std::vector<int> multi_index(std::size_t index) const;
  std::size_t flat_index(std::span<const int> multi) const;
  /// Physical coordinates of a point.
  std::vector<double> coordinates(std::size_t index) const;

  bool same_shape(const GridSpec& other) const noexcept;

 private:
  std::vector<int> sizes_;
  std::vector<double> lengths_;
  std::vector<double> spacings_;
  std::vector<double> inv_h2_;
  std::vector<std::size_t> strides_;
  std::size_t count_ = 0;
  double cell_volume_ = 0.0;
  std::vector<std::uint32_t> plus_;
  std::vector<std::uint32_t> minus_;
};

using GridPtr = std::shared_ptr<const GridSpec>;

/// Immutable grid function. All values are finite.
class ScalarField {
 public:
  /// Empty placeholder with no grid; only assignable.
  ScalarField() = default;
  ScalarField(GridPtr grid, std::vector<double> values);

  static ScalarField constant(GridPtr grid, double value);
  static ScalarField from_function(GridPtr grid,
                                   const std::function<double(std::span<const double>)>& fn);

  const GridSpec& grid() const noexcept { return *grid_; }
  const GridPtr& grid_ptr() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

  double min() const;
  double max() const;

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

/// Boolean selection of grid points; "inside" points form the open set.
class SubdomainMask {
 public:
  SubdomainMask(GridPtr grid, std::vector<std::uint8_t> inside);

  static SubdomainMask empty(GridPtr grid);
  static SubdomainMask full(GridPtr grid);

  const GridSpec& grid() const noexcept { return *grid_; }
  const GridPtr& grid_ptr() const noexcept { return grid_; }
  std::span<const std::uint8_t> inside() const noexcept { return inside_; }
  bool contains(std::size_t i) const noexcept { return inside_[i] != 0; }
  std::size_t size() const noexcept { return inside_.size(); }

  std::size_t count() const noexcept;
  bool is_empty() const noexcept { return count() == 0; }
  bool is_full() const noexcept { return count() == size(); }
  SubdomainMask complement() const;
  bool subset_of(const SubdomainMask& other) const;
  std::vector<std::size_t> indices() const;

  friend bool operator==(const SubdomainMask& a, const SubdomainMask& b);

 private:
  GridPtr grid_;
  std::vector<std::uint8_t> inside_;
};

void require_same_grid(const GridSpec& a, const GridSpec& b);

/// Fixed-order Kahan summation.
class KahanSum {
 public:
  void add(double x) noexcept {
    const double y = x - carry_;
    const double t = sum_ + y;
    carry_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const noexcept { return sum_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

/// Cell-sum quadrature of raw grid values; rejects non-finite entries.
double integrate(const GridSpec& grid, std::span<const double> w);
/// Cell-sum quadrature, sum_j w_j * prod_i h_i.
double integrate(const ScalarField& w);

/// (integral |w|^p weight dV)^(1/p).
double lp_norm(const ScalarField& w, const ScalarField& weight, double p);

/// Chebyshev-distance dilation by r cells with periodic wraparound.
SubdomainMask dilate(const SubdomainMask& mask, int r);

}  // namespace yflow
