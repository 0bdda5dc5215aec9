#include "yflow/records.hpp"

#include <algorithm>
#include <cmath>

namespace yflow {

std::vector<double> default_lp_orders(int n) {
  return {2.0, 0.5 * n, static_cast<double>(n) * n / (2.0 * (n - 2))};
}

double defect_integral(const Background& bg, std::span<const double> u, std::span<const double> defect, double p) {
  const double q = bg.volume_exponent();
  KahanSum sum;
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double a = std::abs(defect[j]);
    const double ap = p == 2.0 ? a * a : std::pow(a, p);
    sum.add(ap * std::pow(u[j], q));
  }
  return sum.value() * bg.grid().cell_volume();
}

DiagnosticsRecord measure_state(const Background& bg, std::span<const double> u, std::span<const double> defect,
                                double t, double dt, std::span<const double> orders) {
  DiagnosticsRecord r;
  r.t = t;
  r.dt = dt;
  r.energy = detail::energy(bg, u);
  r.min_u = *std::min_element(u.begin(), u.end());
  r.max_u = *std::max_element(u.begin(), u.end());
  const double q = bg.volume_exponent();
  KahanSum vol;
  double sup = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    vol.add(std::pow(u[j], q));
    sup = std::max(sup, std::abs(defect[j]));
  }
  r.volume_g = vol.value() * bg.grid().cell_volume();
  r.residual_sup = sup;
  r.residual_lp.reserve(orders.size());
  for (double p : orders) r.residual_lp.push_back(defect_integral(bg, u, defect, p));
  return r;
}

}  // namespace yflow
