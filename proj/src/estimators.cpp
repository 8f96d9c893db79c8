#include "longmem/estimators.hpp"

#include <algorithm>

namespace longmem {

Eigen::Index optimal_bandwidth(const SpectralCurvature& curv, Eigen::Index n) {
  if (!(curv.s0 > 0)) throw ValidationError("s(0) must be positive");
  if (curv.s2 == 0) throw ValidationError("s''(0) = 0 makes the optimal bandwidth formula singular");
  if (n < 1) throw ValidationError("n must be positive");
  const double ratio2 = (curv.s0 / curv.s2) * (curv.s0 / curv.s2);
  return integer_part(0.4634 * std::pow(ratio2, 0.2) * std::pow(double(n), 0.8));
}

std::pair<Eigen::Index, Eigen::Index> bandwidth_range(Eigen::Index n, double lo_exp, double hi_exp) {
  if (!(lo_exp > 0 && hi_exp < 1 && lo_exp < hi_exp))
    throw ValidationError("bandwidth exponents must satisfy 0 < lo_exp < hi_exp < 1");
  if (n < 2) throw ValidationError("n must be at least 2");
  return {integer_part(std::pow(double(n), lo_exp)), integer_part(std::pow(double(n), hi_exp))};
}

std::vector<Eigen::Index> bandwidth_grid(Eigen::Index n, double lo_exp, double hi_exp) {
  const auto [lo_raw, hi_raw] = bandwidth_range(n, lo_exp, hi_exp);
  const Eigen::Index lo = std::max<Eigen::Index>(lo_raw, 2);
  const Eigen::Index hi = std::min(hi_raw, max_bandwidth(n));
  if (lo > hi)
    throw ValidationError("bandwidth grid is empty for n = " + std::to_string(n) + " after clipping to 2.." +
                          std::to_string(max_bandwidth(n)));
  std::vector<Eigen::Index> grid;
  for (Eigen::Index m = lo; m <= hi; ++m) grid.push_back(m);
  return grid;
}

}  // namespace longmem
