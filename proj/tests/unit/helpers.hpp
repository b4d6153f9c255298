#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>

#include "pfsim/grid.hpp"

namespace pfsim::test {

inline constexpr double kPi = std::numbers::pi;

inline Field2D sample(const GridPtr& g, const std::function<double(double, double)>& fn) {
  Field2D f(g);
  for (std::size_t i = 0; i < g->nx(); ++i)
    for (std::size_t j = 0; j < g->ny(); ++j) f(i, j) = fn(g->x(i), g->y(j));
  return f;
}

inline Field2D random_field(const GridPtr& g, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Field2D f(g);
  for (auto& v : f.storage()) v = u(rng);
  return f;
}

inline double max_abs_diff(const Field2D& a, const Field2D& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

inline bool bitwise_equal(const Field2D& a, const Field2D& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k)
    if (std::bit_cast<std::uint64_t>(a[k]) != std::bit_cast<std::uint64_t>(b[k])) return false;
  return true;
}

}  // namespace pfsim::test
