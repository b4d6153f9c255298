#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "pfsim/grid.hpp"

namespace pfsim::tools {

// Piecewise-linear approximation of the viridis colormap.
inline std::array<std::uint8_t, 3> colormap(double t) {
  static constexpr std::array<std::array<double, 3>, 5> stops{{{0.267, 0.005, 0.329},
                                                               {0.230, 0.322, 0.546},
                                                               {0.128, 0.567, 0.551},
                                                               {0.369, 0.789, 0.383},
                                                               {0.993, 0.906, 0.144}}};
  t = std::clamp(std::isfinite(t) ? t : 0.0, 0.0, 1.0) * (stops.size() - 1);
  const auto i = std::min<std::size_t>(static_cast<std::size_t>(t), stops.size() - 2);
  const double w = t - static_cast<double>(i);
  std::array<std::uint8_t, 3> rgb{};
  for (int c = 0; c < 3; ++c) {
    rgb[c] = static_cast<std::uint8_t>(std::lround(255.0 * ((1.0 - w) * stops[i][c] + w * stops[i + 1][c])));
  }
  return rgb;
}

/// Binary PPM, x along image rows (top to bottom), y along columns.
inline void write_ppm(const std::filesystem::path& path, const Field2D& f) {
  double lo = INFINITY, hi = -INFINITY;
  for (double v : f.values()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double span = hi > lo ? hi - lo : 1.0;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write image '" + path.string() + "'");
  out << "P6\n" << f.grid().ny() << ' ' << f.grid().nx() << "\n255\n";
  for (std::size_t i = 0; i < f.grid().nx(); ++i) {
    for (std::size_t j = 0; j < f.grid().ny(); ++j) {
      const auto rgb = colormap((f(i, j) - lo) / span);
      out.write(reinterpret_cast<const char*>(rgb.data()), 3);
    }
  }
}

}  // namespace pfsim::tools
