#include "pfsim/manufactured.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pfsim {

double manufactured_ch_rate(const Grid2D& grid, const SimParams& p, int mode) {
  const double k = 2.0 * std::numbers::pi * mode / grid.lx();
  const double k2 = k * k;
  return p.mobility_m * k2 * 2.0 * p.bulk.a1 + 2.0 * p.kappa_c * p.mobility_m * k2 * k2;
}

Trajectory manufactured_ch(GridPtr grid, const SimParams& params, std::size_t frames, double dt, int mode,
                           double amplitude, double c0) {
  if (!params.constant_mobility()) throw std::invalid_argument("manufactured_ch: needs constant mobility");
  if (frames < 2 || !(dt > 0.0)) throw std::invalid_argument("manufactured_ch: need >= 2 frames and dt > 0");
  const double rate = manufactured_ch_rate(*grid, params, mode);
  const double k = 2.0 * std::numbers::pi * mode / grid->lx();
  Trajectory tr;
  tr.dt = dt;
  tr.params = params;
  for (std::size_t f = 0; f < frames; ++f) {
    const double t = static_cast<double>(f) * dt;
    FieldSet fs{Field2D(grid), Field2D(grid), Field2D(grid), t};
    const double g = amplitude * std::exp(-rate * t);
    for (std::size_t i = 0; i < grid->nx(); ++i) {
      const double s = std::sin(k * grid->x(i));
      for (std::size_t j = 0; j < grid->ny(); ++j) fs.c(i, j) = c0 + g * s;
    }
    tr.frames.push_back(std::move(fs));
  }
  return tr;
}

}  // namespace pfsim
