#pragma once

#include <cstddef>

#include "pfsim/model.hpp"

namespace pfsim {

/// Exact solution of the Cahn-Hilliard equation with e1 = e2 = 0:
///   c(x, y, t) = c0 + amplitude * sin(k x) * exp(-rate * t),  k = 2 pi mode / lx,
///   rate = M k^2 2 a1 + 2 kappa_c M k^4.
/// With the order parameters at zero df/dc = 2 a1 c is linear, so this solves
/// both spatial forms (the mode has no y dependence). Needs constant mobility.
Trajectory manufactured_ch(GridPtr grid, const SimParams& params, std::size_t frames, double dt, int mode,
                           double amplitude, double c0);

double manufactured_ch_rate(const Grid2D& grid, const SimParams& params, int mode);

}  // namespace pfsim
