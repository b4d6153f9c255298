#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "pfsim/energetics.hpp"
#include "pfsim/model.hpp"

namespace pfsim {

/// A step produced non-finite values.
class IntegrationBlowup : public std::runtime_error {
 public:
  IntegrationBlowup(long frame, double max_magnitude, double time);
  long frame;            // saved-frame index being produced, -1 if unknown
  double max_magnitude;  // largest finite |value| seen, or inf
  double time;
};

/// Uniform composition c0 plus uniform noise in [-noise_amp, noise_amp]; the
/// order parameters get zero-mean noise of the same amplitude. The noise comes
/// from a counter-based generator keyed by seed, so the result depends only on
/// the arguments.
FieldSet make_initial(double c0, std::uint64_t seed, GridPtr grid, double noise_amp);

/// First-order semi-implicit Fourier integrator: stiff linear terms implicit,
/// bulk and elastic driving forces explicit.
class SemiImplicitStepper {
 public:
  SemiImplicitStepper(GridPtr grid, SimParams params);

  FieldSet step(const FieldSet& state) const;
  const SimParams& params() const { return params_; }
  const ElasticKernelTable& kernels() const { return kernels_; }

 private:
  GridPtr grid_;
  SimParams params_;
  ElasticKernelTable kernels_;
  std::vector<double> k2_;      // |k|^2
  std::vector<double> k4_;      // fourth-order symbol for the chosen spatial form
  std::vector<double> ch_den_;  // 1 + dt 2 kappa_c M k4
  std::vector<double> ac_den_;  // 1 + dt 2 kappa_eta L k2
};

FieldSet step(const FieldSet& state, const SimParams& params);

/// Runs substeps * (n_frames - 1) steps and keeps every substeps-th state.
/// Frame 0 is the initial condition; frame spacing is params.dt * substeps.
Trajectory simulate(const FieldSet& initial, const SimParams& params, std::size_t n_frames, std::size_t substeps);

}  // namespace pfsim
