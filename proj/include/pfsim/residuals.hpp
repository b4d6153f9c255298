#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pfsim/model.hpp"
#include "pfsim/spectral.hpp"

namespace pfsim {

/// The three channels of a trajectory.
enum class Channel { C = 0, Eta1 = 1, Eta2 = 2 };
std::string_view to_string(Channel ch);

/// Weights of the six loss terms. Defaults: 1 everywhere except the
/// Cahn-Hilliard PDE term, 0.1.
struct LossWeights {
  double data_c = 1.0;
  double data_eta1 = 1.0;
  double data_eta2 = 1.0;
  double pde_ch = 0.1;
  double pde_ac1 = 1.0;
  double pde_ac2 = 1.0;

  void validate() const;
  bool any_data() const { return data_c > 0.0 || data_eta1 > 0.0 || data_eta2 > 0.0; }
  static LossWeights zero() { return {0, 0, 0, 0, 0, 0}; }
};

struct LossComponents {
  double data_c = 0.0;
  double data_eta1 = 0.0;
  double data_eta2 = 0.0;
  double pde_ch = 0.0;
  double pde_ac1 = 0.0;
  double pde_ac2 = 0.0;
};

/// Weighted sum, accumulated in the fixed order data_c, data_eta1,
/// data_eta2, pde_ch, pde_ac1, pde_ac2.
double weighted_total(const LossComponents& c, const LossWeights& w);

struct LossReport {
  LossComponents components;
  LossWeights weights;
  double total = 0.0;
  DerivBackend backend;
  SpatialForm spatial_form = SpatialForm::FullBiharmonic;
  /// True when the residual was evaluated with a spatial form other than the
  /// one the trajectory was generated with.
  bool spatial_form_mismatch = false;
  std::size_t nx = 0, ny = 0, frames = 0;
  double dt = 0.0;
};

/// ||pred - truth|| / ||truth|| with a zero-norm truth.
class UndefinedMetric : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Cahn-Hilliard residual per frame,
///   R = dc/dt - M [Dxx(df/dc) + Dyy(df/dc)] + 2 kappa_c M K4(c).
/// spatial_form defaults to the trajectory's own.
std::vector<Field2D> ch_residual(const Trajectory& traj, const DerivBackend& backend,
                                 std::optional<SpatialForm> spatial_form = std::nullopt);

/// Allen-Cahn residual per frame for variant 1 or 2,
///   R = de_i/dt + L [df/de_i - 2 kappa_eta lap e_i + dF_el/de_i].
std::vector<Field2D> ac_residual(const Trajectory& traj, int variant, const DerivBackend& backend);

/// mean(R^2) / mean((du/dt)^2) over every frame and point. Falls back to the
/// plain mean(R^2) when the time derivative vanishes identically.
double pde_loss(const std::vector<Field2D>& residual, const std::vector<Field2D>& time_derivative);

/// Relative L2 error of one channel over the whole (T, X, Y) tensor.
double data_loss(const Trajectory& pred, const Trajectory& truth, Channel channel);

/// All six terms and their weighted sum. truth is required iff any data
/// weight is positive; without truth the data components are reported as 0.
LossReport total_loss(const Trajectory& pred, const Trajectory* truth, const LossWeights& weights,
                      const DerivBackend& backend, std::optional<SpatialForm> spatial_form = std::nullopt);

}  // namespace pfsim
