#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "pfsim/grid.hpp"

namespace pfsim {

/// Which fourth-order operator the Cahn-Hilliard equation carries.
///  - PaperLiteral: d4/dx4 + d4/dy4 (no mixed term).
///  - FullBiharmonic: the full bilaplacian, including 2 d4/dx2dy2.
enum class SpatialForm { PaperLiteral, FullBiharmonic };

std::string_view to_string(SpatialForm form);
/// Accepts "paper" / "biharmonic".
SpatialForm parse_spatial_form(std::string_view name);

/// Landau coefficients of the bulk free energy
///   f = a1 c^2 + a2 (1-c)(e1^2+e2^2) + a41 (e1^4+e2^4) + a42 e1^2 e2^2 + a61 (e1^6+e2^6).
struct BulkCoeffs {
  double a1 = 1.0;
  double a2 = -1.0;
  double a41 = 0.5;
  double a42 = 2.0;
  double a61 = 0.5;

  void validate() const;
};

using Sym2 = std::array<std::array<double, 2>, 2>;

/// Homogeneous cubic elasticity in 2D with one eigenstrain per variant.
struct ElasticModel {
  double c11 = 2.0;
  double c12 = 1.0;
  double c44 = 0.5;
  std::array<Sym2, 2> eigenstrain{Sym2{{{0.05, 0.0}, {0.0, -0.01}}}, Sym2{{{-0.01, 0.0}, {0.0, 0.05}}}};

  /// C_stuv for s,t,u,v in {0,1}.
  double stiffness(int s, int t, int u, int v) const;
  bool has_eigenstrain() const;
  void validate() const;
};

struct SimParams {
  /// Reference mobility M. When mobility_poly is non-empty, M(c) = sum_k
  /// mobility_poly[k] c^k is used in the flux and mobility_m only sets the
  /// implicit stabilisation.
  double mobility_m = 1.0;
  std::vector<double> mobility_poly;
  double kinetic_l = 1.0;
  double kappa_c = 1.0;
  double kappa_eta = 1.0;
  BulkCoeffs bulk;
  ElasticModel elastic;
  double dt = 0.05;
  SpatialForm ch_spatial_form = SpatialForm::FullBiharmonic;

  bool constant_mobility() const { return mobility_poly.empty(); }
  double mobility(double c) const;
  void validate() const;
};

/// One time slice of the coupled fields.
struct FieldSet {
  Field2D c;
  Field2D eta1;
  Field2D eta2;
  double time = 0.0;

  const Grid2D& grid() const { return c.grid(); }
  const Field2D& eta(int i) const { return i == 1 ? eta1 : eta2; }
  /// Throws std::invalid_argument if the three fields do not share a grid.
  void validate() const;
  bool all_finite() const { return c.all_finite() && eta1.all_finite() && eta2.all_finite(); }
};

/// T frames at uniform spacing dt.
struct Trajectory {
  std::vector<FieldSet> frames;
  double dt = 0.0;
  SimParams params;
  /// Soft-bound violations and similar non-fatal notes from the producer.
  std::vector<std::string> warnings;

  std::size_t size() const { return frames.size(); }
  const Grid2D& grid() const { return frames.front().grid(); }
  std::vector<Field2D> channel(int ch) const;  // 0 = c, 1 = eta1, 2 = eta2
};

}  // namespace pfsim
