#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pfsim/model.hpp"

namespace pfsim {

/// Pointwise bulk free-energy density.
Field2D bulk_f(const Field2D& c, const Field2D& eta1, const Field2D& eta2, const BulkCoeffs& coeffs);
/// df/dc = 2 a1 c - a2 (e1^2 + e2^2).
Field2D df_dc(const Field2D& c, const Field2D& eta1, const Field2D& eta2, const BulkCoeffs& coeffs);
/// df/de_i; variant is 1 or 2.
Field2D df_deta(const Field2D& c, const Field2D& eta1, const Field2D& eta2, const BulkCoeffs& coeffs, int variant);

// Scalar versions, shared by the field routines above.
double bulk_f(double c, double e1, double e2, const BulkCoeffs& k);
double df_dc(double c, double e1, double e2, const BulkCoeffs& k);
double df_deta(double c, double e_self, double e_other, const BulkCoeffs& k);

using Mat2 = std::array<std::array<double, 2>, 2>;

/// Raised when the acoustic tensor C_stuv n_t n_v cannot be inverted.
class SingularAcousticTensor : public std::runtime_error {
 public:
  SingularAcousticTensor(double nx, double ny);
  std::array<double, 2> direction;
};

/// Khachaturyan interaction matrix
///   B_pi(n) = C_stuv e(p)_st e(i)_uv - n_t sigma(p)_ts omega_su(n) sigma(i)_uv n_v
/// with sigma(i) = C : e(i) and omega the inverse of C_stuv n_t n_v.
/// n must be a unit vector.
Mat2 elastic_kernel(std::array<double, 2> n, const ElasticModel& model);

/// B_pi(k/|k|) tabulated over every wavevector of a grid, zero at k = 0.
class ElasticKernelTable {
 public:
  ElasticKernelTable(GridPtr grid, const ElasticModel& model);

  const Grid2D& grid() const { return *grid_; }
  /// Entry (p, i) at flat spectral index m; p, i in {0, 1}.
  double at(std::size_t m, int p, int i) const { return b_[p][i][m]; }
  bool is_zero() const { return zero_; }

 private:
  GridPtr grid_;
  std::array<std::array<std::vector<double>, 2>, 2> b_;
  bool zero_ = true;
};

struct ElasticForce {
  Field2D eta1;
  Field2D eta2;
  /// Largest |Im| of the inverse transforms before it was discarded.
  double max_imag_residue = 0.0;
};

/// dF_el/de_i = 2 e_i(r) * IFFT[ sum_p B_pi(n) FFT(e_p^2) ](r), for i = 1, 2.
ElasticForce elastic_driving_force(const Field2D& eta1, const Field2D& eta2, const ElasticKernelTable& table);
ElasticForce elastic_driving_force(const Field2D& eta1, const Field2D& eta2, const ElasticModel& model);

/// Elastic energy 1/2 * hx*hy/N * sum_k sum_pi B_pi theta_p(k) conj(theta_i(k)).
double elastic_energy(const Field2D& eta1, const Field2D& eta2, const ElasticKernelTable& table);

/// Integral of f + kappa_c |grad c|^2 + kappa_eta sum_i |grad e_i|^2, plus the
/// elastic energy. Gradients are evaluated spectrally.
double total_energy(const FieldSet& fields, const SimParams& params);
double total_energy(const FieldSet& fields, const SimParams& params, const ElasticKernelTable& table);

}  // namespace pfsim
