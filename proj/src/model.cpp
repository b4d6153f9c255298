#include "pfsim/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pfsim {
namespace {

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) throw std::invalid_argument(std::string(name) + " must be finite");
}

void require_positive(double v, const char* name) {
  require_finite(v, name);
  if (!(v > 0.0)) throw std::invalid_argument(std::string(name) + " must be > 0");
}

}  // namespace

std::string_view to_string(SpatialForm form) {
  return form == SpatialForm::PaperLiteral ? "paper" : "biharmonic";
}

SpatialForm parse_spatial_form(std::string_view name) {
  if (name == "paper" || name == "paper-literal") return SpatialForm::PaperLiteral;
  if (name == "biharmonic" || name == "full-biharmonic") return SpatialForm::FullBiharmonic;
  throw std::invalid_argument("unknown spatial form '" + std::string(name) + "' (expected paper|biharmonic)");
}

void BulkCoeffs::validate() const {
  for (double v : {a1, a2, a41, a42, a61}) require_finite(v, "bulk coefficient");
  if (!(a41 > 0.0)) throw std::invalid_argument("bulk coefficient a41 must be > 0");
  if (!(a61 >= 0.0)) throw std::invalid_argument("bulk coefficient a61 must be >= 0");
}

double ElasticModel::stiffness(int s, int t, int u, int v) const {
  if (s == t && u == v) return s == u ? c11 : c12;
  if (s != t && u != v) return c44;
  return 0.0;
}

bool ElasticModel::has_eigenstrain() const {
  for (const auto& e : eigenstrain)
    for (const auto& row : e)
      for (double v : row)
        if (v != 0.0) return true;
  return false;
}

void ElasticModel::validate() const {
  require_positive(c11, "c11");
  require_positive(c44, "c44");
  require_finite(c12, "c12");
  if (!(c11 > std::abs(c12))) throw std::invalid_argument("stiffness not positive definite: need c11 > |c12|");
  for (const auto& e : eigenstrain) {
    for (const auto& row : e)
      for (double v : row) require_finite(v, "eigenstrain");
    if (e[0][1] != e[1][0]) throw std::invalid_argument("eigenstrain must be symmetric");
  }
}

double SimParams::mobility(double c) const {
  if (mobility_poly.empty()) return mobility_m;
  double m = 0.0;
  for (auto it = mobility_poly.rbegin(); it != mobility_poly.rend(); ++it) m = m * c + *it;
  return m;
}

void SimParams::validate() const {
  require_positive(mobility_m, "mobility");
  require_positive(kinetic_l, "kinetic coefficient L");
  require_positive(kappa_c, "kappa_c");
  require_positive(kappa_eta, "kappa_eta");
  require_positive(dt, "dt");
  for (double v : mobility_poly) require_finite(v, "mobility polynomial coefficient");
  if (!mobility_poly.empty() && ch_spatial_form == SpatialForm::PaperLiteral) {
    throw std::invalid_argument("concentration-dependent mobility requires the biharmonic spatial form");
  }
  bulk.validate();
  elastic.validate();
}

void FieldSet::validate() const {
  require_same_grid(c, eta1, "FieldSet");
  require_same_grid(c, eta2, "FieldSet");
}

std::vector<Field2D> Trajectory::channel(int ch) const {
  std::vector<Field2D> out;
  out.reserve(frames.size());
  for (const auto& f : frames) out.push_back(ch == 0 ? f.c : (ch == 1 ? f.eta1 : f.eta2));
  return out;
}

}  // namespace pfsim
