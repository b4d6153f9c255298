#include "pfsim/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace pfsim {

std::vector<double> wave_vectors(std::size_t n, double length) {
  if (n < 4 || n % 2 != 0) {
    throw std::invalid_argument("wave_vectors: point count must be even and >= 4, got " + std::to_string(n));
  }
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw std::invalid_argument("wave_vectors: domain length must be positive and finite");
  }
  const double scale = 2.0 * std::numbers::pi / length;
  const auto half = static_cast<long>(n / 2);
  std::vector<double> k(n);
  for (std::size_t i = 0; i < n; ++i) {
    const long m = static_cast<long>(i) < half ? static_cast<long>(i) : static_cast<long>(i) - static_cast<long>(n);
    k[i] = scale * static_cast<double>(m);
  }
  return k;
}

Grid2D::Grid2D(std::size_t nx, std::size_t ny, double lx, double ly)
    : nx_(nx), ny_(ny), lx_(lx), ly_(ly), kx_(wave_vectors(nx, lx)), ky_(wave_vectors(ny, ly)) {}

std::shared_ptr<const Grid2D> Grid2D::unit(std::size_t nx, std::size_t ny) {
  return std::make_shared<const Grid2D>(nx, ny, static_cast<double>(nx), static_cast<double>(ny));
}

std::shared_ptr<const Grid2D> Grid2D::make(std::size_t nx, std::size_t ny, double lx, double ly) {
  return std::make_shared<const Grid2D>(nx, ny, lx, ly);
}

Field2D::Field2D(GridPtr grid, double fill) : grid_(std::move(grid)) {
  if (!grid_) throw std::invalid_argument("Field2D: null grid");
  values_.assign(grid_->size(), fill);
}

Field2D::Field2D(GridPtr grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw std::invalid_argument("Field2D: null grid");
  if (values_.size() != grid_->size()) {
    throw std::invalid_argument("Field2D: expected " + std::to_string(grid_->size()) + " values, got " +
                                std::to_string(values_.size()));
  }
}

double Field2D::mean() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return values_.empty() ? 0.0 : s / static_cast<double>(values_.size());
}

double Field2D::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

bool Field2D::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

Field2D& Field2D::operator+=(const Field2D& other) {
  require_same_grid(*this, other, "Field2D::operator+=");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += other.values_[k];
  return *this;
}

Field2D& Field2D::operator-=(const Field2D& other) {
  require_same_grid(*this, other, "Field2D::operator-=");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= other.values_[k];
  return *this;
}

Field2D& Field2D::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

Field2D operator+(Field2D a, const Field2D& b) { return a += b; }
Field2D operator-(Field2D a, const Field2D& b) { return a -= b; }
Field2D operator*(double s, Field2D a) { return a *= s; }

void require_same_grid(const Field2D& a, const Field2D& b, const char* what) {
  if (!a.grid_ptr() || !b.grid_ptr() || !a.grid().same_shape(b.grid())) {
    throw std::invalid_argument(std::string(what) + ": fields live on different grids");
  }
}

}  // namespace pfsim
