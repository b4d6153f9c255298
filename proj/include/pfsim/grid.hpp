#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace pfsim {

/// Angular wavenumbers for an n-point periodic axis of the given length, in
/// FFT order {0, 1, ..., n/2-1, -n/2, ..., -1} scaled by 2*pi/length.
/// Throws std::invalid_argument unless n is even, n >= 4 and length > 0.
std::vector<double> wave_vectors(std::size_t n, double length);

/// Periodic square-cell grid. Points sit at x_i = i*hx, i = 0..nx-1; the
/// point at x = lx is the periodic image of x = 0 and is not stored.
class Grid2D {
 public:
  Grid2D(std::size_t nx, std::size_t ny, double lx, double ly);

  /// Unit-spacing grid covering [0, nx) x [0, ny).
  static std::shared_ptr<const Grid2D> unit(std::size_t nx, std::size_t ny);
  static std::shared_ptr<const Grid2D> make(std::size_t nx, std::size_t ny, double lx, double ly);

  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  std::size_t size() const { return nx_ * ny_; }
  double lx() const { return lx_; }
  double ly() const { return ly_; }
  double hx() const { return lx_ / static_cast<double>(nx_); }
  double hy() const { return ly_ / static_cast<double>(ny_); }
  double x(std::size_t i) const { return static_cast<double>(i) * hx(); }
  double y(std::size_t j) const { return static_cast<double>(j) * hy(); }
  std::size_t index(std::size_t i, std::size_t j) const { return i * ny_ + j; }

  const std::vector<double>& kx() const { return kx_; }
  const std::vector<double>& ky() const { return ky_; }

  bool same_shape(const Grid2D& other) const {
    return nx_ == other.nx_ && ny_ == other.ny_ && lx_ == other.lx_ && ly_ == other.ly_;
  }

 private:
  std::size_t nx_;
  std::size_t ny_;
  double lx_;
  double ly_;
  std::vector<double> kx_;
  std::vector<double> ky_;
};

using GridPtr = std::shared_ptr<const Grid2D>;

/// Real scalar field sampled on a Grid2D, stored row-major with x as the
/// slow index: value(i, j) lives at values()[i * ny + j].
class Field2D {
 public:
  Field2D() = default;
  explicit Field2D(GridPtr grid, double fill = 0.0);
  Field2D(GridPtr grid, std::vector<double> values);

  const Grid2D& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::size_t size() const { return values_.size(); }

  double& operator()(std::size_t i, std::size_t j) { return values_[grid_->index(i, j)]; }
  double operator()(std::size_t i, std::size_t j) const { return values_[grid_->index(i, j)]; }
  double& operator[](std::size_t k) { return values_[k]; }
  double operator[](std::size_t k) const { return values_[k]; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  std::vector<double>& storage() { return values_; }
  const std::vector<double>& storage() const { return values_; }

  double mean() const;
  double max_abs() const;
  bool all_finite() const;

  Field2D& operator+=(const Field2D& other);
  Field2D& operator-=(const Field2D& other);
  Field2D& operator*=(double s);

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

Field2D operator+(Field2D a, const Field2D& b);
Field2D operator-(Field2D a, const Field2D& b);
Field2D operator*(double s, Field2D a);

/// Throws std::invalid_argument if the two fields live on differently shaped grids.
void require_same_grid(const Field2D& a, const Field2D& b, const char* what);

/// Complex Fourier coefficients of a field on the same grid (unnormalised
/// forward DFT, FFT ordering along both axes).
struct SpectralField {
  GridPtr grid;
  std::vector<std::complex<double>> coeffs;
};

}  // namespace pfsim
