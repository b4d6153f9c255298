#include "pfsim/energetics.hpp"

#include <cmath>
#include <sstream>

#include "pfsim/fft.hpp"

namespace pfsim {

double bulk_f(double c, double e1, double e2, const BulkCoeffs& k) {
  const double s1 = e1 * e1, s2 = e2 * e2;
  return k.a1 * c * c + k.a2 * (1.0 - c) * (s1 + s2) + k.a41 * (s1 * s1 + s2 * s2) + k.a42 * (s1 * s2) +
         k.a61 * (s1 * s1 * s1 + s2 * s2 * s2);
}

double df_dc(double c, double e1, double e2, const BulkCoeffs& k) {
  return 2.0 * k.a1 * c - k.a2 * (e1 * e1 + e2 * e2);
}

double df_deta(double c, double e, double o, const BulkCoeffs& k) {
  const double e2 = e * e;
  return 2.0 * k.a2 * (1.0 - c) * e + 4.0 * k.a41 * e2 * e + 2.0 * k.a42 * e * (o * o) + 6.0 * k.a61 * e2 * e2 * e;
}

namespace {

template <class F>
Field2D pointwise(const Field2D& c, const Field2D& e1, const Field2D& e2, const char* what, F&& fn) {
  require_same_grid(c, e1, what);
  require_same_grid(c, e2, what);
  Field2D out(c.grid_ptr());
  for (std::size_t m = 0; m < out.size(); ++m) out[m] = fn(c[m], e1[m], e2[m]);
  return out;
}

}  // namespace

Field2D bulk_f(const Field2D& c, const Field2D& eta1, const Field2D& eta2, const BulkCoeffs& coeffs) {
  return pointwise(c, eta1, eta2, "bulk_f", [&](double a, double b, double d) { return bulk_f(a, b, d, coeffs); });
}

Field2D df_dc(const Field2D& c, const Field2D& eta1, const Field2D& eta2, const BulkCoeffs& coeffs) {
  return pointwise(c, eta1, eta2, "df_dc", [&](double a, double b, double d) { return df_dc(a, b, d, coeffs); });
}

Field2D df_deta(const Field2D& c, const Field2D& eta1, const Field2D& eta2, const BulkCoeffs& coeffs, int variant) {
  if (variant != 1 && variant != 2) {
    throw std::invalid_argument("df_deta: variant index must be 1 or 2, got " + std::to_string(variant));
  }
  if (variant == 1) {
    return pointwise(c, eta1, eta2, "df_deta", [&](double a, double b, double d) { return df_deta(a, b, d, coeffs); });
  }
  return pointwise(c, eta1, eta2, "df_deta", [&](double a, double b, double d) { return df_deta(a, d, b, coeffs); });
}

SingularAcousticTensor::SingularAcousticTensor(double nx, double ny)
    : std::runtime_error([&] {
        std::ostringstream os;
        os.precision(17);
        os << "singular acoustic tensor for direction n = (" << nx << ", " << ny << ")";
        return os.str();
      }()),
      direction{nx, ny} {}

namespace {

// e(p) : sigma(i) - (sigma(p) n) . omega . (sigma(i) n)
double kernel_entry(const Sym2& ep, const Sym2& sp, const Sym2& si, const Mat2& omega,
                    const std::array<double, 2>& n) {
  double direct = 0.0;
  for (int s = 0; s < 2; ++s)
    for (int t = 0; t < 2; ++t) direct += ep[s][t] * si[s][t];
  std::array<double, 2> ap{}, ai{};
  for (int s = 0; s < 2; ++s) {
    ap[s] = sp[s][0] * n[0] + sp[s][1] * n[1];
    ai[s] = si[s][0] * n[0] + si[s][1] * n[1];
  }
  double green = 0.0;
  for (int s = 0; s < 2; ++s)
    for (int u = 0; u < 2; ++u) green += ap[s] * omega[s][u] * ai[u];
  return direct - green;
}

Sym2 stress_of(const ElasticModel& m, const Sym2& e) {
  Sym2 sig{};
  for (int s = 0; s < 2; ++s)
    for (int t = 0; t < 2; ++t)
      for (int u = 0; u < 2; ++u)
        for (int v = 0; v < 2; ++v) sig[s][t] += m.stiffness(s, t, u, v) * e[u][v];
  return sig;
}

Mat2 kernel_with_stress(const std::array<double, 2>& n, const ElasticModel& model, const std::array<Sym2, 2>& sig) {
  Mat2 acoustic{};
  for (int s = 0; s < 2; ++s)
    for (int u = 0; u < 2; ++u)
      for (int t = 0; t < 2; ++t)
        for (int v = 0; v < 2; ++v) acoustic[s][u] += model.stiffness(s, t, u, v) * n[t] * n[v];
  const double det = acoustic[0][0] * acoustic[1][1] - acoustic[0][1] * acoustic[1][0];
  const double scale = std::abs(acoustic[0][0]) + std::abs(acoustic[1][1]);
  if (!std::isfinite(det) || std::abs(det) <= 1e-14 * scale * scale) throw SingularAcousticTensor(n[0], n[1]);
  const Mat2 omega{{{acoustic[1][1] / det, -acoustic[0][1] / det}, {-acoustic[1][0] / det, acoustic[0][0] / det}}};
  Mat2 b{};
  for (int p = 0; p < 2; ++p)
    for (int i = 0; i < 2; ++i)
      b[p][i] = kernel_entry(model.eigenstrain[p], sig[p], sig[i], omega, n);
  return b;
}

}  // namespace

Mat2 elastic_kernel(std::array<double, 2> n, const ElasticModel& model) {
  const double len = std::hypot(n[0], n[1]);
  if (std::abs(len - 1.0) > 1e-12) throw std::invalid_argument("elastic_kernel: n must be a unit vector");
  const std::array<Sym2, 2> sig{stress_of(model, model.eigenstrain[0]), stress_of(model, model.eigenstrain[1])};
  return kernel_with_stress(n, model, sig);
}

ElasticKernelTable::ElasticKernelTable(GridPtr grid, const ElasticModel& model) : grid_(std::move(grid)) {
  model.validate();
  const auto& g = *grid_;
  for (auto& row : b_)
    for (auto& v : row) v.assign(g.size(), 0.0);
  zero_ = !model.has_eigenstrain();
  if (zero_) return;
  const std::array<Sym2, 2> sig{stress_of(model, model.eigenstrain[0]), stress_of(model, model.eigenstrain[1])};
  for (std::size_t i = 0; i < g.nx(); ++i) {
    for (std::size_t j = 0; j < g.ny(); ++j) {
      const double kx = g.kx()[i], ky = g.ky()[j];
      const double k = std::hypot(kx, ky);
      if (k == 0.0) continue;
      const Mat2 b = kernel_with_stress({kx / k, ky / k}, model, sig);
      const std::size_t m = g.index(i, j);
      for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q) b_[p][q][m] = b[p][q];
    }
  }
}

namespace {

fft::cplx mix(const ElasticKernelTable& t, std::size_t m, int i, const SpectralField& th1, const SpectralField& th2) {
  return t.at(m, 0, i) * th1.coeffs[m] + t.at(m, 1, i) * th2.coeffs[m];
}

Field2D squared(const Field2D& f) {
  Field2D out(f.grid_ptr());
  for (std::size_t m = 0; m < f.size(); ++m) out[m] = f[m] * f[m];
  return out;
}

}  // namespace

ElasticForce elastic_driving_force(const Field2D& eta1, const Field2D& eta2, const ElasticKernelTable& table) {
  require_same_grid(eta1, eta2, "elastic_driving_force");
  if (!eta1.grid().same_shape(table.grid())) {
    throw std::invalid_argument("elastic_driving_force: kernel table built for a different grid");
  }
  ElasticForce out{Field2D(eta1.grid_ptr()), Field2D(eta1.grid_ptr()), 0.0};
  if (table.is_zero()) return out;

  const auto th1 = fft::forward(squared(eta1));
  const auto th2 = fft::forward(squared(eta2));
  const std::size_t n = eta1.size();
  for (int i = 0; i < 2; ++i) {
    SpectralField s{eta1.grid_ptr(), std::vector<fft::cplx>(n)};
    for (std::size_t m = 0; m < n; ++m) s.coeffs[m] = mix(table, m, i, th1, th2);
    double imag = 0.0;
    Field2D conv = fft::inverse_real(s, &imag);
    out.max_imag_residue = std::max(out.max_imag_residue, imag);
    const Field2D& e = i == 0 ? eta1 : eta2;
    Field2D& dst = i == 0 ? out.eta1 : out.eta2;
    for (std::size_t m = 0; m < n; ++m) dst[m] = 2.0 * e[m] * conv[m];
  }
  return out;
}

ElasticForce elastic_driving_force(const Field2D& eta1, const Field2D& eta2, const ElasticModel& model) {
  return elastic_driving_force(eta1, eta2, ElasticKernelTable(eta1.grid_ptr(), model));
}

double elastic_energy(const Field2D& eta1, const Field2D& eta2, const ElasticKernelTable& table) {
  if (table.is_zero()) return 0.0;
  const auto& g = eta1.grid();
  const auto th1 = fft::forward(squared(eta1));
  const auto th2 = fft::forward(squared(eta2));
  fft::cplx sum = 0.0;
  for (std::size_t m = 0; m < g.size(); ++m) {
    sum += mix(table, m, 0, th1, th2) * std::conj(th1.coeffs[m]);
    sum += mix(table, m, 1, th1, th2) * std::conj(th2.coeffs[m]);
  }
  const double cell = g.hx() * g.hy();
  return 0.5 * cell / static_cast<double>(g.size()) * sum.real();
}

namespace {

// Integral of |grad f|^2 via Parseval.
double gradient_energy(const Field2D& f) {
  const auto& g = f.grid();
  const auto s = fft::forward(f);
  double sum = 0.0;
  for (std::size_t i = 0; i < g.nx(); ++i)
    for (std::size_t j = 0; j < g.ny(); ++j) {
      const double k2 = g.kx()[i] * g.kx()[i] + g.ky()[j] * g.ky()[j];
      sum += k2 * std::norm(s.coeffs[g.index(i, j)]);
    }
  return g.hx() * g.hy() * sum / static_cast<double>(g.size());
}

}  // namespace

double total_energy(const FieldSet& fields, const SimParams& params, const ElasticKernelTable& table) {
  fields.validate();
  const auto& g = fields.grid();
  const double cell = g.hx() * g.hy();
  double bulk = 0.0;
  for (std::size_t m = 0; m < g.size(); ++m) bulk += bulk_f(fields.c[m], fields.eta1[m], fields.eta2[m], params.bulk);
  bulk *= cell;
  const double grad = params.kappa_c * gradient_energy(fields.c) +
                      params.kappa_eta * (gradient_energy(fields.eta1) + gradient_energy(fields.eta2));
  return bulk + grad + elastic_energy(fields.eta1, fields.eta2, table);
}

double total_energy(const FieldSet& fields, const SimParams& params) {
  return total_energy(fields, params, ElasticKernelTable(fields.c.grid_ptr(), params.elastic));
}

}  // namespace pfsim
