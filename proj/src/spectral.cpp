#include "pfsim/spectral.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "pfsim/fft.hpp"

namespace pfsim {
namespace {

using cplx = std::complex<double>;

void check_order(int order, const char* what) {
  if (order != 1 && order != 2 && order != 4) {
    throw std::invalid_argument(std::string(what) + ": unsupported derivative order " + std::to_string(order));
  }
}

// (i k)^order for order in {1, 2, 4}.
cplx ik_power(double k, int order) {
  switch (order) {
    case 1: return {0.0, k};
    case 2: return {-k * k, 0.0};
    default: return {k * k * k * k, 0.0};
  }
}

}  // namespace

void DerivBackend::validate() const {
  if (tag == Tag::FourierExtension && pad < 1) {
    throw std::invalid_argument("DerivBackend: Fourier extension requires pad >= 1");
  }
}

std::string_view to_string(DerivBackend::Tag tag) {
  switch (tag) {
    case DerivBackend::Tag::FdmCentral: return "fdm";
    case DerivBackend::Tag::PseudoSpectral: return "pseudo";
    case DerivBackend::Tag::FourierExtension: return "fext";
  }
  return "?";
}

DerivBackend parse_backend(std::string_view name, std::size_t pad) {
  if (name == "fdm" || name == "fdm-central" || name == "central") return DerivBackend::fdm();
  if (name == "pseudo" || name == "pseudo-spectral" || name == "spectral") return DerivBackend::pseudo_spectral();
  if (name == "fext" || name == "fourier-extension") {
    auto b = DerivBackend::fourier_extension(pad);
    b.validate();
    return b;
  }
  throw std::invalid_argument("unknown derivative backend '" + std::string(name) + "' (expected fdm|pseudo|fext)");
}

SpectralDerivResult spectral_deriv_with_residue(const Field2D& f, Axis axis, int order) {
  check_order(order, "spectral_deriv");
  const auto& g = f.grid();
  auto s = fft::forward(f);
  const std::size_t nx = g.nx(), ny = g.ny();
  const auto& k = axis == Axis::X ? g.kx() : g.ky();
  const std::size_t nyquist = (axis == Axis::X ? nx : ny) / 2;
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < ny; ++j) {
      const std::size_t m = axis == Axis::X ? i : j;
      auto& c = s.coeffs[i * ny + j];
      if (order % 2 == 1 && m == nyquist) {
        c = 0.0;
      } else {
        c *= ik_power(k[m], order);
      }
    }
  }
  SpectralDerivResult r;
  r.value = fft::inverse_real(s, &r.max_imag_residue);
  return r;
}

Field2D spectral_deriv(const Field2D& f, Axis axis, int order) {
  return spectral_deriv_with_residue(f, axis, order).value;
}

Field2D fdm_deriv(const Field2D& f, Axis axis, int order) {
  check_order(order, "fdm_deriv");
  const auto& g = f.grid();
  const std::size_t n = axis == Axis::X ? g.nx() : g.ny();
  if (n < 5) throw std::invalid_argument("fdm_deriv: need at least 5 points along the axis");
  const double h = axis == Axis::X ? g.hx() : g.hy();
  const std::size_t nx = g.nx(), ny = g.ny();
  Field2D out(f.grid_ptr());

  auto at = [&](std::size_t i, std::size_t j, long shift) {
    if (axis == Axis::X) {
      const auto ii = static_cast<std::size_t>((static_cast<long>(i) + shift + static_cast<long>(nx)) % static_cast<long>(nx));
      return f(ii, j);
    }
    const auto jj = static_cast<std::size_t>((static_cast<long>(j) + shift + static_cast<long>(ny)) % static_cast<long>(ny));
    return f(i, jj);
  };

  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < ny; ++j) {
      double v = 0.0;
      switch (order) {
        case 1: v = (at(i, j, 1) - at(i, j, -1)) / (2.0 * h); break;
        case 2: v = (at(i, j, 1) - 2.0 * at(i, j, 0) + at(i, j, -1)) / (h * h); break;
        default:
          v = (at(i, j, 2) - 4.0 * at(i, j, 1) + 6.0 * at(i, j, 0) - 4.0 * at(i, j, -1) + at(i, j, -2)) /
              (h * h * h * h);
      }
      out(i, j) = v;
    }
  }
  return out;
}

Field2D deriv(const Field2D& f, Axis axis, int order, const DerivBackend& backend) {
  return backend.spectral_in_space() ? spectral_deriv(f, axis, order) : fdm_deriv(f, axis, order);
}

Field2D laplacian(const Field2D& f, const DerivBackend& backend) {
  return deriv(f, Axis::X, 2, backend) + deriv(f, Axis::Y, 2, backend);
}

namespace {

void central_time_deriv(std::span<const double> u, double dt, std::span<double> out) {
  const std::size_t t = u.size();
  // written as differences so a constant series gives exactly zero
  out[0] = (4.0 * (u[1] - u[0]) - (u[2] - u[0])) / (2.0 * dt);
  for (std::size_t i = 1; i + 1 < t; ++i) out[i] = (u[i + 1] - u[i - 1]) / (2.0 * dt);
  out[t - 1] = (4.0 * (u[t - 1] - u[t - 2]) - (u[t - 1] - u[t - 3])) / (2.0 * dt);
}

// Zero-pad to length T + pad, differentiate the padded series as if periodic
// with period (T + pad) * dt, keep the first T samples.
void extension_time_deriv(std::span<const double> u, double dt, std::size_t pad, std::span<double> out,
                          std::vector<cplx>& buf_in, std::vector<cplx>& buf_out) {
  const std::size_t t = u.size();
  const std::size_t n = t + pad;
  buf_in.assign(n, 0.0);
  buf_out.resize(n);
  for (std::size_t i = 0; i < t; ++i) buf_in[i] = u[i];
  fft::forward_1d(n, buf_in, buf_out);
  const double scale = 2.0 * std::acos(-1.0) / (static_cast<double>(n) * dt);
  for (std::size_t i = 0; i < n; ++i) {
    const long m = i < (n + 1) / 2 ? static_cast<long>(i) : static_cast<long>(i) - static_cast<long>(n);
    if (n % 2 == 0 && i == n / 2) {
      buf_out[i] = 0.0;
    } else {
      buf_out[i] *= cplx(0.0, scale * static_cast<double>(m));
    }
  }
  fft::inverse_1d(n, buf_out, buf_in);
  for (std::size_t i = 0; i < t; ++i) out[i] = buf_in[i].real();
}

void check_time_args(std::size_t t, double dt, const DerivBackend& backend) {
  if (t < 3) throw std::invalid_argument("time_deriv: need at least 3 frames, got " + std::to_string(t));
  if (!(dt > 0.0)) throw std::invalid_argument("time_deriv: dt must be positive");
  backend.validate();
}

}  // namespace

std::vector<double> time_deriv(std::span<const double> series, double dt, const DerivBackend& backend) {
  check_time_args(series.size(), dt, backend);
  std::vector<double> out(series.size());
  if (backend.tag == DerivBackend::Tag::FourierExtension) {
    std::vector<cplx> a, b;
    extension_time_deriv(series, dt, backend.pad, out, a, b);
  } else {
    central_time_deriv(series, dt, out);
  }
  return out;
}

std::vector<Field2D> time_deriv(std::span<const Field2D> frames, double dt, const DerivBackend& backend) {
  check_time_args(frames.size(), dt, backend);
  const std::size_t t = frames.size();
  for (const auto& fr : frames) require_same_grid(frames[0], fr, "time_deriv");
  std::vector<Field2D> out(t, Field2D(frames[0].grid_ptr()));
  const std::size_t npts = frames[0].size();
  std::vector<double> series(t), d(t);
  std::vector<cplx> a, b;
  for (std::size_t p = 0; p < npts; ++p) {
    for (std::size_t i = 0; i < t; ++i) series[i] = frames[i][p];
    if (backend.tag == DerivBackend::Tag::FourierExtension) {
      extension_time_deriv(series, dt, backend.pad, d, a, b);
    } else {
      central_time_deriv(series, dt, d);
    }
    for (std::size_t i = 0; i < t; ++i) out[i][p] = d[i];
  }
  return out;
}

}  // namespace pfsim
