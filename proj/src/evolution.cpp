#include "pfsim/evolution.hpp"

#include <cmath>
#include <sstream>

#include "pfsim/fft.hpp"
#include "pfsim/spectral.hpp"

namespace pfsim {
namespace {

std::string blowup_message(long frame, double mag, double time) {
  std::ostringstream os;
  os.precision(6);
  os << "integration blew up";
  if (frame >= 0) os << " while producing frame " << frame;
  os << " at t = " << time << " (max |value| = " << mag << ")";
  return os.str();
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform in [-1, 1) from (seed, stream, counter).
double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  const std::uint64_t key = splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
  const std::uint64_t bits = splitmix64(key + counter);
  return 2.0 * (static_cast<double>(bits >> 11) * 0x1.0p-53) - 1.0;
}

double max_abs_or_inf(const Field2D& f) {
  double m = 0.0;
  for (double v : f.values()) {
    if (!std::isfinite(v)) return INFINITY;
    m = std::max(m, std::abs(v));
  }
  return m;
}

}  // namespace

IntegrationBlowup::IntegrationBlowup(long frame_, double mag, double t)
    : std::runtime_error(blowup_message(frame_, mag, t)), frame(frame_), max_magnitude(mag), time(t) {}

FieldSet make_initial(double c0, std::uint64_t seed, GridPtr grid, double noise_amp) {
  if (!(c0 > 0.0 && c0 < 1.0)) throw std::invalid_argument("make_initial: c0 must lie in (0, 1)");
  if (!(noise_amp >= 0.0) || !std::isfinite(noise_amp)) {
    throw std::invalid_argument("make_initial: noise_amp must be finite and >= 0");
  }
  FieldSet fs{Field2D(grid, c0), Field2D(grid), Field2D(grid), 0.0};
  if (noise_amp == 0.0) return fs;
  for (std::size_t m = 0; m < grid->size(); ++m) {
    fs.c[m] = c0 + noise_amp * counter_uniform(seed, 0, m);
    fs.eta1[m] = noise_amp * counter_uniform(seed, 1, m);
    fs.eta2[m] = noise_amp * counter_uniform(seed, 2, m);
  }
  return fs;
}

SemiImplicitStepper::SemiImplicitStepper(GridPtr grid, SimParams params)
    : grid_(std::move(grid)), params_(std::move(params)), kernels_(grid_, params_.elastic) {
  params_.validate();
  const auto& g = *grid_;
  const std::size_t n = g.size();
  k2_.resize(n);
  k4_.resize(n);
  ch_den_.resize(n);
  ac_den_.resize(n);
  const auto& p = params_;
  for (std::size_t i = 0; i < g.nx(); ++i) {
    for (std::size_t j = 0; j < g.ny(); ++j) {
      const std::size_t m = g.index(i, j);
      const double kx2 = g.kx()[i] * g.kx()[i], ky2 = g.ky()[j] * g.ky()[j];
      k2_[m] = kx2 + ky2;
      k4_[m] = p.ch_spatial_form == SpatialForm::FullBiharmonic ? k2_[m] * k2_[m] : kx2 * kx2 + ky2 * ky2;
      ch_den_[m] = 1.0 + p.dt * 2.0 * p.kappa_c * p.mobility_m * k4_[m];
      ac_den_[m] = 1.0 + p.dt * 2.0 * p.kappa_eta * p.kinetic_l * k2_[m];
    }
  }
}

FieldSet SemiImplicitStepper::step(const FieldSet& s) const {
  s.validate();
  if (!s.c.grid().same_shape(*grid_)) throw std::invalid_argument("step: state grid differs from stepper grid");
  const auto& p = params_;
  const std::size_t n = grid_->size();
  const double dt = p.dt;

  FieldSet out{Field2D(grid_), Field2D(grid_), Field2D(grid_), s.time + dt};

  // Cahn-Hilliard.
  const auto c_hat = fft::forward(s.c);
  SpectralField next{grid_, std::vector<fft::cplx>(n)};
  const Field2D mu_bulk = df_dc(s.c, s.eta1, s.eta2, p.bulk);
  if (p.constant_mobility()) {
    const auto f_hat = fft::forward(mu_bulk);
    for (std::size_t m = 0; m < n; ++m) {
      next.coeffs[m] = (c_hat.coeffs[m] - dt * p.mobility_m * k2_[m] * f_hat.coeffs[m]) / ch_den_[m];
    }
  } else {
    // div(M(c) grad mu) explicit, with mu = df/dc - 2 kappa_c lap c, stabilised
    // by the constant-mobility biharmonic term taken implicitly.
    const auto spectral = DerivBackend::pseudo_spectral();
    Field2D mu = mu_bulk - 2.0 * p.kappa_c * laplacian(s.c, spectral);
    Field2D gx = spectral_deriv(mu, Axis::X, 1);
    Field2D gy = spectral_deriv(mu, Axis::Y, 1);
    for (std::size_t m = 0; m < n; ++m) {
      const double mob = p.mobility(s.c[m]);
      gx[m] *= mob;
      gy[m] *= mob;
    }
    const Field2D flux = spectral_deriv(gx, Axis::X, 1) + spectral_deriv(gy, Axis::Y, 1);
    const auto flux_hat = fft::forward(flux);
    for (std::size_t m = 0; m < n; ++m) {
      const double stab = dt * 2.0 * p.kappa_c * p.mobility_m * k4_[m];
      next.coeffs[m] = (c_hat.coeffs[m] + dt * flux_hat.coeffs[m] + stab * c_hat.coeffs[m]) / ch_den_[m];
    }
  }
  out.c = fft::inverse_real(next);

  // Allen-Cahn, both variants.
  const ElasticForce el = elastic_driving_force(s.eta1, s.eta2, kernels_);
  for (int v = 1; v <= 2; ++v) {
    const Field2D& eta = s.eta(v);
    Field2D drive = df_deta(s.c, s.eta1, s.eta2, p.bulk, v);
    drive += v == 1 ? el.eta1 : el.eta2;
    const auto e_hat = fft::forward(eta);
    const auto d_hat = fft::forward(drive);
    for (std::size_t m = 0; m < n; ++m) {
      next.coeffs[m] = (e_hat.coeffs[m] - dt * p.kinetic_l * d_hat.coeffs[m]) / ac_den_[m];
    }
    (v == 1 ? out.eta1 : out.eta2) = fft::inverse_real(next);
  }

  if (!out.all_finite()) {
    const double mag = std::max({max_abs_or_inf(out.c), max_abs_or_inf(out.eta1), max_abs_or_inf(out.eta2)});
    throw IntegrationBlowup(-1, mag, out.time);
  }
  return out;
}

FieldSet step(const FieldSet& state, const SimParams& params) {
  return SemiImplicitStepper(state.c.grid_ptr(), params).step(state);
}

Trajectory simulate(const FieldSet& initial, const SimParams& params, std::size_t n_frames, std::size_t substeps) {
  if (n_frames < 2) throw std::invalid_argument("simulate: need at least 2 frames");
  if (substeps < 1) throw std::invalid_argument("simulate: substeps must be >= 1");
  initial.validate();
  SemiImplicitStepper stepper(initial.c.grid_ptr(), params);

  Trajectory traj;
  traj.dt = params.dt * static_cast<double>(substeps);
  traj.params = params;
  traj.frames.reserve(n_frames);
  traj.frames.push_back(initial);

  FieldSet state = initial;
  bool warned = false;
  for (std::size_t f = 1; f < n_frames; ++f) {
    try {
      for (std::size_t s = 0; s < substeps; ++s) state = stepper.step(state);
    } catch (const IntegrationBlowup& e) {
      throw IntegrationBlowup(static_cast<long>(f), e.max_magnitude, e.time);
    }
    // Timestamps are pinned to the frame grid rather than accumulated.
    state.time = initial.time + static_cast<double>(f) * traj.dt;
    if (!warned) {
      for (double v : state.c.values()) {
        if (v < -0.1 || v > 1.1) {
          std::ostringstream os;
          os << "composition left [-0.1, 1.1] at frame " << f << " (value " << v << ")";
          traj.warnings.push_back(os.str());
          warned = true;
          break;
        }
      }
    }
    traj.frames.push_back(state);
  }
  return traj;
}

}  // namespace pfsim
