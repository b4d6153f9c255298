#include "pfsim/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>
#include <vector>

namespace pfsim::fft {
namespace {

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

// The FFTW planner is not re-entrant; every plan is made under this lock.
// Plans live for the whole process.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

const PlanPair& plans_for(std::size_t nx, std::size_t ny) {
  static std::map<std::pair<std::size_t, std::size_t>, PlanPair> cache;
  std::lock_guard lock(planner_mutex());
  auto key = std::make_pair(nx, ny);
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  std::vector<cplx> a(nx * ny), b(nx * ny);
  auto* in = reinterpret_cast<fftw_complex*>(a.data());
  auto* out = reinterpret_cast<fftw_complex*>(b.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  PlanPair p;
  if (ny == 0) {
    p.forward = fftw_plan_dft_1d(static_cast<int>(nx), in, out, FFTW_FORWARD, flags);
    p.backward = fftw_plan_dft_1d(static_cast<int>(nx), in, out, FFTW_BACKWARD, flags);
  } else {
    p.forward = fftw_plan_dft_2d(static_cast<int>(nx), static_cast<int>(ny), in, out, FFTW_FORWARD, flags);
    p.backward = fftw_plan_dft_2d(static_cast<int>(nx), static_cast<int>(ny), in, out, FFTW_BACKWARD, flags);
  }
  if (!p.forward || !p.backward) throw std::runtime_error("fftw: plan creation failed");
  return cache.emplace(key, p).first->second;
}

void execute(fftw_plan plan, std::span<const cplx> in, std::span<cplx> out) {
  // Plans are out-of-place; FFTW does not write to the input of an
  // out-of-place complex transform.
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in.data())),
                   reinterpret_cast<fftw_complex*>(out.data()));
}

void check_sizes(std::size_t n, std::span<const cplx> in, std::span<cplx> out) {
  if (in.size() != n || out.size() != n) throw std::invalid_argument("fft: buffer size mismatch");
  if (in.data() == out.data()) throw std::invalid_argument("fft: in-place transforms are not supported");
}

}  // namespace

void forward_2d(std::size_t nx, std::size_t ny, std::span<const cplx> in, std::span<cplx> out) {
  check_sizes(nx * ny, in, out);
  execute(plans_for(nx, ny).forward, in, out);
}

void inverse_2d(std::size_t nx, std::size_t ny, std::span<const cplx> in, std::span<cplx> out) {
  check_sizes(nx * ny, in, out);
  execute(plans_for(nx, ny).backward, in, out);
  const double inv = 1.0 / static_cast<double>(nx * ny);
  for (auto& v : out) v *= inv;
}

void forward_1d(std::size_t n, std::span<const cplx> in, std::span<cplx> out) {
  check_sizes(n, in, out);
  execute(plans_for(n, 0).forward, in, out);
}

void inverse_1d(std::size_t n, std::span<const cplx> in, std::span<cplx> out) {
  check_sizes(n, in, out);
  execute(plans_for(n, 0).backward, in, out);
  const double inv = 1.0 / static_cast<double>(n);
  for (auto& v : out) v *= inv;
}

// Per-thread staging buffer for the real <-> complex copies.
std::vector<cplx>& scratch(std::size_t n) {
  thread_local std::vector<cplx> buf;
  buf.resize(n);
  return buf;
}

SpectralField forward(const Field2D& f) {
  const auto& g = f.grid();
  auto& in = scratch(g.size());
  std::copy(f.values().begin(), f.values().end(), in.begin());
  SpectralField s{f.grid_ptr(), std::vector<cplx>(g.size())};
  forward_2d(g.nx(), g.ny(), in, s.coeffs);
  return s;
}

Field2D inverse_real(const SpectralField& s, double* max_imag) {
  const auto& g = *s.grid;
  auto& out = scratch(g.size());
  inverse_2d(g.nx(), g.ny(), s.coeffs, out);
  Field2D f(s.grid);
  double imag = 0.0;
  for (std::size_t k = 0; k < out.size(); ++k) {
    f[k] = out[k].real();
    imag = std::max(imag, std::abs(out[k].imag()));
  }
  if (max_imag) *max_imag = imag;
  return f;
}

double spectral_energy(const SpectralField& s) {
  const auto& g = *s.grid;
  double sum = 0.0;
  for (const auto& c : s.coeffs) sum += std::norm(c);
  const double n = static_cast<double>(g.size());
  return g.lx() * g.ly() * sum / (n * n);
}

}  // namespace pfsim::fft
