#pragma once

#include <complex>
#include <cstddef>
#include <span>

#include "pfsim/grid.hpp"

namespace pfsim::fft {

using cplx = std::complex<double>;

// Thin wrappers over FFTW. Plans are created once per shape (estimate mode,
// so they are deterministic) and reused; execution is thread-safe.
// Forward transforms are unnormalised, inverse transforms divide by the size.

void forward_2d(std::size_t nx, std::size_t ny, std::span<const cplx> in, std::span<cplx> out);
void inverse_2d(std::size_t nx, std::size_t ny, std::span<const cplx> in, std::span<cplx> out);

void forward_1d(std::size_t n, std::span<const cplx> in, std::span<cplx> out);
void inverse_1d(std::size_t n, std::span<const cplx> in, std::span<cplx> out);

SpectralField forward(const Field2D& f);

/// Inverse transform, discarding the imaginary part. If max_imag is given it
/// receives the largest |Im| seen before the discard.
Field2D inverse_real(const SpectralField& s, double* max_imag = nullptr);

/// Energy in wavenumber space, lx*ly/N^2 * sum |F_k|^2; equals the real-space
/// integral sum f^2 * hx * hy by Parseval.
double spectral_energy(const SpectralField& s);

}  // namespace pfsim::fft
