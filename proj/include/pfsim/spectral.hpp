#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pfsim/grid.hpp"

namespace pfsim {

enum class Axis { X, Y };

/// How spatial and temporal derivatives are discretised.
///  - FdmCentral: second-order central stencils in space and time.
///  - PseudoSpectral: Fourier multipliers in space, central differences in time.
///  - FourierExtension: Fourier multipliers in space; in time the series is
///    zero-padded by `pad` frames and differentiated spectrally.
struct DerivBackend {
  enum class Tag { FdmCentral, PseudoSpectral, FourierExtension };

  Tag tag = Tag::PseudoSpectral;
  std::size_t pad = 0;

  static DerivBackend fdm() { return {Tag::FdmCentral, 0}; }
  static DerivBackend pseudo_spectral() { return {Tag::PseudoSpectral, 0}; }
  static DerivBackend fourier_extension(std::size_t pad = kDefaultPad) { return {Tag::FourierExtension, pad}; }

  /// Throws std::invalid_argument for a FourierExtension backend with pad == 0.
  void validate() const;
  bool spectral_in_space() const { return tag != Tag::FdmCentral; }

  static constexpr std::size_t kDefaultPad = 28;
};

std::string_view to_string(DerivBackend::Tag tag);
/// Accepts "fdm", "pseudo", "fext" (and the long names).
DerivBackend parse_backend(std::string_view name, std::size_t pad = DerivBackend::kDefaultPad);

/// Inverse transform of (i k)^order * F along one axis. Odd orders drop the
/// Nyquist mode. order must be 1, 2 or 4.
Field2D spectral_deriv(const Field2D& f, Axis axis, int order);

struct SpectralDerivResult {
  Field2D value;
  double max_imag_residue = 0.0;
};
SpectralDerivResult spectral_deriv_with_residue(const Field2D& f, Axis axis, int order);

/// Second-order central differences with periodic wrap.
Field2D fdm_deriv(const Field2D& f, Axis axis, int order);

/// Spatial derivative with the backend's spatial discretisation.
Field2D deriv(const Field2D& f, Axis axis, int order, const DerivBackend& backend);

/// Laplacian (d2/dx2 + d2/dy2) under the backend.
Field2D laplacian(const Field2D& f, const DerivBackend& backend);

/// First time derivative of a series sampled at uniform spacing dt.
std::vector<double> time_deriv(std::span<const double> series, double dt, const DerivBackend& backend);

/// Pointwise time derivative of a sequence of frames. Every frame must live
/// on the same grid; frames.size() >= 3.
std::vector<Field2D> time_deriv(std::span<const Field2D> frames, double dt, const DerivBackend& backend);

}  // namespace pfsim
