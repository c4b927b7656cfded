#pragma once

#include "focalspec/image.hpp"

namespace focalspec {

/// Unnormalized forward 2D DFT, center-shifted (DC at (H/2, W/2)).
Spectrum fft2(const Image& img);

/// Inverse of fft2, including the 1/(HW) factor. Accepts shifted or
/// unshifted spectra. Returns the real part with role residual.
Image ifft2(const Spectrum& spec);

/// Moves DC from (0,0) to (H/2, W/2); odd sizes use floor(N/2).
Spectrum fftshift(const Spectrum& spec);
/// Inverse of fftshift.
Spectrum ifftshift(const Spectrum& spec);

struct SpectralEnergy {
    double spatial_sse = 0.0;
    double spectral_sse_scaled = 0.0;
};

/// Spatial squared error and the (1/HW)-scaled spectral squared error of the
/// same pair. The two agree by Parseval's identity.
SpectralEnergy spectral_energy_identity(const Image& x, const Image& y);

namespace detail {

/// In-place complex 2D transform on an unshifted row-major grid.
/// sign = -1 forward, +1 backward; no normalization.
void dft2_inplace(std::span<std::complex<double>> data, int height, int width, int sign);

}  // namespace detail

}  // namespace focalspec
