#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "focalspec/image.hpp"
#include "focalspec/spectral.hpp"

namespace focalspec::optics {

enum class OtfKind { gaussian, hopkins_sinc };

OtfKind parse_otf_kind(const std::string& name);
std::string to_string(OtfKind kind);

/// Parametric depth-dependent transfer function. Both kinds are unity at d = 0.
///   gaussian:     H = exp(-(kappa |d| r)^2)
///   hopkins_sinc: H = sinc(kappa |d| r (1 - r)), sinc(z) = sin(pi z) / (pi z)
struct OtfModel {
    OtfKind kind = OtfKind::gaussian;
    double kappa = 8.0;        ///< defocus strength
    double noise_sigma = 0.0;  ///< additive Gaussian sensor noise (intensity units)

    void validate() const;
};

/// Synthetic microrobot: an elliptical body (pitch foreshortens the vertical
/// axis by cos(pitch)) with n_arms radial bars whose in-plane angle is set by
/// roll. The seed drives a faint surface texture on the body and arms.
struct PhantomSpec {
    int pitch_deg = 0;  ///< multiple of 10 in [0, 60]
    int roll_deg = 0;   ///< multiple of 10 in [0, 60]
    double body_radius = 24.0;
    int n_arms = 4;
    double arm_length = 48.0;
    std::uint64_t seed = 0;

    void validate() const;
    /// Radius of the smallest centered circle containing the robot (pixels).
    double extent() const;
};

/// Transfer function sampled on the shifted spectrum layout (role residual).
Image otf(const OtfModel& model, DepthLabel d, int height, int width);

/// Real part of ifft2(otf . fft2(sharp)) plus seeded sensor noise, clamped to [0, 1].
Image render_defocused(const Image& sharp, const OtfModel& model, DepthLabel d,
                       std::uint64_t noise_seed);

/// Anti-aliased rendering of the phantom centered in the frame (4x4 supersampling).
/// Throws ContractError when the robot does not fit inside the frame.
Image make_phantom(const PhantomSpec& spec, int height, int width);

struct ConditionMaps {
    Image control1;  ///< projected normalized z, max-composited
    Image control2;  ///< soft coverage of points within slice_eps of depth d
};

inline constexpr double default_slice_eps = 0.05;

/// Renders both conditioning maps from the phantom's 3D point set.
///
/// Points are the supersamples of the robot's (planar) body frame after the
/// pitch rotation; z is expressed in normalized depth units as
/// z_pixels / (2 * extent), so the robot spans at most [-0.5, 0.5].
/// control1 stores (z - z_min) / (z_max - z_min), or 0 when the z-range is
/// degenerate. control2 is the fraction of a pixel's samples with |z - d| < slice_eps.
ConditionMaps render_conditions(const PhantomSpec& spec, DepthLabel d, double slice_eps,
                                int height, int width);

/// Robot coverage map using the same sample grid as render_conditions.
Image silhouette(const PhantomSpec& spec, int height, int width);

/// c1 + w * c2, clamped to [0, 1].
Image fuse_conditions(const Image& c1, const Image& c2, double w = 0.3);

struct SweepSettings {
    int height = 256;
    int width = 256;
    double tau_freq = spectral::default_tau_freq;
    double steepness = spectral::default_steepness;
    int threads = 1;
};

/// hf_energy_ratio of the defocused phantom at each depth, sorted by d.
/// Noise uses spec.seed.
std::vector<spectral::RatioRow> depth_sweep(const PhantomSpec& spec, const OtfModel& model,
                                            const std::vector<DepthLabel>& depths,
                                            const SweepSettings& settings = {});

/// n evenly spaced depths covering [-0.5, 0.5] (n >= 2), or {0} when n == 1.
std::vector<DepthLabel> uniform_depths(int n);

/// Depth at which calibration measures the decay ratio.
inline constexpr double calibration_depth = 0.45;
inline constexpr double calibration_kappa_min = 0.1;
inline constexpr double calibration_kappa_max = 100.0;
/// Smallest accepted target decay; targets closer to 1 are rejected.
inline constexpr double min_target_decay = 1.001;

/// ratio(0) / ratio(calibration_depth) for the given model (noise ignored).
double decay_ratio(const PhantomSpec& spec, const OtfModel& model,
                   const SweepSettings& settings = {});

/// Log-space bisection of kappa over [0.1, 100] until the decay ratio lands in
/// [target_decay, 1.5 * target_decay]. Throws CalibrationError if the bracket
/// cannot reach the window.
double calibrate_kappa(const PhantomSpec& spec, OtfKind kind, double target_decay,
                       const SweepSettings& settings = {});

}  // namespace focalspec::optics
