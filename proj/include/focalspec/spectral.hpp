#pragma once

#include <filesystem>
#include <memory>
#include <vector>

#include "focalspec/image.hpp"

namespace focalspec::spectral {

inline constexpr double default_tau_freq = 0.1;
inline constexpr double default_steepness = 50.0;

/// Soft complementary radial masks on the shifted-spectrum layout.
struct RadialMaskPair {
    Image m_high;
    Image m_low;
    double tau_freq = default_tau_freq;
    double steepness = default_steepness;
};

/// Depth-dependent band weights; lambda_low is the exact complement.
struct BandWeights {
    double lambda_high = 0.0;
    double lambda_low = 1.0;
    DepthLabel d;
};

/// Per-pixel normalized radial frequency for the shifted layout. Each axis is
/// scaled so its Nyquist frequency is 1 and the result is divided by sqrt(2):
/// r = 0 at DC and r = 1 at the corners of an even-sized grid.
Image radial_distance_map(int height, int width);

/// Logistic high-pass weight sigma(s * (r - tau)).
double high_mask_value(double r, double tau_freq, double steepness);

/// m_high = sigma(s (r - tau)), m_low = 1 - m_high.
/// Throws ContractError unless s > 0 and 0 < tau < 1.
RadialMaskPair make_masks(int height, int width, double tau_freq = default_tau_freq,
                          double steepness = default_steepness);

/// Memoized make_masks; safe to call concurrently.
std::shared_ptr<const RadialMaskPair> cached_masks(int height, int width,
                                                   double tau_freq = default_tau_freq,
                                                   double steepness = default_steepness);

/// Binary comparator: m_high = 1 where r >= tau, else 0. steepness is
/// reported as +infinity.
RadialMaskPair make_hard_masks(int height, int width, double tau_freq = default_tau_freq);

/// lambda_high(d) = -0.05 d^2 + 0.002 d + 0.02, lambda_low = 1 - lambda_high.
BandWeights band_weights(DepthLabel d);

/// Share of spectral energy under m_high, DC included in the denominator.
/// Returns 0 for an all-zero image.
double hf_energy_ratio(const Image& img, const RadialMaskPair& masks);

struct RadialBin {
    double r_center = 0.0;
    double mean_power = 0.0;
    std::size_t count = 0;
};

/// Mean |F|^2 in n_bins equal-width radial bins over [0, 1]; r = 1 falls in
/// the last bin. Empty bins report 0.
std::vector<RadialBin> radial_power_spectrum(const Image& img, int n_bins);

struct RatioRow {
    double d = 0.0;
    double ratio = 0.0;
};

/// CSV with header `d,hf_ratio` and 12 significant digits.
void write_ratio_csv(const std::filesystem::path& path, const std::vector<RatioRow>& rows);
/// CSV with header `r_center,mean_power` and 12 significant digits.
void write_radial_csv(const std::filesystem::path& path, const std::vector<RadialBin>& bins);

}  // namespace focalspec::spectral
