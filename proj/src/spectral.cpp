#include "focalspec/spectral.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <tuple>

#include "focalspec/error.hpp"
#include "focalspec/fft.hpp"

namespace focalspec::spectral {

namespace {

void check_mask_params(double tau_freq, double steepness) {
    if (!(steepness > 0.0) || !std::isfinite(steepness)) {
        throw ContractError("mask steepness must be positive");
    }
    if (!(tau_freq > 0.0 && tau_freq < 1.0)) {
        throw ContractError("tau_freq must lie in (0, 1)");
    }
}

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace

Image radial_distance_map(int height, int width) {
    if (height <= 0 || width <= 0) throw DimensionError("radial_distance_map: non-positive size");
    Image r(height, width);
    const int cy = height / 2;
    const int cx = width / 2;
    const double half_h = height / 2.0;
    const double half_w = width / 2.0;
    for (int row = 0; row < height; ++row) {
        const double fy = (row - cy) / half_h;
        for (int col = 0; col < width; ++col) {
            const double fx = (col - cx) / half_w;
            r(row, col) = std::sqrt(fx * fx + fy * fy) / std::sqrt(2.0);
        }
    }
    return r;
}

double high_mask_value(double r, double tau_freq, double steepness) {
    return 1.0 / (1.0 + std::exp(-steepness * (r - tau_freq)));
}

RadialMaskPair make_masks(int height, int width, double tau_freq, double steepness) {
    check_mask_params(tau_freq, steepness);
    RadialMaskPair masks{radial_distance_map(height, width), Image(height, width), tau_freq,
                         steepness};
    auto high = masks.m_high.pixels();
    auto low = masks.m_low.pixels();
    for (std::size_t i = 0; i < high.size(); ++i) {
        high[i] = high_mask_value(high[i], tau_freq, steepness);
        low[i] = 1.0 - high[i];
    }
    return masks;
}

std::shared_ptr<const RadialMaskPair> cached_masks(int height, int width, double tau_freq,
                                                   double steepness) {
    using Key = std::tuple<int, int, double, double>;
    static std::mutex mutex;
    static std::map<Key, std::shared_ptr<const RadialMaskPair>> memo;

    const Key key{height, width, tau_freq, steepness};
    {
        std::lock_guard lock(mutex);
        if (auto it = memo.find(key); it != memo.end()) return it->second;
    }
    auto built = std::make_shared<const RadialMaskPair>(make_masks(height, width, tau_freq, steepness));
    std::lock_guard lock(mutex);
    return memo.try_emplace(key, std::move(built)).first->second;
}

RadialMaskPair make_hard_masks(int height, int width, double tau_freq) {
    check_mask_params(tau_freq, 1.0);
    RadialMaskPair masks{radial_distance_map(height, width), Image(height, width), tau_freq,
                         std::numeric_limits<double>::infinity()};
    auto high = masks.m_high.pixels();
    auto low = masks.m_low.pixels();
    for (std::size_t i = 0; i < high.size(); ++i) {
        high[i] = high[i] >= tau_freq ? 1.0 : 0.0;
        low[i] = 1.0 - high[i];
    }
    return masks;
}

BandWeights band_weights(DepthLabel d) {
    const double x = d.value();
    const double high = -0.05 * x * x + 0.002 * x + 0.02;
    return {high, 1.0 - high, d};
}

double hf_energy_ratio(const Image& img, const RadialMaskPair& masks) {
    require_same_shape(img, masks.m_high, "hf_energy_ratio");
    const Spectrum spec = fft2(img);
    auto coeffs = spec.coeffs();
    auto high = masks.m_high.pixels();
    double numerator = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        const double power = std::norm(coeffs[i]);
        numerator += high[i] * power;
        total += power;
    }
    return total > 0.0 ? numerator / total : 0.0;
}

std::vector<RadialBin> radial_power_spectrum(const Image& img, int n_bins) {
    if (n_bins < 2) throw ContractError("radial_power_spectrum: n_bins must be >= 2");
    if (img.empty()) throw DimensionError("radial_power_spectrum: empty image");

    const Spectrum spec = fft2(img);
    const Image radius = radial_distance_map(img.height(), img.width());
    std::vector<RadialBin> bins(static_cast<std::size_t>(n_bins));
    std::vector<double> sums(bins.size(), 0.0);
    auto coeffs = spec.coeffs();
    auto r = radius.pixels();
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        auto bin = static_cast<std::size_t>(r[i] * n_bins);
        if (bin >= bins.size()) bin = bins.size() - 1;
        sums[bin] += std::norm(coeffs[i]);
        ++bins[bin].count;
    }
    for (std::size_t b = 0; b < bins.size(); ++b) {
        bins[b].r_center = (static_cast<double>(b) + 0.5) / n_bins;
        bins[b].mean_power = bins[b].count > 0 ? sums[b] / static_cast<double>(bins[b].count) : 0.0;
    }
    return bins;
}

void write_ratio_csv(const std::filesystem::path& path, const std::vector<RatioRow>& rows) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << "d,hf_ratio\n";
    for (const auto& row : rows) out << format_number(row.d) << ',' << format_number(row.ratio) << '\n';
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

void write_radial_csv(const std::filesystem::path& path, const std::vector<RadialBin>& bins) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << "r_center,mean_power\n";
    for (const auto& bin : bins) {
        out << format_number(bin.r_center) << ',' << format_number(bin.mean_power) << '\n';
    }
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace focalspec::spectral
