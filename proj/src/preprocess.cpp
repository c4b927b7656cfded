#include "focalspec/preprocess.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <vector>

#include <json.hpp>

#include "focalspec/error.hpp"

namespace focalspec::preprocess {

namespace {

int clamp_index(int i, int n) { return std::clamp(i, 0, n - 1); }

// Sum over a (2r+1)x(2r+1) window with replicated borders, computed separably.
std::vector<double> box_sum(const Image& img, int radius, bool squared) {
    const int h = img.height();
    const int w = img.width();
    std::vector<double> rows(img.size());
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                const double v = img(r, clamp_index(c + k, w));
                acc += squared ? v * v : v;
            }
            rows[static_cast<std::size_t>(r) * w + c] = acc;
        }
    }
    std::vector<double> out(img.size());
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                acc += rows[static_cast<std::size_t>(clamp_index(r + k, h)) * w + c];
            }
            out[static_cast<std::size_t>(r) * w + c] = acc;
        }
    }
    return out;
}

Image convolve_separable(const Image& img, const std::vector<double>& kx,
                         const std::vector<double>& ky) {
    const int h = img.height();
    const int w = img.width();
    const int rx = static_cast<int>(kx.size()) / 2;
    const int ry = static_cast<int>(ky.size()) / 2;
    Image tmp(h, w);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            double acc = 0.0;
            for (int k = -rx; k <= rx; ++k) acc += kx[k + rx] * img(r, clamp_index(c + k, w));
            tmp(r, c) = acc;
        }
    }
    Image out(h, w);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            double acc = 0.0;
            for (int k = -ry; k <= ry; ++k) acc += ky[k + ry] * tmp(clamp_index(r + k, h), c);
            out(r, c) = acc;
        }
    }
    return out;
}

std::vector<double> gaussian_kernel(double sigma) {
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        k[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
        sum += k[i + radius];
    }
    for (double& v : k) v /= sum;
    return k;
}

struct Gradients {
    Image gx;
    Image gy;
    Image magnitude;
};

Gradients sobel(const Image& img, double sigma) {
    const Image smooth = sigma > 0.0 ? convolve_separable(img, gaussian_kernel(sigma), gaussian_kernel(sigma))
                                     : img;
    Gradients g{convolve_separable(smooth, {-1.0, 0.0, 1.0}, {1.0, 2.0, 1.0}),
                convolve_separable(smooth, {1.0, 2.0, 1.0}, {-1.0, 0.0, 1.0}),
                Image(img.height(), img.width())};
    auto gx = g.gx.pixels();
    auto gy = g.gy.pixels();
    auto mag = g.magnitude.pixels();
    for (std::size_t i = 0; i < mag.size(); ++i) mag[i] = std::hypot(gx[i], gy[i]);
    return g;
}

bool is_constant(const Image& img) {
    auto [lo, hi] = std::minmax_element(img.pixels().begin(), img.pixels().end());
    return *lo == *hi;
}

}  // namespace

void PreprocConfig::validate() const {
    if (wiener_window < 3 || wiener_window % 2 == 0) {
        throw ContractError("wiener window must be odd and >= 3");
    }
    if (!(canny_low_ratio > 0.0 && canny_low_ratio < 1.0)) {
        throw ContractError("canny_low_ratio must lie in (0, 1)");
    }
    if (roi_size <= 0 || roi_size % 2 != 0) throw ContractError("roi_size must be a positive even integer");
}

Image wiener_filter(const Image& img, int window) {
    if (window < 3 || window % 2 == 0) throw ContractError("wiener window must be odd and >= 3");
    if (img.empty()) throw DimensionError("wiener_filter: empty image");

    const int radius = window / 2;
    const double count = static_cast<double>(window) * window;
    const auto sum = box_sum(img, radius, false);
    const auto sum_sq = box_sum(img, radius, true);

    std::vector<double> mean(img.size()), var(img.size());
    double noise = 0.0;
    for (std::size_t i = 0; i < mean.size(); ++i) {
        mean[i] = sum[i] / count;
        var[i] = std::max(sum_sq[i] / count - mean[i] * mean[i], 0.0);
        noise += var[i];
    }
    noise /= static_cast<double>(img.size());

    constexpr double eps = 1e-12;
    Image out(img.height(), img.width());
    auto src = img.pixels();
    auto dst = out.pixels();
    for (std::size_t i = 0; i < dst.size(); ++i) {
        const double gain = std::max(var[i] - noise, 0.0) / std::max(var[i], eps);
        dst[i] = mean[i] + gain * (src[i] - mean[i]);
    }
    if (img.role() == ImageRole::intensity && out.in_unit_range()) out.set_role(ImageRole::intensity);
    return out;
}

double otsu_threshold(const Image& img) {
    if (img.empty()) throw DimensionError("otsu_threshold: empty image");
    auto [lo_it, hi_it] = std::minmax_element(img.pixels().begin(), img.pixels().end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    if (lo == hi) throw ContractError("otsu_threshold: degenerate histogram (constant image)");

    constexpr int n_bins = 256;
    const double width = (hi - lo) / n_bins;
    std::array<double, n_bins> counts{};
    std::array<double, n_bins> sums{};
    for (double v : img.pixels()) {
        const int bin = std::min(static_cast<int>((v - lo) / (hi - lo) * n_bins), n_bins - 1);
        counts[bin] += 1.0;
        sums[bin] += v;
    }
    const double total = static_cast<double>(img.size());
    double total_sum = 0.0;
    for (double s : sums) total_sum += s;

    double best = -1.0;
    int best_bin = 0;
    double n0 = 0.0;
    double s0 = 0.0;
    for (int k = 0; k < n_bins - 1; ++k) {
        n0 += counts[k];
        s0 += sums[k];
        const double n1 = total - n0;
        if (n0 == 0.0 || n1 == 0.0) continue;
        const double mu0 = s0 / n0;
        const double mu1 = (total_sum - s0) / n1;
        const double between = (n0 / total) * (n1 / total) * (mu0 - mu1) * (mu0 - mu1);
        if (between > best) {
            best = between;
            best_bin = k;
        }
    }
    return lo + (best_bin + 1) * width;
}

Image binarize(const Image& img, double threshold) {
    Image out(img.height(), img.width(), ImageRole::intensity);
    auto src = img.pixels();
    auto dst = out.pixels();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = src[i] > threshold ? 1.0 : 0.0;
    return out;
}

Image gradient_magnitude(const Image& img, double sigma) {
    if (img.empty()) throw DimensionError("gradient_magnitude: empty image");
    return sobel(img, sigma).magnitude;
}

Image canny(const Image& img, double high, double low) {
    if (!(low > 0.0 && low < high)) throw ContractError("canny: thresholds must satisfy 0 < low < high");
    if (img.empty()) throw DimensionError("canny: empty image");

    const int h = img.height();
    const int w = img.width();
    const Gradients g = sobel(img, canny_sigma);

    // Non-maximum suppression along the gradient direction quantized to 0/45/90/135 degrees.
    Image thin(h, w);
    for (int r = 1; r < h - 1; ++r) {
        for (int c = 1; c < w - 1; ++c) {
            const double m = g.magnitude(r, c);
            if (m == 0.0) continue;
            double angle = std::atan2(g.gy(r, c), g.gx(r, c)) * 180.0 / M_PI;
            if (angle < 0.0) angle += 180.0;
            int dr = 0, dc = 0;
            if (angle < 22.5 || angle >= 157.5) {
                dc = 1;
            } else if (angle < 67.5) {
                dr = 1;
                dc = 1;
            } else if (angle < 112.5) {
                dr = 1;
            } else {
                dr = 1;
                dc = -1;
            }
            const double ahead = g.magnitude(r + dr, c + dc);
            const double behind = g.magnitude(r - dr, c - dc);
            // Asymmetric comparison keeps exactly one pixel of a symmetric ridge.
            if (m >= ahead && m > behind) thin(r, c) = m;
        }
    }

    Image edges(h, w, ImageRole::intensity);
    std::deque<std::pair<int, int>> queue;
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (thin(r, c) >= high) {
                edges(r, c) = 1.0;
                queue.emplace_back(r, c);
            }
        }
    }
    while (!queue.empty()) {
        const auto [r, c] = queue.front();
        queue.pop_front();
        for (int dr = -1; dr <= 1; ++dr) {
            for (int dc = -1; dc <= 1; ++dc) {
                const int rr = r + dr;
                const int cc = c + dc;
                if (rr < 0 || rr >= h || cc < 0 || cc >= w || edges(rr, cc) != 0.0) continue;
                if (thin(rr, cc) >= low) {
                    edges(rr, cc) = 1.0;
                    queue.emplace_back(rr, cc);
                }
            }
        }
    }
    return edges;
}

RoiCrop centroid_roi(const Image& img, const Image& binary, int roi_size) {
    require_same_shape(img, binary, "centroid_roi");
    if (roi_size <= 0) throw ContractError("roi_size must be positive");
    if (roi_size > img.height() || roi_size > img.width()) {
        throw ContractError("roi_size exceeds frame dimensions");
    }

    double n = 0.0, sum_r = 0.0, sum_c = 0.0;
    for (int r = 0; r < binary.height(); ++r) {
        for (int c = 0; c < binary.width(); ++c) {
            if (binary(r, c) > 0.5) {
                n += 1.0;
                sum_r += r;
                sum_c += c;
            }
        }
    }
    if (n == 0.0) throw ContractError("empty foreground");

    RoiCrop crop;
    crop.centroid_row = sum_r / n;
    crop.centroid_col = sum_c / n;
    const int half = roi_size / 2;
    crop.origin_row = std::clamp(static_cast<int>(std::lround(crop.centroid_row)) - half, 0,
                                 img.height() - roi_size);
    crop.origin_col = std::clamp(static_cast<int>(std::lround(crop.centroid_col)) - half, 0,
                                 img.width() - roi_size);

    Image out(roi_size, roi_size);
    for (int r = 0; r < roi_size; ++r) {
        for (int c = 0; c < roi_size; ++c) out(r, c) = img(crop.origin_row + r, crop.origin_col + c);
    }
    auto [lo_it, hi_it] = std::minmax_element(out.pixels().begin(), out.pixels().end());
    const double lo = *lo_it;
    const double span = *hi_it - lo;
    for (double& p : out.pixels()) p = span > 0.0 ? (p - lo) / span : 0.0;
    out.set_role(ImageRole::intensity);
    crop.image = std::move(out);
    return crop;
}

PipelineResult preprocess_pipeline(const Image& raw, const PreprocConfig& cfg) {
    cfg.validate();
    if (raw.height() < cfg.roi_size || raw.width() < cfg.roi_size) {
        throw ContractError("frame smaller than roi_size");
    }
    PipelineResult result;
    result.denoised = wiener_filter(raw, cfg.wiener_window);
    if (is_constant(result.denoised)) throw ContractError("empty foreground");

    result.threshold = cfg.threshold_mode == ThresholdMode::otsu ? otsu_threshold(result.denoised)
                                                                 : cfg.fixed_threshold;
    result.binary = binarize(result.denoised, result.threshold);

    const Image magnitude = gradient_magnitude(result.denoised, canny_sigma);
    result.canny_high = otsu_threshold(magnitude);
    result.canny_low = cfg.canny_low_ratio * result.canny_high;
    result.edges = canny(result.denoised, result.canny_high, result.canny_low);

    result.roi = centroid_roi(result.denoised, result.binary, cfg.roi_size);
    return result;
}

std::string sidecar_json(const PipelineResult& result) {
    nlohmann::ordered_json j;
    j["threshold"] = result.threshold;
    j["canny_high"] = result.canny_high;
    j["canny_low"] = result.canny_low;
    j["centroid"] = {result.roi.centroid_row, result.roi.centroid_col};
    j["crop_origin"] = {result.roi.origin_row, result.roi.origin_col};
    return j.dump(2);
}

}  // namespace focalspec::preprocess
