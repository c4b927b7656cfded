#include "focalspec/metrics.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "focalspec/error.hpp"

namespace focalspec::metrics {

namespace {

std::vector<double> gaussian_window(int size, double sigma) {
    std::vector<double> w(static_cast<std::size_t>(size));
    const int half = size / 2;
    double sum = 0.0;
    for (int i = 0; i < size; ++i) {
        const double x = i - half;
        w[i] = std::exp(-x * x / (2.0 * sigma * sigma));
        sum += w[i];
    }
    for (double& v : w) v /= sum;
    return w;
}

// Separable 'valid' correlation of a row-major grid with a 1D kernel on both axes.
std::vector<double> filter_valid(const std::vector<double>& src, int height, int width,
                                 const std::vector<double>& kernel) {
    const int k = static_cast<int>(kernel.size());
    const int out_w = width - k + 1;
    const int out_h = height - k + 1;
    std::vector<double> tmp(static_cast<std::size_t>(height) * out_w);
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < out_w; ++c) {
            double acc = 0.0;
            for (int i = 0; i < k; ++i) acc += kernel[i] * src[static_cast<std::size_t>(r) * width + c + i];
            tmp[static_cast<std::size_t>(r) * out_w + c] = acc;
        }
    }
    std::vector<double> out(static_cast<std::size_t>(out_h) * out_w);
    for (int r = 0; r < out_h; ++r) {
        for (int c = 0; c < out_w; ++c) {
            double acc = 0.0;
            for (int i = 0; i < k; ++i) acc += kernel[i] * tmp[static_cast<std::size_t>(r + i) * out_w + c];
            out[static_cast<std::size_t>(r) * out_w + c] = acc;
        }
    }
    return out;
}

}  // namespace

void SsimConfig::validate() const {
    if (window_size < 3 || window_size % 2 == 0) {
        throw ContractError("SSIM window size must be odd and >= 3");
    }
    if (!(window_sigma > 0.0)) throw ContractError("SSIM window sigma must be positive");
    if (!(k1 > 0.0) || !(k2 > 0.0)) throw ContractError("SSIM constants must be positive");
    if (!(dynamic_range > 0.0)) throw ContractError("SSIM dynamic range must be positive");
}

double mse(const Image& a, const Image& b) {
    require_same_shape(a, b, "mse");
    if (a.empty()) throw DimensionError("mse: empty image");
    auto x = a.pixels();
    auto y = b.pixels();
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) sum += (x[i] - y[i]) * (x[i] - y[i]);
    return sum / static_cast<double>(x.size());
}

double psnr(const Image& a, const Image& b, double peak) {
    if (!(peak > 0.0)) throw ContractError("psnr: peak must be positive");
    const double err = mse(a, b);
    if (err == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(peak * peak / err);
}

double ssim(const Image& a, const Image& b, const SsimConfig& cfg) {
    cfg.validate();
    require_same_shape(a, b, "ssim");
    if (a.height() < cfg.window_size || a.width() < cfg.window_size) {
        throw DimensionError("ssim: image smaller than window");
    }
    const int h = a.height();
    const int w = a.width();
    const auto kernel = gaussian_window(cfg.window_size, cfg.window_sigma);

    std::vector<double> x(a.pixels().begin(), a.pixels().end());
    std::vector<double> y(b.pixels().begin(), b.pixels().end());
    std::vector<double> xx(x.size()), yy(x.size()), xy(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        xx[i] = x[i] * x[i];
        yy[i] = y[i] * y[i];
        xy[i] = x[i] * y[i];
    }
    const auto mu_x = filter_valid(x, h, w, kernel);
    const auto mu_y = filter_valid(y, h, w, kernel);
    const auto e_xx = filter_valid(xx, h, w, kernel);
    const auto e_yy = filter_valid(yy, h, w, kernel);
    const auto e_xy = filter_valid(xy, h, w, kernel);

    const double c1 = (cfg.k1 * cfg.dynamic_range) * (cfg.k1 * cfg.dynamic_range);
    const double c2 = (cfg.k2 * cfg.dynamic_range) * (cfg.k2 * cfg.dynamic_range);
    double total = 0.0;
    for (std::size_t i = 0; i < mu_x.size(); ++i) {
        const double mx = mu_x[i];
        const double my = mu_y[i];
        const double var_x = e_xx[i] - mx * mx;
        const double var_y = e_yy[i] - my * my;
        const double cov = e_xy[i] - mx * my;
        total += ((2.0 * mx * my + c1) * (2.0 * cov + c2)) /
                 ((mx * mx + my * my + c1) * (var_x + var_y + c2));
    }
    return total / static_cast<double>(mu_x.size());
}

QualityReport evaluate(const Image& a, const Image& b, const SsimConfig& cfg, double peak) {
    return {ssim(a, b, cfg), psnr(a, b, peak), mse(a, b)};
}

}  // namespace focalspec::metrics
