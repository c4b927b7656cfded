#pragma once

#include "focalspec/image.hpp"

namespace focalspec::metrics {

struct SsimConfig {
    int window_size = 11;
    double window_sigma = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
    double dynamic_range = 1.0;

    void validate() const;
};

double mse(const Image& a, const Image& b);

/// 10 log10(peak^2 / mse); +infinity when the images are identical.
double psnr(const Image& a, const Image& b, double peak = 1.0);

/// Mean SSIM over all valid (fully inside) Gaussian-window positions.
double ssim(const Image& a, const Image& b, const SsimConfig& cfg = {});

struct QualityReport {
    double ssim = 0.0;
    double psnr_db = 0.0;
    double mse = 0.0;
};

QualityReport evaluate(const Image& a, const Image& b, const SsimConfig& cfg = {},
                       double peak = 1.0);

}  // namespace focalspec::metrics
