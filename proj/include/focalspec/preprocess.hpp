#pragma once

#include <string>

#include "focalspec/image.hpp"

namespace focalspec::preprocess {

enum class ThresholdMode { otsu, fixed };

struct PreprocConfig {
    int wiener_window = 5;
    double canny_low_ratio = 0.5;
    int roi_size = 256;
    ThresholdMode threshold_mode = ThresholdMode::otsu;
    double fixed_threshold = 0.5;  ///< used when threshold_mode == fixed

    void validate() const;
};

/// Adaptive Wiener filter with edge-replicated borders. The noise power is the
/// mean of all local variances.
Image wiener_filter(const Image& img, int window = 5);

/// Otsu threshold over a 256-bin histogram spanning [min, max] of the image.
/// Returns the upper edge of the last bin of the lower class. Throws
/// ContractError for constant images.
double otsu_threshold(const Image& img);

/// 1 where img > threshold, else 0.
Image binarize(const Image& img, double threshold);

/// Sobel gradient magnitude of the image after Gaussian smoothing
/// (edge-replicated borders; sigma <= 0 skips smoothing).
Image gradient_magnitude(const Image& img, double sigma = 1.0);

inline constexpr double canny_sigma = 1.0;

/// Binary edge map: Gaussian smoothing (sigma 1), Sobel gradients, 4-direction
/// non-maximum suppression, double-threshold hysteresis with 8-connectivity.
/// Thresholds are in gradient-magnitude units. Requires 0 < low < high.
Image canny(const Image& img, double high, double low);

struct RoiCrop {
    Image image;  ///< roi_size x roi_size, min-max normalized (constant crops map to 0)
    double centroid_row = 0.0;
    double centroid_col = 0.0;
    int origin_row = 0;
    int origin_col = 0;
};

/// Crop centered on the centroid of the foreground (binary > 0.5), clamped to
/// the frame. Throws ContractError when the foreground is empty.
RoiCrop centroid_roi(const Image& img, const Image& binary, int roi_size);

/// All intermediate stages of the pipeline, for inspection.
struct PipelineResult {
    Image denoised;
    Image binary;
    Image edges;
    double threshold = 0.0;
    double canny_high = 0.0;
    double canny_low = 0.0;
    RoiCrop roi;
};

/// wiener -> threshold binarization -> canny (high = Otsu threshold of the
/// gradient magnitude, low = ratio * high) -> centroid of the binary mask ->
/// normalized ROI crop of the denoised frame.
PipelineResult preprocess_pipeline(const Image& raw, const PreprocConfig& cfg = {});

/// {"threshold":..., "canny_high":..., "centroid":[row, col], "crop_origin":[row, col]}
std::string sidecar_json(const PipelineResult& result);

}  // namespace focalspec::preprocess
