#include "focalspec/image.hpp"

#include <algorithm>
#include <string>

#include "focalspec/error.hpp"

namespace focalspec {

namespace {

void check_dims(int height, int width) {
    if (height <= 0 || width <= 0) {
        throw DimensionError("image dimensions must be positive, got " + std::to_string(height) +
                             "x" + std::to_string(width));
    }
}

bool all_in_unit_range(std::span<const double> px) {
    return std::all_of(px.begin(), px.end(), [](double p) { return p >= 0.0 && p <= 1.0; });
}

}  // namespace

Image::Image(int height, int width, ImageRole role, double fill)
    : height_(height), width_(width), role_(role) {
    check_dims(height, width);
    if (role == ImageRole::intensity && !(fill >= 0.0 && fill <= 1.0)) {
        throw ContractError("intensity image fill value outside [0, 1]");
    }
    pixels_.assign(static_cast<std::size_t>(height) * width, fill);
}

Image::Image(int height, int width, std::vector<double> pixels, ImageRole role)
    : height_(height), width_(width), pixels_(std::move(pixels)), role_(role) {
    check_dims(height, width);
    if (pixels_.size() != static_cast<std::size_t>(height) * width) {
        throw DimensionError("pixel buffer length does not match " + std::to_string(height) + "x" +
                             std::to_string(width));
    }
    if (role_ == ImageRole::intensity && !all_in_unit_range(pixels_)) {
        throw ContractError("intensity image has pixels outside [0, 1]");
    }
}

Image Image::intensity(int height, int width, std::vector<double> pixels) {
    return Image(height, width, std::move(pixels), ImageRole::intensity);
}

void Image::set_role(ImageRole role) {
    if (role == ImageRole::intensity && !in_unit_range()) {
        throw ContractError("cannot tag image as intensity: pixels outside [0, 1]");
    }
    role_ = role;
}

bool Image::in_unit_range() const noexcept { return all_in_unit_range(pixels_); }

Spectrum::Spectrum(int height, int width, bool shifted)
    : height_(height), width_(width), shifted_(shifted) {
    check_dims(height, width);
    coeffs_.assign(static_cast<std::size_t>(height) * width, {0.0, 0.0});
}

Spectrum::Spectrum(int height, int width, std::vector<std::complex<double>> coeffs, bool shifted)
    : height_(height), width_(width), coeffs_(std::move(coeffs)), shifted_(shifted) {
    check_dims(height, width);
    if (coeffs_.size() != static_cast<std::size_t>(height) * width) {
        throw DimensionError("coefficient buffer length does not match spectrum shape");
    }
}

DepthLabel::DepthLabel(double d) : d_(d) {
    if (!(d >= min_value && d <= max_value)) {
        throw ContractError("depth out of range");
    }
}

void require_same_shape(const Image& a, const Image& b, const char* context) {
    if (!a.same_shape(b)) {
        throw DimensionError(std::string(context) + ": dimension mismatch (" +
                             std::to_string(a.height()) + "x" + std::to_string(a.width()) +
                             " vs " + std::to_string(b.height()) + "x" +
                             std::to_string(b.width()) + ")");
    }
}

void require_intensity(const Image& img, const char* context) {
    if (img.empty()) {
        throw DimensionError(std::string(context) + ": empty image");
    }
    if (!img.in_unit_range()) {
        throw ContractError(std::string(context) + ": expected intensity image with values in [0, 1]");
    }
}

}  // namespace focalspec
