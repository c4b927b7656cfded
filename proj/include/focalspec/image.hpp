#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace focalspec {

enum class ImageRole { intensity, residual };

/// Dense row-major grayscale grid.
///
/// Intensity images hold values in [0, 1]; residual images (gradients,
/// masks, transfer functions, differences) are unconstrained. The role is a
/// tag checked by operations that require intensities.
class Image {
public:
    Image() = default;
    Image(int height, int width, ImageRole role = ImageRole::residual, double fill = 0.0);
    Image(int height, int width, std::vector<double> pixels, ImageRole role = ImageRole::residual);

    /// Builds an intensity image, rejecting values outside [0, 1].
    static Image intensity(int height, int width, std::vector<double> pixels);

    int height() const noexcept { return height_; }
    int width() const noexcept { return width_; }
    std::size_t size() const noexcept { return pixels_.size(); }
    bool empty() const noexcept { return pixels_.empty(); }
    ImageRole role() const noexcept { return role_; }
    void set_role(ImageRole role);

    double& operator()(int row, int col) noexcept { return pixels_[index(row, col)]; }
    double operator()(int row, int col) const noexcept { return pixels_[index(row, col)]; }

    std::span<double> pixels() & noexcept { return pixels_; }
    std::span<const double> pixels() const& noexcept { return pixels_; }
    std::span<const double> pixels() && = delete;

    bool same_shape(const Image& other) const noexcept {
        return height_ == other.height_ && width_ == other.width_;
    }

    /// True when every pixel lies in [0, 1].
    bool in_unit_range() const noexcept;

    friend bool operator==(const Image&, const Image&) = default;

private:
    std::size_t index(int row, int col) const noexcept {
        return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(col);
    }

    int height_ = 0;
    int width_ = 0;
    std::vector<double> pixels_;
    ImageRole role_ = ImageRole::residual;
};

/// Dense row-major grid of complex Fourier coefficients.
/// When `shifted` is true the DC coefficient sits at (H/2, W/2) (floor division).
class Spectrum {
public:
    Spectrum() = default;
    Spectrum(int height, int width, bool shifted);
    Spectrum(int height, int width, std::vector<std::complex<double>> coeffs, bool shifted);

    int height() const noexcept { return height_; }
    int width() const noexcept { return width_; }
    std::size_t size() const noexcept { return coeffs_.size(); }
    bool shifted() const noexcept { return shifted_; }

    std::complex<double>& operator()(int row, int col) noexcept {
        return coeffs_[static_cast<std::size_t>(row) * width_ + col];
    }
    const std::complex<double>& operator()(int row, int col) const noexcept {
        return coeffs_[static_cast<std::size_t>(row) * width_ + col];
    }

    std::span<std::complex<double>> coeffs() & noexcept { return coeffs_; }
    std::span<const std::complex<double>> coeffs() const& noexcept { return coeffs_; }
    std::span<const std::complex<double>> coeffs() && = delete;

    bool same_shape(const Spectrum& other) const noexcept {
        return height_ == other.height_ && width_ == other.width_;
    }

private:
    int height_ = 0;
    int width_ = 0;
    std::vector<std::complex<double>> coeffs_;
    bool shifted_ = true;
};

/// Normalized distance to the focal plane, validated to lie in [-0.5, 0.5].
class DepthLabel {
public:
    static constexpr double min_value = -0.5;
    static constexpr double max_value = 0.5;

    DepthLabel() = default;
    explicit DepthLabel(double d);

    double value() const noexcept { return d_; }
    friend auto operator<=>(const DepthLabel&, const DepthLabel&) = default;

private:
    double d_ = 0.0;
};

void require_same_shape(const Image& a, const Image& b, const char* context);
void require_intensity(const Image& img, const char* context);

}  // namespace focalspec
