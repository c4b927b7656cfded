#include "focalspec/optics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "focalspec/error.hpp"
#include "focalspec/fft.hpp"
#include "focalspec/parallel.hpp"

namespace focalspec::optics {

namespace {

constexpr int samples_per_axis = 4;
constexpr double texture_amplitude = 0.06;

double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }

double sinc(double z) {
    if (z == 0.0) return 1.0;
    const double x = std::numbers::pi * z;
    return std::sin(x) / x;
}

// Body-frame description used by both the intensity renderer and the point set.
class RobotShape {
public:
    explicit RobotShape(const PhantomSpec& spec)
        : radius_(spec.body_radius),
          arm_reach_(spec.body_radius + spec.arm_length),
          arm_half_width_(std::max(1.0, 0.1 * spec.body_radius)),
          cos_pitch_(std::cos(deg2rad(spec.pitch_deg))),
          sin_pitch_(std::sin(deg2rad(spec.pitch_deg))),
          extent_(spec.extent()) {
        for (int k = 0; k < spec.n_arms; ++k) {
            const double angle = deg2rad(spec.roll_deg) + 2.0 * std::numbers::pi * k / spec.n_arms;
            arms_.push_back({std::cos(angle), std::sin(angle)});
        }
        std::mt19937_64 rng(spec.seed);
        std::uniform_real_distribution<double> period(3.0, 8.0);
        std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
        for (auto& wave : waves_) {
            const double k = 2.0 * std::numbers::pi / period(rng);
            const double theta = angle(rng);
            wave = {k * std::cos(theta), k * std::sin(theta), angle(rng)};
        }
    }

    // Image offsets (dx, dy) from the frame center to body-frame (u, v).
    double u(double dx) const { return dx; }
    double v(double dy) const { return dy / cos_pitch_; }

    bool contains(double u, double v) const {
        if (u * u + v * v <= radius_ * radius_) return true;
        for (const auto& [c, s] : arms_) {
            const double along = u * c + v * s;
            const double across = -u * s + v * c;
            if (along >= 0.0 && along <= arm_reach_ && std::abs(across) <= arm_half_width_) {
                return true;
            }
        }
        return false;
    }

    double intensity(double u, double v) const {
        double t = 0.0;
        for (const auto& [kx, ky, phase] : waves_) t += std::sin(kx * u + ky * v + phase);
        t = 0.5 + t / (2.0 * waves_.size());  // in [0, 1]
        return 1.0 - texture_amplitude * t;
    }

    /// Normalized depth of a body-frame point after the pitch rotation.
    double depth(double v) const { return v * sin_pitch_ / (2.0 * extent_); }

private:
    double radius_;
    double arm_reach_;
    double arm_half_width_;
    double cos_pitch_;
    double sin_pitch_;
    double extent_;
    std::vector<std::pair<double, double>> arms_;
    std::array<std::array<double, 3>, 3> waves_{};
};

void check_frame(const PhantomSpec& spec, int height, int width) {
    spec.validate();
    if (height <= 0 || width <= 0) throw DimensionError("phantom frame must have positive size");
    const double half = std::min(height, width) / 2.0;
    if (spec.extent() + 1.0 > half) throw ContractError("phantom geometry exceeds frame");
}

// Visits every supersample position of every pixel that falls inside the robot.
template <typename Fn>
void for_each_robot_sample(const RobotShape& shape, int height, int width, Fn&& fn) {
    const double cx = (width - 1) / 2.0;
    const double cy = (height - 1) / 2.0;
    for (int row = 0; row < height; ++row) {
        for (int col = 0; col < width; ++col) {
            for (int sy = 0; sy < samples_per_axis; ++sy) {
                const double dy = row - cy + (sy + 0.5) / samples_per_axis - 0.5;
                for (int sx = 0; sx < samples_per_axis; ++sx) {
                    const double dx = col - cx + (sx + 0.5) / samples_per_axis - 0.5;
                    const double u = shape.u(dx);
                    const double v = shape.v(dy);
                    if (shape.contains(u, v)) fn(row, col, u, v);
                }
            }
        }
    }
}

constexpr double sample_weight = 1.0 / (samples_per_axis * samples_per_axis);

}  // namespace

OtfKind parse_otf_kind(const std::string& name) {
    if (name == "gaussian") return OtfKind::gaussian;
    if (name == "hopkins_sinc" || name == "sinc") return OtfKind::hopkins_sinc;
    throw ContractError("unknown OTF kind '" + name + "'");
}

std::string to_string(OtfKind kind) {
    return kind == OtfKind::gaussian ? "gaussian" : "hopkins_sinc";
}

void OtfModel::validate() const {
    if (!(kappa > 0.0) || !std::isfinite(kappa)) throw ContractError("kappa must be positive");
    if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
        throw ContractError("noise_sigma must be non-negative");
    }
}

void PhantomSpec::validate() const {
    auto on_grid = [](int deg) { return deg >= 0 && deg <= 60 && deg % 10 == 0; };
    if (!on_grid(pitch_deg) || !on_grid(roll_deg)) {
        throw ContractError("pose must be a multiple of 10 degrees in [0, 60]");
    }
    if (!(body_radius > 0.0)) throw ContractError("body_radius must be positive");
    if (n_arms < 0) throw ContractError("n_arms must be non-negative");
    if (!(arm_length >= 0.0)) throw ContractError("arm_length must be non-negative");
}

double PhantomSpec::extent() const {
    return n_arms > 0 ? body_radius + arm_length : body_radius;
}

Image otf(const OtfModel& model, DepthLabel d, int height, int width) {
    model.validate();
    Image h = spectral::radial_distance_map(height, width);
    const double defocus = model.kappa * std::abs(d.value());
    for (double& value : h.pixels()) {
        const double r = value;
        if (model.kind == OtfKind::gaussian) {
            const double z = defocus * r;
            value = std::exp(-z * z);
        } else {
            value = sinc(defocus * r * (1.0 - r));
        }
    }
    return h;
}

Image render_defocused(const Image& sharp, const OtfModel& model, DepthLabel d,
                       std::uint64_t noise_seed) {
    require_intensity(sharp, "render_defocused");
    const Image transfer = otf(model, d, sharp.height(), sharp.width());
    Spectrum spec = fft2(sharp);
    auto coeffs = spec.coeffs();
    auto h = transfer.pixels();
    for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] *= h[i];
    Image out = ifft2(spec);

    if (model.noise_sigma > 0.0) {
        std::mt19937_64 rng(noise_seed);
        std::normal_distribution<double> noise(0.0, model.noise_sigma);
        for (double& p : out.pixels()) p += noise(rng);
    }
    for (double& p : out.pixels()) p = std::clamp(p, 0.0, 1.0);
    out.set_role(ImageRole::intensity);
    return out;
}

Image make_phantom(const PhantomSpec& spec, int height, int width) {
    check_frame(spec, height, width);
    const RobotShape shape(spec);
    Image img(height, width, ImageRole::residual);
    for_each_robot_sample(shape, height, width, [&](int row, int col, double u, double v) {
        img(row, col) += sample_weight * shape.intensity(u, v);
    });
    for (double& p : img.pixels()) p = std::min(p, 1.0);
    img.set_role(ImageRole::intensity);
    return img;
}

Image silhouette(const PhantomSpec& spec, int height, int width) {
    check_frame(spec, height, width);
    const RobotShape shape(spec);
    Image img(height, width, ImageRole::residual);
    for_each_robot_sample(shape, height, width,
                          [&](int row, int col, double, double) { img(row, col) += sample_weight; });
    for (double& p : img.pixels()) p = std::min(p, 1.0);
    img.set_role(ImageRole::intensity);
    return img;
}

ConditionMaps render_conditions(const PhantomSpec& spec, DepthLabel d, double slice_eps,
                                int height, int width) {
    if (!(slice_eps > 0.0)) throw ContractError("slice_eps must be positive");
    check_frame(spec, height, width);
    const RobotShape shape(spec);

    double z_min = std::numeric_limits<double>::infinity();
    double z_max = -std::numeric_limits<double>::infinity();
    std::size_t n_points = 0;
    for_each_robot_sample(shape, height, width, [&](int, int, double, double v) {
        const double z = shape.depth(v);
        z_min = std::min(z_min, z);
        z_max = std::max(z_max, z);
        ++n_points;
    });
    if (n_points == 0) throw ContractError("render_conditions: empty point set");

    const double z_range = z_max - z_min;
    ConditionMaps maps{Image(height, width), Image(height, width)};
    for_each_robot_sample(shape, height, width, [&](int row, int col, double, double v) {
        const double z = shape.depth(v);
        const double level = z_range > 0.0 ? (z - z_min) / z_range : 0.0;
        maps.control1(row, col) = std::max(maps.control1(row, col), level);
        if (std::abs(z - d.value()) < slice_eps) maps.control2(row, col) += sample_weight;
    });
    for (double& p : maps.control2.pixels()) p = std::min(p, 1.0);
    maps.control1.set_role(ImageRole::intensity);
    maps.control2.set_role(ImageRole::intensity);
    return maps;
}

Image fuse_conditions(const Image& c1, const Image& c2, double w) {
    require_same_shape(c1, c2, "fuse_conditions");
    if (!(w >= 0.0) || !std::isfinite(w)) throw ContractError("fusion weight must be non-negative");
    Image out(c1.height(), c1.width());
    auto a = c1.pixels();
    auto b = c2.pixels();
    auto dst = out.pixels();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = std::clamp(a[i] + w * b[i], 0.0, 1.0);
    out.set_role(ImageRole::intensity);
    return out;
}

std::vector<spectral::RatioRow> depth_sweep(const PhantomSpec& spec, const OtfModel& model,
                                            const std::vector<DepthLabel>& depths,
                                            const SweepSettings& settings) {
    if (depths.empty()) throw ContractError("depth_sweep: empty depth list");
    model.validate();
    const Image sharp = make_phantom(spec, settings.height, settings.width);
    const auto masks = spectral::cached_masks(settings.height, settings.width, settings.tau_freq,
                                              settings.steepness);

    std::vector<DepthLabel> sorted = depths;
    std::stable_sort(sorted.begin(), sorted.end());
    std::vector<spectral::RatioRow> rows(sorted.size());
    parallel_for(sorted.size(), settings.threads, [&](std::size_t i) {
        const Image blurred = render_defocused(sharp, model, sorted[i], spec.seed);
        rows[i] = {sorted[i].value(), spectral::hf_energy_ratio(blurred, *masks)};
    });
    return rows;
}

std::vector<DepthLabel> uniform_depths(int n) {
    if (n < 1) throw ContractError("depth count must be positive");
    if (n == 1) return {DepthLabel(0.0)};
    std::vector<DepthLabel> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        // Symmetric construction keeps +d and -d exact negatives of each other.
        const double d = (2.0 * i - (n - 1)) / (2.0 * (n - 1));
        out.emplace_back(std::clamp(d, DepthLabel::min_value, DepthLabel::max_value));
    }
    return out;
}

double decay_ratio(const PhantomSpec& spec, const OtfModel& model, const SweepSettings& settings) {
    OtfModel clean = model;
    clean.noise_sigma = 0.0;
    const auto rows = depth_sweep(spec, clean, {DepthLabel(0.0), DepthLabel(calibration_depth)},
                                  settings);
    return rows[0].ratio / rows[1].ratio;
}

double calibrate_kappa(const PhantomSpec& spec, OtfKind kind, double target_decay,
                       const SweepSettings& settings) {
    if (!(target_decay >= min_target_decay) || !std::isfinite(target_decay)) {
        throw ContractError("target_decay must exceed 1");
    }
    const double upper = 1.5 * target_decay;
    auto decay_at = [&](double kappa) {
        return decay_ratio(spec, OtfModel{kind, kappa, 0.0}, settings);
    };
    auto in_window = [&](double decay) { return decay >= target_decay && decay <= upper; };

    double lo = calibration_kappa_min;
    double hi = calibration_kappa_max;
    const double decay_lo = decay_at(lo);
    const double decay_hi = decay_at(hi);
    if (in_window(decay_lo)) return lo;
    if (decay_hi < target_decay || decay_lo > upper) {
        throw CalibrationError("calibration failed: decay at kappa=" + std::to_string(lo) + " is " +
                                   std::to_string(decay_lo) + ", at kappa=" + std::to_string(hi) +
                                   " is " + std::to_string(decay_hi),
                               decay_lo, decay_hi);
    }
    for (int iter = 0; iter < 200 && hi / lo > 1.0 + 1e-12; ++iter) {
        const double mid = std::sqrt(lo * hi);
        const double decay = decay_at(mid);
        if (in_window(decay)) return mid;
        if (decay < target_decay) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    throw CalibrationError("calibration failed: bisection did not reach the target window",
                           decay_lo, decay_hi);
}

}  // namespace focalspec::optics
