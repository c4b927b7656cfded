#include "focalspec/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

#include "focalspec/error.hpp"

namespace focalspec {

namespace {

// FFTW planning is not thread-safe; execution of an existing plan on new
// arrays is. Plans are created once per (height, width, sign) and reused.
class PlanCache {
public:
    ~PlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

    fftw_plan get(int height, int width, int sign) {
        std::lock_guard lock(mutex_);
        auto key = std::make_tuple(height, width, sign);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;

        const std::size_t n = static_cast<std::size_t>(height) * width;
        auto* scratch = fftw_alloc_complex(n);
        fftw_plan plan = fftw_plan_dft_2d(height, width, scratch, scratch,
                                          sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                          FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(scratch);
        if (plan == nullptr) throw Error("fftw planning failed");
        plans_.emplace(key, plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
    static PlanCache cache;
    return cache;
}

Spectrum roll(const Spectrum& spec, int shift_rows, int shift_cols, bool shifted) {
    const int h = spec.height();
    const int w = spec.width();
    Spectrum out(h, w, shifted);
    for (int r = 0; r < h; ++r) {
        const int rr = (r + shift_rows) % h;
        for (int c = 0; c < w; ++c) {
            out(rr, (c + shift_cols) % w) = spec(r, c);
        }
    }
    return out;
}

}  // namespace

namespace detail {

void dft2_inplace(std::span<std::complex<double>> data, int height, int width, int sign) {
    if (height <= 0 || width <= 0 || data.size() != static_cast<std::size_t>(height) * width) {
        throw DimensionError("dft2: invalid grid");
    }
    fftw_plan plan = plan_cache().get(height, width, sign);
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan, ptr, ptr);
}

}  // namespace detail

Spectrum fftshift(const Spectrum& spec) {
    if (spec.shifted()) return spec;
    return roll(spec, spec.height() / 2, spec.width() / 2, true);
}

Spectrum ifftshift(const Spectrum& spec) {
    if (!spec.shifted()) return spec;
    return roll(spec, spec.height() - spec.height() / 2, spec.width() - spec.width() / 2, false);
}

Spectrum fft2(const Image& img) {
    if (img.empty()) throw DimensionError("fft2: empty image");
    const int h = img.height();
    const int w = img.width();
    std::vector<std::complex<double>> buf(img.size());
    auto px = img.pixels();
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = {px[i], 0.0};
    detail::dft2_inplace(buf, h, w, -1);
    return fftshift(Spectrum(h, w, std::move(buf), false));
}

Image ifft2(const Spectrum& spec) {
    if (spec.size() == 0) throw DimensionError("ifft2: empty spectrum");
    Spectrum unshifted = ifftshift(spec);
    const int h = unshifted.height();
    const int w = unshifted.width();
    auto coeffs = unshifted.coeffs();
    std::vector<std::complex<double>> buf(coeffs.begin(), coeffs.end());
    detail::dft2_inplace(buf, h, w, +1);
    const double scale = 1.0 / (static_cast<double>(h) * w);
    std::vector<double> out(buf.size());
    for (std::size_t i = 0; i < buf.size(); ++i) out[i] = buf[i].real() * scale;
    return Image(h, w, std::move(out), ImageRole::residual);
}

SpectralEnergy spectral_energy_identity(const Image& x, const Image& y) {
    require_same_shape(x, y, "spectral_energy_identity");
    if (x.empty()) throw DimensionError("spectral_energy_identity: empty image");

    SpectralEnergy result;
    auto xp = x.pixels();
    auto yp = y.pixels();
    for (std::size_t i = 0; i < xp.size(); ++i) {
        const double diff = xp[i] - yp[i];
        result.spatial_sse += diff * diff;
    }
    const Spectrum fx = fft2(x);
    const Spectrum fy = fft2(y);
    auto cx = fx.coeffs();
    auto cy = fy.coeffs();
    double sum = 0.0;
    for (std::size_t i = 0; i < cx.size(); ++i) sum += std::norm(cx[i] - cy[i]);
    result.spectral_sse_scaled = sum / static_cast<double>(x.size());
    return result;
}

}  // namespace focalspec
