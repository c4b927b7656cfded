#include "focalspec/freqloss.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "focalspec/error.hpp"
#include "focalspec/fft.hpp"
#include "focalspec/parallel.hpp"

namespace focalspec::freqloss {

namespace {

void check_inputs(const Image& pred, const Image& target, int t, const FreqLossConfig& cfg) {
    cfg.validate();
    require_same_shape(pred, target, "freq_loss");
    if (pred.empty()) throw DimensionError("freq_loss: empty image");
    if (t < 0) throw ContractError("timestep must be non-negative");
}

Spectrum residual_spectrum(const Image& pred, const Image& target) {
    Spectrum diff = fft2(pred);
    const Spectrum ft = fft2(target);
    auto out = diff.coeffs();
    auto rhs = ft.coeffs();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= rhs[i];
    return diff;
}

}  // namespace

void FreqLossConfig::validate() const {
    if (!(tau_freq > 0.0 && tau_freq < 1.0)) throw ContractError("tau_freq must lie in (0, 1)");
    if (!(steepness > 0.0) || !std::isfinite(steepness)) {
        throw ContractError("steepness must be positive");
    }
    if (gate_threshold < 0) throw ContractError("gate threshold must be non-negative");
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ContractError("alpha must be non-negative");
}

BandTerms band_terms(const Spectrum& residual, const spectral::RadialMaskPair& masks) {
    if (residual.height() != masks.m_high.height() || residual.width() != masks.m_high.width()) {
        throw DimensionError("band_terms: mask shape does not match spectrum");
    }
    if (!residual.shifted()) throw ContractError("band_terms: expected a shifted spectrum");
    BandTerms terms;
    auto coeffs = residual.coeffs();
    auto high = masks.m_high.pixels();
    auto low = masks.m_low.pixels();
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        const double power = std::norm(coeffs[i]);
        terms.high += high[i] * high[i] * power;
        terms.low += low[i] * low[i] * power;
    }
    return terms;
}

LossReport masked_spectral_loss(const Image& pred, const Image& target,
                                const spectral::RadialMaskPair& masks, double lambda_high,
                                double lambda_low) {
    require_same_shape(pred, target, "masked_spectral_loss");
    const BandTerms terms = band_terms(residual_spectrum(pred, target), masks);
    LossReport report;
    report.gated = true;
    report.weights.lambda_high = lambda_high;
    report.weights.lambda_low = lambda_low;
    report.high_band = lambda_high * terms.high;
    report.low_band = lambda_low * terms.low;
    report.total = report.high_band + report.low_band;
    return report;
}

LossReport freq_loss(const Image& pred, const Image& target, DepthLabel d, int t,
                     const FreqLossConfig& cfg) {
    check_inputs(pred, target, t, cfg);
    const spectral::BandWeights weights = spectral::band_weights(d);
    if (t >= cfg.gate_threshold) {
        LossReport off;
        off.weights = weights;
        return off;
    }
    const auto masks = spectral::cached_masks(pred.height(), pred.width(), cfg.tau_freq, cfg.steepness);
    LossReport report =
        masked_spectral_loss(pred, target, *masks, weights.lambda_high, weights.lambda_low);
    report.weights = weights;
    return report;
}

Image gradient_weights(const spectral::RadialMaskPair& masks, const spectral::BandWeights& w) {
    Image out(masks.m_high.height(), masks.m_high.width());
    auto high = masks.m_high.pixels();
    auto low = masks.m_low.pixels();
    auto dst = out.pixels();
    for (std::size_t i = 0; i < dst.size(); ++i) {
        dst[i] = w.lambda_high * high[i] * high[i] + w.lambda_low * low[i] * low[i];
    }
    return out;
}

Image weighted_adjoint(const Spectrum& residual, const Image& weights) {
    if (residual.height() != weights.height() || residual.width() != weights.width()) {
        throw DimensionError("weighted_adjoint: weight shape does not match spectrum");
    }
    Spectrum weighted = residual;
    auto coeffs = weighted.coeffs();
    auto w = weights.pixels();
    for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] *= w[i];
    // The adjoint of the unnormalized DFT is HW times its inverse.
    Image grad = ifft2(weighted);
    const double scale = 2.0 * static_cast<double>(grad.size());
    for (double& g : grad.pixels()) g *= scale;
    return grad;
}

Image freq_loss_grad(const Image& pred, const Image& target, DepthLabel d, int t,
                     const FreqLossConfig& cfg) {
    check_inputs(pred, target, t, cfg);
    if (t >= cfg.gate_threshold) return Image(pred.height(), pred.width());
    const auto masks = spectral::cached_masks(pred.height(), pred.width(), cfg.tau_freq, cfg.steepness);
    const Image weights = gradient_weights(*masks, spectral::band_weights(d));
    return weighted_adjoint(residual_spectrum(pred, target), weights);
}

TotalLoss total_loss(const Image& pred, const Image& target, DepthLabel d, int t,
                     const FreqLossConfig& cfg) {
    TotalLoss out;
    out.report = freq_loss(pred, target, d, t, cfg);
    auto p = pred.pixels();
    auto q = target.pixels();
    double sse = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) sse += (p[i] - q[i]) * (p[i] - q[i]);
    out.pix = sse / static_cast<double>(p.size());
    out.freq = out.report.total;
    out.total = out.pix + cfg.alpha * out.freq;
    return out;
}

std::string to_json(const TotalLoss& loss, int t) {
    nlohmann::ordered_json j;
    j["total"] = loss.total;
    j["pix"] = loss.pix;
    j["freq"] = loss.freq;
    j["high_band"] = loss.report.high_band;
    j["low_band"] = loss.report.low_band;
    j["gated"] = loss.report.gated;
    j["lambda_high"] = loss.report.weights.lambda_high;
    j["d"] = loss.report.weights.d.value();
    j["t"] = t;
    return j.dump();
}

std::vector<LossReport> freq_loss_batch(const std::vector<std::pair<Image, Image>>& pairs,
                                        DepthLabel d, int t, const FreqLossConfig& cfg,
                                        int threads) {
    std::vector<LossReport> out(pairs.size());
    parallel_for(pairs.size(), threads, [&](std::size_t i) {
        out[i] = freq_loss(pairs[i].first, pairs[i].second, d, t, cfg);
    });
    return out;
}

GradientCheck check_gradient(const Image& pred, const Image& target, DepthLabel d,
                             std::size_t top_k, double step, const FreqLossConfig& cfg) {
    if (!(step > 0.0)) throw ContractError("finite-difference step must be positive");
    const Image analytic = freq_loss_grad(pred, target, d, 0, cfg);
    Image probe = pred;
    auto x = probe.pixels();
    std::vector<double> numeric(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double saved = x[i];
        x[i] = saved + step;
        const double up = freq_loss(probe, target, d, 0, cfg).total;
        x[i] = saved - step;
        const double down = freq_loss(probe, target, d, 0, cfg).total;
        x[i] = saved;
        numeric[i] = (up - down) / (2.0 * step);
    }

    auto a = analytic.pixels();
    std::vector<std::size_t> order(a.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return std::abs(a[i]) > std::abs(a[j]); });
    GradientCheck out;
    for (std::size_t k = 0; k < order.size(); ++k) {
        const std::size_t i = order[k];
        const double err = std::abs(a[i] - numeric[i]);
        if (k < top_k) {
            out.max_relative_error = std::max(out.max_relative_error, a[i] != 0.0 ? err / std::abs(a[i]) : err);
        } else {
            out.max_absolute_error = std::max(out.max_absolute_error, err);
        }
    }
    return out;
}

}  // namespace focalspec::freqloss
