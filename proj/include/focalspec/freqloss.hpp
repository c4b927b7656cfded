#pragma once

#include <string>
#include <utility>
#include <vector>

#include "focalspec/image.hpp"
#include "focalspec/spectral.hpp"

namespace focalspec::freqloss {

struct FreqLossConfig {
    double tau_freq = spectral::default_tau_freq;
    double steepness = spectral::default_steepness;
    int gate_threshold = 500;  ///< loss is active only for t < gate_threshold
    double alpha = 0.001;      ///< weight of the spectral term in total_loss

    /// Throws ContractError when a field is out of its domain.
    void validate() const;
};

/// Weighted band terms of the adaptive spectral loss. `high_band` and
/// `low_band` already include their lambda factors, so total = high + low.
struct LossReport {
    double total = 0.0;
    double high_band = 0.0;
    double low_band = 0.0;
    bool gated = false;  ///< true when the loss was active (t < T)
    spectral::BandWeights weights;
};

struct BandTerms {
    double high = 0.0;  ///< ||M_high . dF||^2, unweighted
    double low = 0.0;   ///< ||M_low . dF||^2, unweighted
};

/// Unweighted masked spectral energies of a shifted residual spectrum.
BandTerms band_terms(const Spectrum& residual, const spectral::RadialMaskPair& masks);

/// lambda_high ||M_high (F(pred) - F(target))||^2 + lambda_low ||M_low (...)||^2
/// for arbitrary masks and weights, no gate. Spectral norms are plain sums of
/// squared magnitudes of the unnormalized DFT.
LossReport masked_spectral_loss(const Image& pred, const Image& target,
                                const spectral::RadialMaskPair& masks, double lambda_high,
                                double lambda_low);

/// Depth-adaptive spectral loss, active only when t < cfg.gate_threshold.
LossReport freq_loss(const Image& pred, const Image& target, DepthLabel d, int t,
                     const FreqLossConfig& cfg = {});

/// Gradient of freq_loss with respect to pred (role residual); zero when gated off.
Image freq_loss_grad(const Image& pred, const Image& target, DepthLabel d, int t,
                     const FreqLossConfig& cfg = {});

/// Per-frequency weight lambda_high M_high^2 + lambda_low M_low^2 applied to the
/// spectral residual by the gradient.
Image gradient_weights(const spectral::RadialMaskPair& masks, const spectral::BandWeights& w);

/// 2 * HW * Re(ifft2(weights . residual)): the adjoint of the unnormalized
/// forward transform applied to a weighted residual spectrum.
Image weighted_adjoint(const Spectrum& residual, const Image& weights);

struct TotalLoss {
    double total = 0.0;  ///< pix + alpha * freq
    double pix = 0.0;    ///< mean squared pixel error
    double freq = 0.0;
    LossReport report;
};

TotalLoss total_loss(const Image& pred, const Image& target, DepthLabel d, int t,
                     const FreqLossConfig& cfg = {});

/// Serializes a loss evaluation with the keys total, pix, freq, high_band,
/// low_band, gated, lambda_high, d, t.
std::string to_json(const TotalLoss& loss, int t);

/// Evaluates independent (pred, target) pairs, optionally on several threads.
/// Results are in input order and do not depend on the thread count.
std::vector<LossReport> freq_loss_batch(const std::vector<std::pair<Image, Image>>& pairs,
                                        DepthLabel d, int t, const FreqLossConfig& cfg = {},
                                        int threads = 1);

struct GradientCheck {
    double max_relative_error = 0.0;  ///< over the top_k largest analytic entries
    double max_absolute_error = 0.0;  ///< over the remaining entries
};

/// Compares freq_loss_grad (gate open) with central finite differences of
/// freq_loss using the given step.
GradientCheck check_gradient(const Image& pred, const Image& target, DepthLabel d,
                             std::size_t top_k = 20, double step = 1e-6,
                             const FreqLossConfig& cfg = {});

}  // namespace focalspec::freqloss
