#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "focalspec/freqloss.hpp"
#include "focalspec/image.hpp"

namespace focalspec::recon {

enum class InitKind { blurred_target, noise, gray };

InitKind parse_init_kind(const std::string& name);
std::string to_string(InitKind kind);

struct ReconConfig {
    int steps = 500;
    double step_size = 0.5;
    double alpha = 0.001;
    DepthLabel d;
    int t_gate = 0;  ///< timestep handed to the gate; >= loss.gate_threshold disables L_freq
    InitKind init = InitKind::blurred_target;
    freqloss::FreqLossConfig loss;  ///< mask and gate settings; its alpha is ignored

    void validate() const;
};

struct TraceRecord {
    int step = 0;
    double total = 0.0;
    double pix = 0.0;
    double freq = 0.0;
    double high_res = 0.0;  ///< ||M_high . dF||^2
    double low_res = 0.0;   ///< ||M_low . dF||^2
};

/// records[k] describes the iterate before update k; records.back() is the
/// final image, so there are steps + 1 records.
struct ReconTrace {
    std::vector<TraceRecord> records;
    Image final_image;
};

/// Initial iterate: the target defocused by a Gaussian OTF (kappa 8, d = 0.5),
/// seeded uniform noise, or uniform 0.5.
Image initial_image(const Image& target, InitKind kind, std::uint64_t seed);

/// Projected gradient descent on the pixels of pred under
/// mse(pred, target) + alpha * freq_loss(pred, target, d, t_gate).
/// Throws DivergenceError naming the step if a non-finite value appears.
ReconTrace reconstruct(const Image& target, const ReconConfig& cfg, std::uint64_t seed);

void write_trace_csv(const std::filesystem::path& path, const ReconTrace& trace);

struct ArmSummary {
    double mean_high_residual = 0.0;
    double mean_ssim = 0.0;
    std::vector<double> high_residual;  ///< final high-band residual per seed
    std::vector<double> ssim;           ///< final SSIM per seed
};

struct AbSummary {
    ArmSummary on;
    ArmSummary off;
    int wins = 0;  ///< seeds where the ON arm ends with the lower high-band residual
    int n = 0;
};

/// Matched-seed comparison of reconstruction with and without the spectral
/// term, both arms starting from the same noise image (seeds 0..n_seeds-1).
AbSummary ab_experiment(const Image& target, const ReconConfig& cfg_on,
                        const ReconConfig& cfg_off, int n_seeds, int threads = 1);

/// {"on":{...},"off":{...},"wins":k,"n":n}
std::string to_json(const AbSummary& summary);

}  // namespace focalspec::recon
