#include "focalspec/recon.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include <json.hpp>

#include "focalspec/error.hpp"
#include "focalspec/fft.hpp"
#include "focalspec/metrics.hpp"
#include "focalspec/optics.hpp"
#include "focalspec/parallel.hpp"

namespace focalspec::recon {

namespace {

bool same_except_alpha(const ReconConfig& a, const ReconConfig& b) {
    return a.steps == b.steps && a.step_size == b.step_size && a.d == b.d &&
           a.t_gate == b.t_gate && a.init == b.init && a.loss.tau_freq == b.loss.tau_freq &&
           a.loss.steepness == b.loss.steepness &&
           a.loss.gate_threshold == b.loss.gate_threshold;
}

ArmSummary summarize(std::vector<double> high, std::vector<double> ssim) {
    ArmSummary s;
    s.high_residual = std::move(high);
    s.ssim = std::move(ssim);
    for (double v : s.high_residual) s.mean_high_residual += v;
    for (double v : s.ssim) s.mean_ssim += v;
    s.mean_high_residual /= static_cast<double>(s.high_residual.size());
    s.mean_ssim /= static_cast<double>(s.ssim.size());
    return s;
}

nlohmann::ordered_json arm_json(const ArmSummary& arm) {
    nlohmann::ordered_json j;
    j["mean_high_residual"] = arm.mean_high_residual;
    j["mean_ssim"] = arm.mean_ssim;
    j["high_residual"] = arm.high_residual;
    j["ssim"] = arm.ssim;
    return j;
}

}  // namespace

InitKind parse_init_kind(const std::string& name) {
    if (name == "blurred_target" || name == "blurred") return InitKind::blurred_target;
    if (name == "noise") return InitKind::noise;
    if (name == "gray") return InitKind::gray;
    throw ContractError("unknown init kind '" + name + "'");
}

std::string to_string(InitKind kind) {
    switch (kind) {
        case InitKind::blurred_target: return "blurred_target";
        case InitKind::noise: return "noise";
        case InitKind::gray: return "gray";
    }
    return "unknown";
}

void ReconConfig::validate() const {
    if (steps < 1) throw ContractError("steps must be >= 1");
    if (!(step_size > 0.0) || !std::isfinite(step_size)) {
        throw ContractError("step_size must be positive");
    }
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ContractError("alpha must be non-negative");
    if (t_gate < 0) throw ContractError("t_gate must be non-negative");
    loss.validate();
}

Image initial_image(const Image& target, InitKind kind, std::uint64_t seed) {
    switch (kind) {
        case InitKind::blurred_target:
            return optics::render_defocused(target, optics::OtfModel{optics::OtfKind::gaussian, 8.0, 0.0},
                                            DepthLabel(0.5), seed);
        case InitKind::noise: {
            std::mt19937_64 rng(seed);
            std::uniform_real_distribution<double> uniform(0.0, 1.0);
            Image img(target.height(), target.width(), ImageRole::intensity);
            for (double& p : img.pixels()) p = uniform(rng);
            return img;
        }
        case InitKind::gray:
            return Image(target.height(), target.width(), ImageRole::intensity, 0.5);
    }
    throw ContractError("unknown init kind");
}

ReconTrace reconstruct(const Image& target, const ReconConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    require_intensity(target, "reconstruct");

    const int h = target.height();
    const int w = target.width();
    const auto n = static_cast<double>(target.size());
    const auto masks = spectral::cached_masks(h, w, cfg.loss.tau_freq, cfg.loss.steepness);
    const spectral::BandWeights weights = spectral::band_weights(cfg.d);
    const Image grad_weights = freqloss::gradient_weights(*masks, weights);
    const bool gate_open = cfg.t_gate < cfg.loss.gate_threshold;
    const Spectrum target_spec = fft2(target);

    Image pred = initial_image(target, cfg.init, seed);
    ReconTrace trace;
    trace.records.reserve(static_cast<std::size_t>(cfg.steps) + 1);

    for (int step = 0;; ++step) {
        Spectrum residual = fft2(pred);
        {
            auto c = residual.coeffs();
            auto t = target_spec.coeffs();
            for (std::size_t i = 0; i < c.size(); ++i) c[i] -= t[i];
        }
        const freqloss::BandTerms bands = freqloss::band_terms(residual, *masks);

        TraceRecord rec;
        rec.step = step;
        auto p = pred.pixels();
        auto q = target.pixels();
        double sse = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) sse += (p[i] - q[i]) * (p[i] - q[i]);
        rec.pix = sse / n;
        rec.freq = gate_open ? weights.lambda_high * bands.high + weights.lambda_low * bands.low : 0.0;
        rec.total = rec.pix + cfg.alpha * rec.freq;
        rec.high_res = bands.high;
        rec.low_res = bands.low;
        if (!std::isfinite(rec.total) || !std::isfinite(rec.high_res) || !std::isfinite(rec.low_res)) {
            throw DivergenceError("reconstruction diverged at step " + std::to_string(step), step);
        }
        trace.records.push_back(rec);
        if (step == cfg.steps) break;

        std::vector<double> grad(p.size());
        for (std::size_t i = 0; i < p.size(); ++i) grad[i] = 2.0 * (p[i] - q[i]) / n;
        if (gate_open && cfg.alpha > 0.0) {
            const Image spectral_grad = freqloss::weighted_adjoint(residual, grad_weights);
            auto g = spectral_grad.pixels();
            for (std::size_t i = 0; i < p.size(); ++i) grad[i] += cfg.alpha * g[i];
        }
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double next = p[i] - cfg.step_size * grad[i];
            if (!std::isfinite(next)) {
                throw DivergenceError("reconstruction diverged at step " + std::to_string(step), step);
            }
            p[i] = std::clamp(next, 0.0, 1.0);  // projection onto valid intensities
        }
    }
    trace.final_image = std::move(pred);
    return trace;
}

void write_trace_csv(const std::filesystem::path& path, const ReconTrace& trace) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << "step,total,pix,freq,high_res,low_res\n";
    char buf[256];
    for (const auto& r : trace.records) {
        std::snprintf(buf, sizeof(buf), "%d,%.12g,%.12g,%.12g,%.12g,%.12g\n", r.step, r.total, r.pix,
                      r.freq, r.high_res, r.low_res);
        out << buf;
    }
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

AbSummary ab_experiment(const Image& target, const ReconConfig& cfg_on, const ReconConfig& cfg_off,
                        int n_seeds, int threads) {
    if (!(cfg_on.alpha > 0.0)) throw ContractError("ab_experiment: ON arm needs alpha > 0");
    if (cfg_off.alpha != 0.0) throw ContractError("ab_experiment: OFF arm needs alpha = 0");
    if (!same_except_alpha(cfg_on, cfg_off)) {
        throw ContractError("ab_experiment: arms must differ only in alpha");
    }
    if (cfg_on.init != InitKind::noise) throw ContractError("ab_experiment: arms must start from noise");
    if (n_seeds < 10) throw ContractError("ab_experiment: n_seeds must be >= 10");
    cfg_on.validate();
    cfg_off.validate();

    const auto count = static_cast<std::size_t>(n_seeds);
    std::vector<double> on_high(count), off_high(count), on_ssim(count), off_ssim(count);
    parallel_for(2 * count, threads, [&](std::size_t job) {
        const std::size_t seed = job / 2;
        const bool on = job % 2 == 0;
        const ReconTrace trace = reconstruct(target, on ? cfg_on : cfg_off, seed);
        (on ? on_high : off_high)[seed] = trace.records.back().high_res;
        (on ? on_ssim : off_ssim)[seed] = metrics::ssim(trace.final_image, target);
    });

    AbSummary summary;
    summary.n = n_seeds;
    for (std::size_t i = 0; i < count; ++i) {
        if (on_high[i] < off_high[i]) ++summary.wins;
    }
    summary.on = summarize(std::move(on_high), std::move(on_ssim));
    summary.off = summarize(std::move(off_high), std::move(off_ssim));
    return summary;
}

std::string to_json(const AbSummary& summary) {
    nlohmann::ordered_json j;
    j["on"] = arm_json(summary.on);
    j["off"] = arm_json(summary.off);
    j["wins"] = summary.wins;
    j["n"] = summary.n;
    return j.dump(2);
}

}  // namespace focalspec::recon
