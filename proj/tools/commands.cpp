#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>

#include <json.hpp>

#include "focalspec/error.hpp"
#include "focalspec/freqloss.hpp"
#include "focalspec/image_io.hpp"
#include "focalspec/metrics.hpp"
#include "focalspec/parallel.hpp"
#include "focalspec/preprocess.hpp"
#include "focalspec/recon.hpp"
#include "focalspec/spectral.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace focalspec::cli {

namespace {

void log(const GlobalOptions& g, const std::string& msg) {
    if (g.verbose > 0) std::cerr << msg << '\n';
}

fs::path ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
    return dir;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

double parse_number(const std::string& text, const std::string& what) {
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size() || !std::isfinite(value)) {
        throw ContractError("invalid " + what + " '" + text + "'");
    }
    return value;
}

std::string format(const char* pattern, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), pattern, args...);
    return buf;
}

std::string depth_tag(std::size_t index, double d) { return format("d%02zu_%+.4f", index, d); }

optics::OtfModel resolve_model(const optics::PhantomSpec& spec, const OpticsOptions& o,
                               const optics::SweepSettings& settings, const GlobalOptions& g) {
    optics::OtfModel model;
    model.kind = optics::parse_otf_kind(o.otf);
    model.noise_sigma = o.noise;
    if (o.kappa == "auto") {
        model.kappa = optics::calibrate_kappa(spec, model.kind, o.target_decay, settings);
        log(g, format("calibrated kappa %.6g for target decay %g", model.kappa, o.target_decay));
    } else {
        model.kappa = parse_number(o.kappa, "kappa");
    }
    model.validate();
    return model;
}

Image load_or_render_target(const std::string& path, const PhantomOptions& phantom, std::uint64_t seed,
                            const fs::path& out) {
    if (!path.empty()) {
        Image target = io::read_image(path);
        require_intensity(target, "target");
        return target;
    }
    Image target = optics::make_phantom(phantom.spec(seed), phantom.height, phantom.width);
    io::write_png(out / "target.png", target);
    return target;
}

ordered_json number_or_inf(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

bool is_image_file(const fs::path& p) {
    const std::string ext = p.extension().string();
    return ext == ".png" || ext == ".pgm" || ext == ".f64";
}

std::vector<fs::path> list_images(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw IoError("not a directory: '" + dir.string() + "'");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && is_image_file(entry.path())) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    return files;
}

}  // namespace

optics::PhantomSpec PhantomOptions::spec(std::uint64_t seed) const {
    optics::PhantomSpec s;
    s.pitch_deg = pitch;
    s.roll_deg = roll;
    s.body_radius = body_radius;
    s.n_arms = arms;
    s.arm_length = arm_length;
    s.seed = seed;
    s.validate();
    return s;
}

PhantomOptions small_phantom() {
    PhantomOptions p;
    p.height = 64;
    p.width = 64;
    p.body_radius = 8.0;
    p.arm_length = 12.0;
    return p;
}

int run_simulate(const GlobalOptions& g, const SimulateOptions& o) {
    const fs::path out = ensure_dir(g.out);
    const optics::PhantomSpec base = o.phantom.spec(g.seed);
    optics::SweepSettings settings;
    settings.height = o.phantom.height;
    settings.width = o.phantom.width;
    settings.threads = g.threads;
    const optics::OtfModel model = resolve_model(base, o.optics, settings, g);
    const std::vector<DepthLabel> depths = optics::uniform_depths(o.depths);
    if (!(o.fuse_weight >= 0.0)) throw ContractError("fuse weight must be non-negative");

    std::vector<std::pair<int, int>> poses;
    if (o.dataset) {
        for (int p : o.pitches)
            for (int r : o.rolls) poses.emplace_back(p, r);
    } else {
        poses.emplace_back(o.phantom.pitch, o.phantom.roll);
    }

    ordered_json manifest;
    manifest["otf"] = optics::to_string(model.kind);
    manifest["kappa"] = model.kappa;
    manifest["noise_sigma"] = model.noise_sigma;
    manifest["height"] = o.phantom.height;
    manifest["width"] = o.phantom.width;
    manifest["slice_eps"] = o.slice_eps;
    manifest["fuse_weight"] = o.fuse_weight;
    manifest["images"] = ordered_json::array();

    for (const auto& [pitch, roll] : poses) {
        optics::PhantomSpec spec = base;
        spec.pitch_deg = pitch;
        spec.roll_deg = roll;
        spec.validate();
        const fs::path rel = o.dataset ? fs::path(format("p%02d_r%02d", pitch, roll)) : fs::path();
        const fs::path dir = ensure_dir(out / rel);
        for (const char* sub : {"defocused", "control2", "fused"}) ensure_dir(dir / sub);
        log(g, "rendering pose pitch " + std::to_string(pitch) + " roll " + std::to_string(roll));

        const Image sharp = optics::make_phantom(spec, o.phantom.height, o.phantom.width);
        io::write_png(dir / "phantom.png", sharp);
        spectral::write_ratio_csv(dir / "sweep.csv", optics::depth_sweep(spec, model, depths, settings));

        std::vector<ordered_json> entries(depths.size());
        parallel_for(depths.size(), g.threads, [&](std::size_t i) {
            const DepthLabel d = depths[i];
            const std::string tag = depth_tag(i, d.value());
            const Image blurred = optics::render_defocused(sharp, model, d, spec.seed);
            const optics::ConditionMaps maps =
                optics::render_conditions(spec, d, o.slice_eps, o.phantom.height, o.phantom.width);
            const Image fused = optics::fuse_conditions(maps.control1, maps.control2, o.fuse_weight);
            io::write_f64(dir / "defocused" / (tag + ".f64"), blurred);
            io::write_png(dir / "defocused" / (tag + ".png"), blurred);
            io::write_png(dir / "control2" / (tag + ".png"), maps.control2);
            io::write_png(dir / "fused" / (tag + ".png"), fused);
            if (i == 0) io::write_png(dir / "control1.png", maps.control1);

            ordered_json e;
            e["path"] = (rel / "defocused" / (tag + ".f64")).generic_string();
            e["png"] = (rel / "defocused" / (tag + ".png")).generic_string();
            e["control1"] = (rel / "control1.png").generic_string();
            e["control2"] = (rel / "control2" / (tag + ".png")).generic_string();
            e["fused"] = (rel / "fused" / (tag + ".png")).generic_string();
            e["pitch"] = pitch;
            e["roll"] = roll;
            e["d"] = d.value();
            e["seed"] = spec.seed;
            entries[i] = std::move(e);
        });
        for (auto& e : entries) manifest["images"].push_back(std::move(e));
    }
    write_text(out / "manifest.json", manifest.dump(2) + "\n");
    std::cout << "wrote " << manifest["images"].size() << " defocused images to " << out.string() << '\n';
    return 0;
}

int run_sweep(const GlobalOptions& g, const SweepOptions& o) {
    const fs::path out = ensure_dir(g.out);
    const optics::PhantomSpec spec = o.phantom.spec(g.seed);
    optics::SweepSettings settings;
    settings.height = o.phantom.height;
    settings.width = o.phantom.width;
    settings.tau_freq = o.tau;
    settings.steepness = o.steepness;
    settings.threads = g.threads;
    const optics::OtfModel model = resolve_model(spec, o.optics, settings, g);
    const auto rows = optics::depth_sweep(spec, model, optics::uniform_depths(o.depths), settings);
    spectral::write_ratio_csv(out / "sweep.csv", rows);

    const auto peak = std::max_element(rows.begin(), rows.end(),
                                       [](const auto& a, const auto& b) { return a.ratio < b.ratio; });
    std::cout << format("kappa %.6g, peak hf_ratio %.6g at d = %g\n", model.kappa, peak->ratio, peak->d);
    return 0;
}

int run_loss(const GlobalOptions& g, const LossOptions& o) {
    const DepthLabel d(o.d);
    freqloss::FreqLossConfig cfg;
    cfg.tau_freq = o.tau;
    cfg.steepness = o.steepness;
    cfg.gate_threshold = o.gate;
    cfg.alpha = o.alpha;
    cfg.validate();
    if (o.t < 0) throw ContractError("timestep must be non-negative");

    const fs::path out = ensure_dir(g.out);
    const Image pred = io::read_image(o.pred);
    const Image target = io::read_image(o.target);
    const freqloss::TotalLoss loss = freqloss::total_loss(pred, target, d, o.t, cfg);
    const std::string json = freqloss::to_json(loss, o.t);
    write_text(out / "loss.json", json + "\n");
    if (o.grad) io::write_f64(out / "grad.f64", freqloss::freq_loss_grad(pred, target, d, o.t, cfg));
    std::cout << json << '\n';
    return 0;
}

int run_grad_check(const GlobalOptions& g, const GradCheckOptions& o) {
    if (o.size < 2) throw ContractError("size must be at least 2");
    if (o.seeds < 1) throw ContractError("seeds must be positive");
    if (o.top < 1) throw ContractError("top must be positive");
    std::vector<DepthLabel> depths;
    for (double d : o.depths) depths.emplace_back(d);
    const fs::path out = ensure_dir(g.out);

    double worst_rel = 0.0;
    double worst_abs = 0.0;
    for (int s = 0; s < o.seeds; ++s) {
        std::mt19937_64 rng(g.seed + static_cast<std::uint64_t>(s));
        std::uniform_real_distribution<double> uniform(0.0, 1.0);
        Image pred(o.size, o.size, ImageRole::intensity);
        Image target(o.size, o.size, ImageRole::intensity);
        for (double& p : pred.pixels()) p = uniform(rng);
        for (double& p : target.pixels()) p = uniform(rng);
        for (const DepthLabel d : depths) {
            const auto check = freqloss::check_gradient(pred, target, d, static_cast<std::size_t>(o.top), o.step);
            worst_rel = std::max(worst_rel, check.max_relative_error);
            worst_abs = std::max(worst_abs, check.max_absolute_error);
        }
    }

    ordered_json j;
    j["size"] = o.size;
    j["seeds"] = o.seeds;
    j["depths"] = o.depths;
    j["top"] = o.top;
    j["step"] = o.step;
    j["max_relative_error"] = worst_rel;
    j["max_absolute_error"] = worst_abs;
    j["tolerance"] = o.tolerance;
    j["pass"] = worst_rel <= o.tolerance;
    write_text(out / "grad_check.json", j.dump(2) + "\n");
    std::cout << format("max relative gradient error: %.3e (tolerance %.1e)\n", worst_rel, o.tolerance);
    if (worst_rel > o.tolerance) {
        throw ContractError(format("gradient check failed: %.3e exceeds %.1e", worst_rel, o.tolerance));
    }
    return 0;
}

int run_recon(const GlobalOptions& g, const ReconOptions& o) {
    recon::ReconConfig cfg;
    cfg.steps = o.steps;
    cfg.step_size = o.step_size;
    cfg.alpha = o.alpha == "auto" ? 0.0 : parse_number(o.alpha, "alpha");
    cfg.d = DepthLabel(o.d);
    cfg.t_gate = o.t_gate;
    cfg.init = recon::parse_init_kind(o.init);
    cfg.validate();

    const fs::path out = ensure_dir(g.out);
    const Image target = load_or_render_target(o.target, o.phantom, g.seed, out);
    if (o.alpha == "auto") cfg.alpha = 0.001 / static_cast<double>(target.size());
    const recon::ReconTrace trace = recon::reconstruct(target, cfg, g.seed);
    recon::write_trace_csv(out / "trace.csv", trace);
    io::write_png(out / "final.png", trace.final_image);
    io::write_f64(out / "final.f64", trace.final_image);

    const auto& first = trace.records.front();
    const auto& last = trace.records.back();
    std::cout << format("total %.6g -> %.6g, high-band residual %.6g -> %.6g over %d steps\n", first.total,
                        last.total, first.high_res, last.high_res, cfg.steps);
    return 0;
}

int run_ab(const GlobalOptions& g, const AbOptions& o) {
    const fs::path out = ensure_dir(g.out);
    const Image target = load_or_render_target(o.target, o.phantom, g.seed, out);

    recon::ReconConfig on;
    on.steps = o.steps;
    on.step_size = o.step_size;
    on.alpha = o.alpha == "auto" ? 0.001 / static_cast<double>(target.size()) : parse_number(o.alpha, "alpha");
    on.d = DepthLabel(o.d);
    on.t_gate = o.t_gate;
    on.init = recon::InitKind::noise;
    recon::ReconConfig off = on;
    off.alpha = 0.0;

    const recon::AbSummary summary = recon::ab_experiment(target, on, off, o.seeds, g.threads);
    write_text(out / "ab.json", recon::to_json(summary) + "\n");
    std::cout << format("alpha %.6g: ON wins %d/%d, high-band %.6g vs %.6g, SSIM %.4f vs %.4f\n", on.alpha,
                        summary.wins, summary.n, summary.on.mean_high_residual, summary.off.mean_high_residual,
                        summary.on.mean_ssim, summary.off.mean_ssim);
    return 0;
}

int run_metrics(const GlobalOptions& g, const MetricsOptions& o) {
    metrics::SsimConfig cfg;
    cfg.window_size = o.window;
    cfg.window_sigma = o.sigma;
    cfg.dynamic_range = o.peak;
    cfg.validate();

    std::vector<std::pair<fs::path, fs::path>> pairs;
    if (!o.a.empty() || !o.b.empty()) {
        if (o.a.empty() || o.b.empty()) throw ContractError("--a and --b must be given together");
        pairs.emplace_back(o.a, o.b);
    } else if (!o.dir_a.empty() && !o.dir_b.empty()) {
        for (const auto& path : list_images(o.dir_a)) {
            const fs::path other = fs::path(o.dir_b) / path.filename();
            if (fs::exists(other)) pairs.emplace_back(path, other);
        }
    } else {
        throw ContractError("metrics needs --a/--b or --dir-a/--dir-b");
    }
    if (pairs.empty()) throw ContractError("no matching image pairs");
    const fs::path out = ensure_dir(g.out);

    std::vector<metrics::QualityReport> reports(pairs.size());
    parallel_for(pairs.size(), g.threads, [&](std::size_t i) {
        reports[i] = metrics::evaluate(io::read_image(pairs[i].first), io::read_image(pairs[i].second), cfg, o.peak);
    });

    ordered_json j;
    j["pairs"] = ordered_json::array();
    double ssim_sum = 0.0, psnr_sum = 0.0, mse_sum = 0.0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        ordered_json p;
        p["a"] = pairs[i].first.generic_string();
        p["b"] = pairs[i].second.generic_string();
        p["ssim"] = reports[i].ssim;
        p["psnr_db"] = number_or_inf(reports[i].psnr_db);
        p["mse"] = reports[i].mse;
        j["pairs"].push_back(std::move(p));
        ssim_sum += reports[i].ssim;
        psnr_sum += reports[i].psnr_db;
        mse_sum += reports[i].mse;
    }
    const auto n = static_cast<double>(pairs.size());
    j["mean"] = {{"ssim", ssim_sum / n}, {"psnr_db", number_or_inf(psnr_sum / n)}, {"mse", mse_sum / n}};
    j["lpips"] = "unavailable";
    j["fid"] = "unavailable";
    const std::string text = j.dump(2);
    write_text(out / "metrics.json", text + "\n");
    std::cout << text << '\n';
    return 0;
}

int run_preprocess(const GlobalOptions& g, const PreprocessOptions& o) {
    preprocess::PreprocConfig cfg;
    cfg.wiener_window = o.window;
    cfg.canny_low_ratio = o.low_ratio;
    cfg.roi_size = o.roi;
    if (o.threshold == "otsu") {
        cfg.threshold_mode = preprocess::ThresholdMode::otsu;
    } else {
        cfg.threshold_mode = preprocess::ThresholdMode::fixed;
        cfg.fixed_threshold = parse_number(o.threshold, "threshold");
    }
    cfg.validate();

    const std::vector<fs::path> frames = list_images(o.input);
    if (frames.empty()) throw ContractError("no frames found in '" + o.input + "'");
    const fs::path out = ensure_dir(g.out);

    std::vector<std::string> summaries(frames.size());
    parallel_for(frames.size(), g.threads, [&](std::size_t i) {
        const std::string stem = frames[i].stem().string();
        const preprocess::PipelineResult result = preprocess::preprocess_pipeline(io::read_image(frames[i]), cfg);
        io::write_png(out / (stem + "_roi.png"), result.roi.image);
        write_text(out / (stem + ".json"), preprocess::sidecar_json(result) + "\n");
        if (o.debug) {
            io::write_png(out / (stem + "_denoised.png"), result.denoised);
            io::write_png(out / (stem + "_binary.png"), result.binary);
            io::write_png(out / (stem + "_edges.png"), result.edges);
        }
        summaries[i] = format("%s: threshold %.6g, crop origin (%d, %d)", frames[i].filename().c_str(),
                              result.threshold, result.roi.origin_row, result.roi.origin_col);
    });
    for (const auto& line : summaries) std::cout << line << '\n';
    return 0;
}

int run_analyze(const GlobalOptions& g, const AnalyzeOptions& o) {
    std::ifstream in(o.manifest);
    if (!in) throw IoError("cannot open manifest '" + o.manifest + "'");
    nlohmann::json manifest;
    try {
        in >> manifest;
    } catch (const nlohmann::json::exception& e) {
        throw ContractError(std::string("manifest is not valid JSON: ") + e.what());
    }
    if (!manifest.is_object() || !manifest.contains("images") || !manifest["images"].is_array()) {
        throw ContractError("manifest has no \"images\" array");
    }
    const auto& images = manifest["images"];
    if (images.empty()) throw ContractError("manifest lists no images");

    const fs::path base = fs::path(o.manifest).parent_path();
    std::vector<std::pair<fs::path, DepthLabel>> entries;
    for (const auto& e : images) {
        if (!e.contains("path") || !e["path"].is_string() || !e.contains("d") || !e["d"].is_number()) {
            throw ContractError("manifest entry needs \"path\" and numeric \"d\"");
        }
        entries.emplace_back(base / e["path"].get<std::string>(), DepthLabel(e["d"].get<double>()));
    }
    const fs::path out = ensure_dir(g.out);

    std::vector<spectral::RatioRow> rows(entries.size());
    parallel_for(entries.size(), g.threads, [&](std::size_t i) {
        const Image img = io::read_image(entries[i].first);
        const auto masks = spectral::cached_masks(img.height(), img.width(), o.tau, o.steepness);
        rows[i] = {entries[i].second.value(), spectral::hf_energy_ratio(img, *masks)};
    });
    std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.d < b.d; });

    spectral::write_ratio_csv(out / "ratio_vs_depth.csv", rows);
    std::ostringstream dat;
    dat << "# d hf_ratio\n";
    for (const auto& r : rows) dat << format("%.12g %.12g\n", r.d, r.ratio);
    write_text(out / "ratio_vs_depth.dat", dat.str());
    std::cout << "analyzed " << rows.size() << " images\n";
    return 0;
}

}  // namespace focalspec::cli
