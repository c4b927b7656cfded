#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "focalspec/error.hpp"
#include "json_config.hpp"

namespace fs = std::filesystem;
using namespace focalspec::cli;

namespace {

void add_phantom_options(CLI::App* sub, PhantomOptions& p) {
    sub->add_option("--height", p.height, "Frame height in pixels")->check(CLI::PositiveNumber);
    sub->add_option("--width", p.width, "Frame width in pixels")->check(CLI::PositiveNumber);
    sub->add_option("--pitch", p.pitch, "Pitch in degrees (multiple of 10, 0-60)");
    sub->add_option("--roll", p.roll, "Roll in degrees (multiple of 10, 0-60)");
    sub->add_option("--body-radius", p.body_radius, "Body radius in pixels");
    sub->add_option("--arms", p.arms, "Number of arms");
    sub->add_option("--arm-length", p.arm_length, "Arm length in pixels");
}

void add_optics_options(CLI::App* sub, OpticsOptions& o) {
    sub->add_option("--otf", o.otf, "Transfer function: gaussian or hopkins_sinc");
    sub->add_option("--kappa", o.kappa, "Defocus strength, or 'auto' to calibrate");
    sub->add_option("--noise", o.noise, "Sensor noise standard deviation");
    sub->add_option("--target-decay", o.target_decay, "ratio(0)/ratio(0.45) sought by --kappa auto");
}

int report(const char* message, int code) {
    std::fprintf(stderr, "error: %s\n", message);
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Frequency-aware microscopy numerics: defocus simulation, spectral losses, metrics.",
                 "focalspec"};
    app.config_formatter(std::make_shared<JsonConfig>());
    app.set_config("--config", "", "Replay a run.json written by an earlier run");
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions global;
    app.add_option("-o,--out", global.out, "Output directory")->envname("FOCALSPEC_OUT");
    app.add_option("--seed", global.seed, "Random seed");
    app.add_flag("-v,--verbose", global.verbose, "Log progress to stderr (repeat for more)");
    app.add_option("--threads", global.threads, "Worker threads, 0 for all cores")->check(CLI::NonNegativeNumber);

    std::map<std::string, std::function<int()>> commands;

    SimulateOptions sim;
    auto* simulate = app.add_subcommand("simulate", "Render a phantom, its defocus stack and condition maps");
    add_phantom_options(simulate, sim.phantom);
    add_optics_options(simulate, sim.optics);
    simulate->add_option("--depths", sim.depths, "Number of evenly spaced depths in [-0.5, 0.5]")
        ->check(CLI::PositiveNumber);
    simulate->add_option("--slice-eps", sim.slice_eps, "Half-thickness of the depth slice");
    simulate->add_option("--fuse-weight", sim.fuse_weight, "Weight of the slice map in the fused map");
    simulate->add_flag("--dataset", sim.dataset, "Render every pitch/roll combination");
    simulate->add_option("--pitches", sim.pitches, "Pitches for --dataset")->delimiter(',')->default_str("0,10,20,30,40,50,60");
    simulate->add_option("--rolls", sim.rolls, "Rolls for --dataset")->delimiter(',')->default_str("0,10,20,30,40,50,60");
    commands["simulate"] = [&] { return run_simulate(global, sim); };

    SweepOptions swp;
    auto* sweep = app.add_subcommand("sweep", "High-frequency energy ratio across depth");
    add_phantom_options(sweep, swp.phantom);
    add_optics_options(sweep, swp.optics);
    sweep->add_option("--depths", swp.depths, "Number of evenly spaced depths")->check(CLI::PositiveNumber);
    sweep->add_option("--tau", swp.tau, "Mask cutoff radius");
    sweep->add_option("--steepness", swp.steepness, "Mask sigmoid steepness");
    commands["sweep"] = [&] { return run_sweep(global, swp); };

    LossOptions lo;
    auto* loss = app.add_subcommand("loss", "Evaluate the depth-adaptive frequency loss for an image pair");
    loss->add_option("--pred", lo.pred, "Predicted image")->required();
    loss->add_option("--target", lo.target, "Target image")->required();
    loss->add_option("--d", lo.d, "Normalized depth in [-0.5, 0.5]");
    loss->add_option("--t", lo.t, "Diffusion timestep fed to the gate");
    loss->add_option("--tau", lo.tau, "Mask cutoff radius");
    loss->add_option("--steepness", lo.steepness, "Mask sigmoid steepness");
    loss->add_option("--gate", lo.gate, "Gate threshold T");
    loss->add_option("--alpha", lo.alpha, "Weight of the frequency term in the total");
    loss->add_flag("--grad", lo.grad, "Also write the gradient as grad.f64");
    commands["loss"] = [&] { return run_loss(global, lo); };

    GradCheckOptions gc;
    auto* grad = app.add_subcommand("grad-check", "Compare the analytic gradient with finite differences");
    grad->add_option("--size", gc.size, "Image side length");
    grad->add_option("--seeds", gc.seeds, "Number of random pairs");
    grad->add_option("--depths", gc.depths, "Depths to test")->delimiter(',')->default_str("-0.5,0,0.25");
    grad->add_option("--top", gc.top, "Largest-magnitude entries held to the relative tolerance");
    grad->add_option("--step", gc.step, "Central-difference step");
    grad->add_option("--tolerance", gc.tolerance, "Maximum accepted relative error");
    commands["grad-check"] = [&] { return run_grad_check(global, gc); };

    ReconOptions rc;
    auto* recon = app.add_subcommand("recon", "Gradient-descent reconstruction under the total loss");
    recon->add_option("--target", rc.target, "Target image (default: render the phantom)");
    add_phantom_options(recon, rc.phantom);
    recon->add_option("--steps", rc.steps, "Iterations");
    recon->add_option("--step-size", rc.step_size, "Gradient step");
    recon->add_option("--alpha", rc.alpha, "Weight of the frequency term, or 'auto' for 0.001/(H*W)");
    recon->add_option("--d", rc.d, "Normalized depth for the band weights");
    recon->add_option("--t-gate", rc.t_gate, "Timestep fed to the gate");
    recon->add_option("--init", rc.init, "blurred_target, noise or gray");
    commands["recon"] = [&] { return run_recon(global, rc); };

    AbOptions ab;
    auto* abc = app.add_subcommand("ab", "Matched-seed comparison with and without the frequency term");
    abc->add_option("--target", ab.target, "Target image (default: render the phantom)");
    add_phantom_options(abc, ab.phantom);
    abc->add_option("--steps", ab.steps, "Iterations per run");
    abc->add_option("--step-size", ab.step_size, "Gradient step");
    abc->add_option("--alpha", ab.alpha, "Weight for the ON arm, or 'auto' for 0.001/(H*W)");
    abc->add_option("--d", ab.d, "Normalized depth for the band weights");
    abc->add_option("--t-gate", ab.t_gate, "Timestep fed to the gate");
    abc->add_option("--seeds", ab.seeds, "Number of matched seed pairs");
    commands["ab"] = [&] { return run_ab(global, ab); };

    MetricsOptions mo;
    auto* met = app.add_subcommand("metrics", "SSIM, PSNR and MSE for image pairs");
    met->add_option("--a", mo.a, "First image");
    met->add_option("--b", mo.b, "Second image");
    met->add_option("--dir-a", mo.dir_a, "Directory of first images");
    met->add_option("--dir-b", mo.dir_b, "Directory of second images (matched by file name)");
    met->add_option("--window", mo.window, "SSIM window size (odd)");
    met->add_option("--sigma", mo.sigma, "SSIM Gaussian window sigma");
    met->add_option("--peak", mo.peak, "Peak signal value");
    commands["metrics"] = [&] { return run_metrics(global, mo); };

    PreprocessOptions po;
    auto* pre = app.add_subcommand("preprocess", "Wiener, binarization, Canny and ROI crop for raw frames");
    pre->add_option("--input", po.input, "Directory of PNG/PGM frames")->required();
    pre->add_option("--roi", po.roi, "ROI side length (even)");
    pre->add_option("--window", po.window, "Wiener window (odd)");
    pre->add_option("--low-ratio", po.low_ratio, "Canny low threshold as a fraction of high");
    pre->add_option("--threshold", po.threshold, "'otsu' or a fixed binarization threshold");
    pre->add_flag("--debug", po.debug, "Write the intermediate stages too");
    commands["preprocess"] = [&] { return run_preprocess(global, po); };

    AnalyzeOptions an;
    auto* ana = app.add_subcommand("analyze", "High-frequency ratio versus depth for a manifest");
    ana->add_option("--manifest", an.manifest, "manifest.json written by simulate")->required();
    ana->add_option("--tau", an.tau, "Mask cutoff radius");
    ana->add_option("--steepness", an.steepness, "Mask sigmoid steepness");
    commands["analyze"] = [&] { return run_analyze(global, an); };

    for (CLI::App* sub : app.get_subcommands({})) sub->configurable();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) return app.exit(e);
        const bool io = dynamic_cast<const CLI::FileError*>(&e) != nullptr;
        return report(e.what(), io ? 2 : 1);
    }

    try {
        const std::string name = app.get_subcommands().front()->get_name();
        std::error_code ec;
        fs::create_directories(global.out, ec);
        if (ec) throw focalspec::IoError("cannot create directory '" + global.out + "': " + ec.message());
        {
            std::ofstream run(fs::path(global.out) / "run.json", std::ios::binary);
            run << app.config_to_str(true, false);
            if (!run) throw focalspec::IoError("cannot write run.json in '" + global.out + "'");
        }
        return commands.at(name)();
    } catch (const focalspec::IoError& e) {
        return report(e.what(), 2);
    } catch (const fs::filesystem_error& e) {
        return report(e.what(), 2);
    } catch (const std::exception& e) {
        return report(e.what(), 1);
    }
}
