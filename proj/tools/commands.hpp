#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "focalspec/optics.hpp"

namespace focalspec::cli {

struct GlobalOptions {
    std::string out = "out";
    std::uint64_t seed = 0;
    int verbose = 0;
    int threads = 0;  ///< 0 picks the hardware concurrency
};

struct PhantomOptions {
    int height = 256;
    int width = 256;
    int pitch = 0;
    int roll = 0;
    double body_radius = 24.0;
    int arms = 4;
    double arm_length = 48.0;

    optics::PhantomSpec spec(std::uint64_t seed) const;
};

struct OpticsOptions {
    std::string otf = "gaussian";
    std::string kappa = "auto";  ///< a number, or "auto" to calibrate against target_decay
    double noise = 0.0;
    double target_decay = 10.0;
};

struct SimulateOptions {
    PhantomOptions phantom;
    OpticsOptions optics;
    int depths = 21;
    double slice_eps = optics::default_slice_eps;
    double fuse_weight = 0.3;
    bool dataset = false;
    std::vector<int> pitches{0, 10, 20, 30, 40, 50, 60};
    std::vector<int> rolls{0, 10, 20, 30, 40, 50, 60};
};

struct SweepOptions {
    PhantomOptions phantom;
    OpticsOptions optics;
    int depths = 21;
    double tau = spectral::default_tau_freq;
    double steepness = spectral::default_steepness;
};

struct LossOptions {
    std::string pred;
    std::string target;
    double d = 0.0;
    int t = 0;
    double tau = spectral::default_tau_freq;
    double steepness = spectral::default_steepness;
    int gate = 500;
    double alpha = 0.001;
    bool grad = false;
};

struct GradCheckOptions {
    int size = 12;
    int seeds = 5;
    std::vector<double> depths{-0.5, 0.0, 0.25};
    int top = 20;
    double step = 1e-6;
    double tolerance = 1e-4;
};

PhantomOptions small_phantom();

struct ReconOptions {
    std::string target;  ///< empty renders the phantom instead
    PhantomOptions phantom = small_phantom();
    int steps = 500;
    double step_size = 0.5;
    std::string alpha = "auto";  ///< "auto" uses 0.001 / (height * width)
    double d = 0.0;
    int t_gate = 0;
    std::string init = "blurred_target";
};

struct AbOptions {
    std::string target;
    PhantomOptions phantom = small_phantom();
    int steps = 300;
    double step_size = 0.5;
    std::string alpha = "auto";  ///< "auto" uses 0.001 / (height * width)
    double d = 0.0;
    int t_gate = 0;
    int seeds = 10;
};

struct MetricsOptions {
    std::string a;
    std::string b;
    std::string dir_a;
    std::string dir_b;
    int window = 11;
    double sigma = 1.5;
    double peak = 1.0;
};

struct PreprocessOptions {
    std::string input;
    int roi = 256;
    int window = 5;
    double low_ratio = 0.5;
    std::string threshold = "otsu";  ///< "otsu" or a fixed value
    bool debug = false;
};

struct AnalyzeOptions {
    std::string manifest;
    double tau = spectral::default_tau_freq;
    double steepness = spectral::default_steepness;
};

int run_simulate(const GlobalOptions& g, const SimulateOptions& o);
int run_sweep(const GlobalOptions& g, const SweepOptions& o);
int run_loss(const GlobalOptions& g, const LossOptions& o);
int run_grad_check(const GlobalOptions& g, const GradCheckOptions& o);
int run_recon(const GlobalOptions& g, const ReconOptions& o);
int run_ab(const GlobalOptions& g, const AbOptions& o);
int run_metrics(const GlobalOptions& g, const MetricsOptions& o);
int run_preprocess(const GlobalOptions& g, const PreprocessOptions& o);
int run_analyze(const GlobalOptions& g, const AnalyzeOptions& o);

}  // namespace focalspec::cli
