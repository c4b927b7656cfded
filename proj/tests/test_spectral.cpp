#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "focalspec/error.hpp"
#include "focalspec/fft.hpp"
#include "focalspec/spectral.hpp"
#include "oracles.hpp"

using namespace focalspec;
using namespace focalspec::spectral;

TEST_CASE("radial distance map normalization") {
    const Image r = radial_distance_map(8, 8);
    CHECK(r(4, 4) == 0.0);
    CHECK(r(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(r(4, 5) == doctest::Approx(0.25 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(r(4, 5) == doctest::Approx(0.17678).epsilon(1e-5));

    for (int n : {4, 10, 16}) CHECK(radial_distance_map(n, n)(0, 0) == doctest::Approx(1.0));
    const Image odd = radial_distance_map(5, 7);
    for (int row = 0; row < 5; ++row)
        for (int col = 0; col < 7; ++col)
            CHECK(odd(row, col) == doctest::Approx(oracle::radius_at(row, col, 5, 7)).epsilon(1e-14));
    CHECK_THROWS_AS(radial_distance_map(0, 3), DimensionError);
}

TEST_CASE("sigmoid masks") {
    CHECK(high_mask_value(0.1, 0.1, 50.0) == 0.5);
    CHECK(high_mask_value(0.37, 0.37, 3.0) == 0.5);

    const RadialMaskPair masks = make_masks(16, 16, 0.1, 50.0);
    CHECK(masks.m_high(8, 8) == doctest::Approx(1.0 / (1.0 + std::exp(5.0))).epsilon(1e-12));
    CHECK(masks.m_high(8, 8) == doctest::Approx(0.0066929).epsilon(1e-4));

    SUBCASE("complement is exact") {
        for (auto [h, w] : {std::pair{16, 16}, std::pair{9, 13}, std::pair{31, 4}}) {
            const RadialMaskPair m = make_masks(h, w, 0.23, 17.0);
            for (std::size_t i = 0; i < m.m_high.size(); ++i) {
                CHECK(m.m_high.pixels()[i] + m.m_low.pixels()[i] == 1.0);
            }
        }
    }
    SUBCASE("monotone in r") {
        const Image r = radial_distance_map(21, 17);
        const RadialMaskPair m = make_masks(21, 17, 0.1, 50.0);
        std::vector<std::pair<double, double>> pts;
        for (std::size_t i = 0; i < r.size(); ++i) pts.emplace_back(r.pixels()[i], m.m_high.pixels()[i]);
        std::sort(pts.begin(), pts.end());
        for (std::size_t i = 1; i < pts.size(); ++i) CHECK(pts[i].second >= pts[i - 1].second);
    }
    SUBCASE("invalid parameters") {
        CHECK_THROWS_AS(make_masks(8, 8, 0.1, 0.0), ContractError);
        CHECK_THROWS_AS(make_masks(8, 8, 0.1, -2.0), ContractError);
        CHECK_THROWS_AS(make_masks(8, 8, 0.0, 50.0), ContractError);
        CHECK_THROWS_AS(make_masks(8, 8, 1.0, 50.0), ContractError);
    }
    SUBCASE("cache returns equal masks") {
        const auto a = cached_masks(12, 12, 0.1, 50.0);
        const auto b = cached_masks(12, 12, 0.1, 50.0);
        CHECK(a.get() == b.get());
        CHECK(a->m_high == make_masks(12, 12, 0.1, 50.0).m_high);
    }
    SUBCASE("hard comparator") {
        const RadialMaskPair hard = make_hard_masks(8, 8, 0.1);
        CHECK(hard.m_high(4, 4) == 0.0);
        CHECK(hard.m_high(0, 0) == 1.0);
        for (double v : hard.m_high.pixels()) CHECK((v == 0.0 || v == 1.0));
    }
}

TEST_CASE("band weights") {
    CHECK(band_weights(DepthLabel(0.0)).lambda_high == doctest::Approx(0.02).epsilon(1e-15));
    CHECK(band_weights(DepthLabel(0.0)).lambda_low == doctest::Approx(0.98).epsilon(1e-15));
    CHECK(std::abs(band_weights(DepthLabel(0.5)).lambda_high - 0.0085) <= 1e-15);
    CHECK(std::abs(band_weights(DepthLabel(-0.5)).lambda_high - 0.0065) <= 1e-15);

    double best_d = 0.0, best = -1.0;
    for (int i = 0; i <= 1000; ++i) {
        const double d = -0.5 + i / 1000.0;
        const BandWeights w = band_weights(DepthLabel(std::min(d, 0.5)));
        CHECK(w.lambda_high + w.lambda_low == 1.0);
        CHECK(w.lambda_high > 0.0);
        CHECK(w.lambda_high < 1.0);
        if (w.lambda_high > best) {
            best = w.lambda_high;
            best_d = d;
        }
    }
    CHECK(best_d == doctest::Approx(0.02).epsilon(1e-9));
    CHECK(best == doctest::Approx(0.02002).epsilon(1e-12));
}

TEST_CASE("high-frequency energy ratio") {
    const RadialMaskPair masks = make_masks(16, 16, 0.1, 50.0);
    SUBCASE("constant image keeps all energy at DC") {
        for (double c : {0.1, 0.5, 1.0}) {
            CHECK(hf_energy_ratio(Image(16, 16, ImageRole::intensity, c), masks) ==
                  doctest::Approx(1.0 / (1.0 + std::exp(5.0))).epsilon(1e-12));
        }
    }
    SUBCASE("all-zero image") { CHECK(hf_energy_ratio(Image(16, 16), masks) == 0.0); }
    SUBCASE("bounded and scale invariant") {
        for (int seed = 0; seed < 20; ++seed) {
            const Image img = oracle::random_image(16, 16, seed, -1.0, 1.0);
            const double ratio = hf_energy_ratio(img, masks);
            CHECK(ratio >= 0.0);
            CHECK(ratio <= 1.0);
            Image scaled = img;
            for (double& p : scaled.pixels()) p *= 3.7;
            CHECK(std::abs(hf_energy_ratio(scaled, masks) - ratio) <= 1e-12);
        }
    }
    SUBCASE("white noise approaches the mask mean") {
        const int n = 32;
        const RadialMaskPair m = make_masks(n, n, 0.1, 50.0);
        double mask_mean = 0.0;
        for (double v : m.m_high.pixels()) mask_mean += v;
        mask_mean /= static_cast<double>(n * n);

        const int seeds = 300;
        std::vector<double> ratios;
        std::mt19937_64 rng(2024);
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (int s = 0; s < seeds; ++s) {
            Image img(n, n);
            for (double& p : img.pixels()) p = gauss(rng);
            ratios.push_back(hf_energy_ratio(img, m));
        }
        double mean = 0.0, var = 0.0;
        for (double r : ratios) mean += r;
        mean /= seeds;
        for (double r : ratios) var += (r - mean) * (r - mean);
        var /= seeds - 1;
        const double stderr_mean = std::sqrt(var / seeds);
        CHECK(std::abs(mean - mask_mean) <= 3.0 * stderr_mean);
    }
    CHECK_THROWS_AS(hf_energy_ratio(Image(8, 8), masks), DimensionError);
}

TEST_CASE("radial power spectrum") {
    SUBCASE("constant image") {
        const auto bins = radial_power_spectrum(Image(16, 16, ImageRole::intensity, 0.5), 8);
        CHECK(bins.size() == 8);
        CHECK(bins[0].mean_power > 0.0);
        for (std::size_t b = 1; b < bins.size(); ++b) CHECK(bins[b].mean_power == doctest::Approx(0.0));
        CHECK(bins[0].r_center == doctest::Approx(1.0 / 16.0));
    }
    SUBCASE("impulse is flat") {
        Image img(16, 16);
        img(3, 9) = 1.0;
        for (const auto& bin : radial_power_spectrum(img, 6)) {
            if (bin.count > 0) CHECK(bin.mean_power == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
    SUBCASE("bins account for total energy") {
        const Image img = oracle::random_image(16, 16, 77);
        const auto bins = radial_power_spectrum(img, 10);
        double from_bins = 0.0;
        std::size_t population = 0;
        for (const auto& bin : bins) {
            from_bins += bin.mean_power * static_cast<double>(bin.count);
            population += bin.count;
        }
        double direct = 0.0;
        for (auto v : oracle::naive_dft_shifted(img)) direct += std::norm(v);
        CHECK(population == 256);
        CHECK(from_bins == doctest::Approx(direct).epsilon(1e-9));
    }
    CHECK_THROWS_AS(radial_power_spectrum(Image(8, 8), 1), ContractError);
}

TEST_CASE("csv emission") {
    const auto path = std::filesystem::temp_directory_path() / "focalspec_ratio.csv";
    write_ratio_csv(path, {{-0.5, 0.0123456789012345}, {0.0, 0.5}});
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() == "d,hf_ratio\n-0.5,0.0123456789012\n0,0.5\n");

    const auto radial = std::filesystem::temp_directory_path() / "focalspec_radial.csv";
    write_radial_csv(radial, radial_power_spectrum(oracle::random_image(8, 8, 1), 4));
    std::ifstream rin(radial);
    std::string header;
    std::getline(rin, header);
    CHECK(header == "r_center,mean_power");
}
