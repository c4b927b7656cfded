#pragma once

#include <deque>
#include <random>
#include <utility>
#include <vector>

#include "focalspec/image.hpp"

namespace fixture {

using focalspec::Image;
using focalspec::ImageRole;

inline Image disk(int h, int w, double cr, double cc, double radius, double inside = 1.0, double outside = 0.0) {
    Image img(h, w, ImageRole::intensity);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            int hits = 0;
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) {
                    const double y = r + (i + 0.5) / 4.0 - 0.5 - cr;
                    const double x = c + (j + 0.5) / 4.0 - 0.5 - cc;
                    if (x * x + y * y <= radius * radius) ++hits;
                }
            img(r, c) = outside + (inside - outside) * hits / 16.0;
        }
    }
    return img;
}

inline Image step_edge(int h, int w, int column, double left, double right) {
    Image img(h, w, ImageRole::intensity, left);
    for (int r = 0; r < h; ++r)
        for (int c = column; c < w; ++c) img(r, c) = right;
    return img;
}

inline Image add_noise(const Image& img, double sigma, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> noise(0.0, sigma);
    Image out(img.height(), img.width());
    for (std::size_t i = 0; i < out.size(); ++i) out.pixels()[i] = img.pixels()[i] + noise(rng);
    return out;
}

using Component = std::vector<std::pair<int, int>>;

inline std::vector<Component> components(const Image& mask, bool eight_connected) {
    std::vector<Component> out;
    std::vector<char> seen(mask.size(), 0);
    const int h = mask.height();
    const int w = mask.width();
    for (int r0 = 0; r0 < h; ++r0) {
        for (int c0 = 0; c0 < w; ++c0) {
            const auto i0 = static_cast<std::size_t>(r0) * w + c0;
            if (mask(r0, c0) <= 0.5 || seen[i0]) continue;
            Component comp;
            std::deque<std::pair<int, int>> queue{{r0, c0}};
            seen[i0] = 1;
            while (!queue.empty()) {
                const auto [r, c] = queue.front();
                queue.pop_front();
                comp.emplace_back(r, c);
                for (int dr = -1; dr <= 1; ++dr) {
                    for (int dc = -1; dc <= 1; ++dc) {
                        if (!eight_connected && dr != 0 && dc != 0) continue;
                        const int rr = r + dr;
                        const int cc = c + dc;
                        if (rr < 0 || rr >= h || cc < 0 || cc >= w) continue;
                        const auto j = static_cast<std::size_t>(rr) * w + cc;
                        if (mask(rr, cc) > 0.5 && !seen[j]) {
                            seen[j] = 1;
                            queue.emplace_back(rr, cc);
                        }
                    }
                }
            }
            out.push_back(std::move(comp));
        }
    }
    return out;
}

// Background pixels 4-connected to the frame border.
inline Image outside_region(const Image& edges) {
    Image background(edges.height(), edges.width());
    for (std::size_t i = 0; i < edges.size(); ++i) background.pixels()[i] = edges.pixels()[i] > 0.5 ? 0.0 : 1.0;
    Image reach(edges.height(), edges.width());
    for (const auto& comp : components(background, false)) {
        bool touches = false;
        for (auto [r, c] : comp) {
            if (r == 0 || c == 0 || r == edges.height() - 1 || c == edges.width() - 1) touches = true;
        }
        if (touches)
            for (auto [r, c] : comp) reach(r, c) = 1.0;
    }
    return reach;
}

}  // namespace fixture
