#include "focalspec/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cctype>
#include <cstring>
#include <fstream>

#include "focalspec/error.hpp"

namespace focalspec::io {

namespace {

int max_level(BitDepth depth) { return depth == BitDepth::eight ? 255 : 65535; }

std::uint16_t quantize(double v, int maxval) {
    const double clamped = std::clamp(std::isfinite(v) ? v : 0.0, 0.0, 1.0);
    return static_cast<std::uint16_t>(std::lround(clamped * maxval));
}

}  // namespace

Image read_png(const std::filesystem::path& path) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (png_image_begin_read_from_file(&image, path.c_str()) == 0) {
        throw IoError("png: cannot read '" + path.string() + "': " + image.message);
    }
    // The simplified API treats 16-bit files as linear and 8-bit files as
    // sRGB; requesting the matching format avoids any gamma conversion.
    const bool wide = (image.format & PNG_FORMAT_FLAG_LINEAR) != 0;
    image.format = wide ? PNG_FORMAT_LINEAR_Y : PNG_FORMAT_GRAY;

    const int height = static_cast<int>(image.height);
    const int width = static_cast<int>(image.width);
    std::vector<double> px(static_cast<std::size_t>(height) * width);
    if (wide) {
        std::vector<std::uint16_t> buf(PNG_IMAGE_SIZE(image) / 2);
        if (png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr) == 0) {
            throw IoError("png: decode failed for '" + path.string() + "': " + image.message);
        }
        for (std::size_t i = 0; i < px.size(); ++i) px[i] = buf[i] / 65535.0;
    } else {
        std::vector<unsigned char> buf(PNG_IMAGE_SIZE(image));
        if (png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr) == 0) {
            throw IoError("png: decode failed for '" + path.string() + "': " + image.message);
        }
        for (std::size_t i = 0; i < px.size(); ++i) px[i] = buf[i] / 255.0;
    }
    return Image::intensity(height, width, std::move(px));
}

void write_png(const std::filesystem::path& path, const Image& img, BitDepth depth) {
    if (img.empty()) throw DimensionError("write_png: empty image");
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(img.width());
    image.height = static_cast<png_uint_32>(img.height());
    const int maxval = max_level(depth);

    int ok = 0;
    if (depth == BitDepth::sixteen) {
        image.format = PNG_FORMAT_LINEAR_Y;
        std::vector<std::uint16_t> buf(img.size());
        std::transform(img.pixels().begin(), img.pixels().end(), buf.begin(),
                       [&](double p) { return quantize(p, maxval); });
        ok = png_image_write_to_file(&image, path.c_str(), 0, buf.data(), 0, nullptr);
    } else {
        image.format = PNG_FORMAT_GRAY;
        std::vector<unsigned char> buf(img.size());
        std::transform(img.pixels().begin(), img.pixels().end(), buf.begin(),
                       [&](double p) { return static_cast<unsigned char>(quantize(p, maxval)); });
        ok = png_image_write_to_file(&image, path.c_str(), 0, buf.data(), 0, nullptr);
    }
    if (ok == 0) throw IoError("png: cannot write '" + path.string() + "': " + image.message);
}

Image read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");

    auto next_token = [&]() {
        std::string tok;
        char ch;
        while (in.get(ch)) {
            if (ch == '#') {
                std::string skip;
                std::getline(in, skip);
                continue;
            }
            if (std::isspace(static_cast<unsigned char>(ch))) {
                if (!tok.empty()) break;
                continue;
            }
            tok.push_back(ch);
        }
        if (tok.empty()) throw IoError("pgm: truncated header in '" + path.string() + "'");
        return tok;
    };

    const std::string magic = next_token();
    if (magic != "P5" && magic != "P2") throw IoError("pgm: unsupported magic '" + magic + "'");
    int width = 0, height = 0, maxval = 0;
    try {
        width = std::stoi(next_token());
        height = std::stoi(next_token());
        maxval = std::stoi(next_token());
    } catch (const std::logic_error&) {
        throw IoError("pgm: malformed header in '" + path.string() + "'");
    }
    if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 65535) {
        throw IoError("pgm: invalid header values in '" + path.string() + "'");
    }

    std::vector<double> px(static_cast<std::size_t>(width) * height);
    if (magic == "P2") {
        for (auto& p : px) {
            int v = 0;
            if (!(in >> v)) throw IoError("pgm: truncated pixel data");
            p = std::clamp(v, 0, maxval) / static_cast<double>(maxval);
        }
    } else {
        const int bytes = maxval < 256 ? 1 : 2;
        std::vector<unsigned char> raw(px.size() * bytes);
        if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()))) {
            throw IoError("pgm: truncated pixel data in '" + path.string() + "'");
        }
        for (std::size_t i = 0; i < px.size(); ++i) {
            const int v = bytes == 1 ? raw[i] : (raw[2 * i] << 8) | raw[2 * i + 1];
            px[i] = std::clamp(v, 0, maxval) / static_cast<double>(maxval);
        }
    }
    return Image::intensity(height, width, std::move(px));
}

void write_pgm(const std::filesystem::path& path, const Image& img, BitDepth depth) {
    if (img.empty()) throw DimensionError("write_pgm: empty image");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    const int maxval = max_level(depth);
    out << "P5\n" << img.width() << " " << img.height() << "\n" << maxval << "\n";
    std::vector<unsigned char> raw;
    raw.reserve(img.size() * (depth == BitDepth::eight ? 1 : 2));
    for (double p : img.pixels()) {
        const std::uint16_t v = quantize(p, maxval);
        if (depth == BitDepth::eight) {
            raw.push_back(static_cast<unsigned char>(v));
        } else {
            raw.push_back(static_cast<unsigned char>(v >> 8));
            raw.push_back(static_cast<unsigned char>(v & 0xFF));
        }
    }
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

namespace {

template <typename T>
void put_le(std::ostream& out, T value) {
    std::array<unsigned char, sizeof(T)> bytes{};
    std::memcpy(bytes.data(), &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
    std::array<unsigned char, sizeof(T)> bytes{};
    if (!in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T))) {
        throw IoError("f64: truncated file");
    }
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    T value;
    std::memcpy(&value, bytes.data(), sizeof(T));
    return value;
}

}  // namespace

Image read_f64(const std::filesystem::path& path, ImageRole role) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    const auto height = get_le<std::uint32_t>(in);
    const auto width = get_le<std::uint32_t>(in);
    if (height == 0 || width == 0 || height > (1u << 20) || width > (1u << 20)) {
        throw IoError("f64: invalid dimensions in '" + path.string() + "'");
    }
    std::vector<double> px(static_cast<std::size_t>(height) * width);
    for (auto& p : px) p = get_le<double>(in);
    return Image(static_cast<int>(height), static_cast<int>(width), std::move(px), role);
}

void write_f64(const std::filesystem::path& path, const Image& img) {
    if (img.empty()) throw DimensionError("write_f64: empty image");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    put_le(out, static_cast<std::uint32_t>(img.height()));
    put_le(out, static_cast<std::uint32_t>(img.width()));
    for (double p : img.pixels()) put_le(out, p);
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

namespace {

std::string lower_extension(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    return ext;
}

}  // namespace

Image read_image(const std::filesystem::path& path) {
    const std::string ext = lower_extension(path);
    if (ext == ".png") return read_png(path);
    if (ext == ".pgm") return read_pgm(path);
    if (ext == ".f64") {
        Image img = read_f64(path);
        if (img.in_unit_range()) img.set_role(ImageRole::intensity);
        return img;
    }
    throw IoError("unsupported image format '" + ext + "' for '" + path.string() + "'");
}

void write_image(const std::filesystem::path& path, const Image& img) {
    const std::string ext = lower_extension(path);
    if (ext == ".png") return write_png(path, img);
    if (ext == ".pgm") return write_pgm(path, img);
    if (ext == ".f64") return write_f64(path, img);
    throw IoError("unsupported image format '" + ext + "' for '" + path.string() + "'");
}

}  // namespace focalspec::io
