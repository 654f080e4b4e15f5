/* Copyright 2026 the cfarkit authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef CFARKIT_RASTER_HPP
#define CFARKIT_RASTER_HPP

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cfarkit/error.hpp"
#include "cfarkit/grid.hpp"

namespace cfarkit {

/// Pixel domain of a SAR raster. Log-power uses the natural logarithm
/// internally; decibel output is a display conversion only (see decibels()).
enum class PixelDomain { ComplexIq, Magnitude, Power, LogPower };

inline std::string domain_tag(PixelDomain d) {
    switch (d) {
        case PixelDomain::ComplexIq: return "ciq";
        case PixelDomain::Magnitude: return "mag";
        case PixelDomain::Power: return "pow";
        case PixelDomain::LogPower: return "logpow";
    }
    return "?";
}

inline PixelDomain domain_from_tag(const std::string& tag) {
    if (tag == "ciq") return PixelDomain::ComplexIq;
    if (tag == "mag") return PixelDomain::Magnitude;
    if (tag == "pow") return PixelDomain::Power;
    if (tag == "logpow") return PixelDomain::LogPower;
    throw FormatError("unknown pixel domain tag '" + tag + "'");
}

/// Single-channel SAR raster. Pixels are stored as 32-bit floats, row-major,
/// with interleaved (I, Q) pairs when the domain is complex.
struct SarImage {
    int width = 0;
    int height = 0;
    int looks = 1;
    PixelDomain domain = PixelDomain::Power;
    std::vector<float> pixels;

    std::int64_t pixel_count() const {
        return static_cast<std::int64_t>(width) * height;
    }
    int values_per_pixel() const { return domain == PixelDomain::ComplexIq ? 2 : 1; }

    float& at(int r, int c) { return pixels[(static_cast<std::size_t>(r) * width + c)]; }
    float at(int r, int c) const { return pixels[(static_cast<std::size_t>(r) * width + c)]; }

    void validate() const {
        if (width <= 0 || height <= 0) throw FormatError("image dimensions must be positive");
        if (looks < 1) throw FormatError("look count must be >= 1");
        const auto expect = static_cast<std::size_t>(pixel_count()) * values_per_pixel();
        if (pixels.size() != expect) throw SizeMismatch("pixel storage does not match dimensions");
        if (domain == PixelDomain::Magnitude || domain == PixelDomain::Power) {
            for (float v : pixels) {
                if (v < 0.0f) throw FormatError("negative pixel in " + domain_tag(domain) + " image");
            }
        }
    }
};

inline SarImage make_image(int width, int height, PixelDomain domain, std::vector<float> pixels,
                           int looks = 1) {
    SarImage img;
    img.width = width;
    img.height = height;
    img.looks = looks;
    img.domain = domain;
    img.pixels = std::move(pixels);
    img.validate();
    return img;
}

namespace detail {

inline SarImage converted_like(const SarImage& src, PixelDomain domain, std::vector<float> px) {
    SarImage out;
    out.width = src.width;
    out.height = src.height;
    out.looks = src.looks;
    out.domain = domain;
    out.pixels = std::move(px);
    return out;
}

}  // namespace detail

/// Convert to the power domain: P = A^2 = I^2 + Q^2 = exp(L).
inline SarImage to_power(const SarImage& img) {
    if (img.domain == PixelDomain::Power) return img;
    std::vector<float> px(static_cast<std::size_t>(img.pixel_count()));
    switch (img.domain) {
        case PixelDomain::ComplexIq:
            for (std::int64_t i = 0; i < img.pixel_count(); ++i) {
                const double re = img.pixels[2 * i];
                const double im = img.pixels[2 * i + 1];
                px[i] = static_cast<float>(re * re + im * im);
            }
            break;
        case PixelDomain::Magnitude:
            for (std::int64_t i = 0; i < img.pixel_count(); ++i) {
                const double a = img.pixels[i];
                px[i] = static_cast<float>(a * a);
            }
            break;
        case PixelDomain::LogPower:
            for (std::int64_t i = 0; i < img.pixel_count(); ++i)
                px[i] = static_cast<float>(std::exp(static_cast<double>(img.pixels[i])));
            break;
        default: break;
    }
    return detail::converted_like(img, PixelDomain::Power, std::move(px));
}

/// Convert to the magnitude domain: A = sqrt(I^2 + Q^2) = sqrt(P).
inline SarImage to_magnitude(const SarImage& img) {
    if (img.domain == PixelDomain::Magnitude) return img;
    if (img.domain == PixelDomain::ComplexIq) {
        std::vector<float> px(static_cast<std::size_t>(img.pixel_count()));
        for (std::int64_t i = 0; i < img.pixel_count(); ++i) {
            const double re = img.pixels[2 * i];
            const double im = img.pixels[2 * i + 1];
            px[i] = static_cast<float>(std::sqrt(re * re + im * im));
        }
        return detail::converted_like(img, PixelDomain::Magnitude, std::move(px));
    }
    if (img.domain == PixelDomain::LogPower) {
        std::vector<float> px(static_cast<std::size_t>(img.pixel_count()));
        for (std::int64_t i = 0; i < img.pixel_count(); ++i)
            px[i] = static_cast<float>(std::exp(0.5 * static_cast<double>(img.pixels[i])));
        return detail::converted_like(img, PixelDomain::Magnitude, std::move(px));
    }
    std::vector<float> px(static_cast<std::size_t>(img.pixel_count()));
    for (std::int64_t i = 0; i < img.pixel_count(); ++i)
        px[i] = static_cast<float>(std::sqrt(static_cast<double>(img.pixels[i])));
    return detail::converted_like(img, PixelDomain::Magnitude, std::move(px));
}

/// Convert to natural-log power, L = ln(P). Zero or negative power is an
/// error rather than a clamp: clamping would corrupt background statistics.
inline SarImage to_log_power(const SarImage& img) {
    if (img.domain == PixelDomain::LogPower) return img;
    const SarImage p = to_power(img);
    std::vector<float> px(static_cast<std::size_t>(p.pixel_count()));
    for (std::int64_t i = 0; i < p.pixel_count(); ++i) {
        const double v = p.pixels[i];
        if (v <= 0.0) throw NonPositivePixel("log undefined for pixel value <= 0");
        px[i] = static_cast<float>(std::log(v));
    }
    return detail::converted_like(p, PixelDomain::LogPower, std::move(px));
}

inline SarImage convert_to(const SarImage& img, PixelDomain target) {
    switch (target) {
        case PixelDomain::Magnitude: return to_magnitude(img);
        case PixelDomain::Power: return to_power(img);
        case PixelDomain::LogPower: return to_log_power(img);
        case PixelDomain::ComplexIq:
            if (img.domain == PixelDomain::ComplexIq) return img;
            throw DomainMismatch("cannot reconstruct complex I/Q from a detected image");
    }
    throw DomainMismatch("unknown target domain");
}

/// Display-oriented decibel values, 10*log10(P). Not a storable pixel domain.
inline Grid<float> decibels(const SarImage& img) {
    const SarImage p = to_power(img);
    Grid<float> out(p.height, p.width);
    for (int r = 0; r < p.height; ++r)
        for (int c = 0; c < p.width; ++c) {
            const double v = p.at(r, c);
            if (v <= 0.0) throw NonPositivePixel("dB undefined for pixel value <= 0");
            out(r, c) = static_cast<float>(10.0 * std::log10(v));
        }
    return out;
}

// ---------------------------------------------------------------------------
// F32R raster file format.
//   line 1: "F32R"
//   line 2: "<width> <height> <looks> <domain>"   domain in {ciq,mag,pow,logpow}
//   payload: row-major little-endian IEEE float32, 2 per pixel for ciq.
// ---------------------------------------------------------------------------

namespace detail {

inline void put_f32_le(std::ostream& os, float v) {
    const auto u = std::bit_cast<std::uint32_t>(v);
    const char b[4] = {static_cast<char>(u & 0xff), static_cast<char>((u >> 8) & 0xff),
                       static_cast<char>((u >> 16) & 0xff), static_cast<char>((u >> 24) & 0xff)};
    os.write(b, 4);
}

inline float get_f32_le(const unsigned char* b) {
    const std::uint32_t u = static_cast<std::uint32_t>(b[0]) |
                            (static_cast<std::uint32_t>(b[1]) << 8) |
                            (static_cast<std::uint32_t>(b[2]) << 16) |
                            (static_cast<std::uint32_t>(b[3]) << 24);
    return std::bit_cast<float>(u);
}

}  // namespace detail

inline void store_raster(const SarImage& img, const std::filesystem::path& path) {
    img.validate();
    std::ofstream os(path, std::ios::binary);
    if (!os) throw FormatError("cannot open '" + path.string() + "' for writing");
    os << "F32R\n"
       << img.width << ' ' << img.height << ' ' << img.looks << ' ' << domain_tag(img.domain)
       << '\n';
    for (float v : img.pixels) detail::put_f32_le(os, v);
    if (!os) throw FormatError("write failed for '" + path.string() + "'");
}

inline SarImage load_raster(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw FormatError("cannot open '" + path.string() + "'");
    std::string magic;
    if (!std::getline(is, magic) || magic != "F32R")
        throw FormatError("bad magic, expected F32R");
    std::string header;
    if (!std::getline(is, header)) throw FormatError("missing header line");
    std::istringstream hs(header);
    SarImage img;
    std::string tag;
    if (!(hs >> img.width >> img.height >> img.looks >> tag))
        throw FormatError("malformed header '" + header + "'");
    std::string extra;
    if (hs >> extra) throw FormatError("trailing tokens in header");
    img.domain = domain_from_tag(tag);
    if (img.width <= 0 || img.height <= 0 || img.looks < 1)
        throw FormatError("non-positive dimensions in header");

    const std::int64_t count = img.pixel_count() * img.values_per_pixel();
    std::vector<unsigned char> raw(static_cast<std::size_t>(count) * 4);
    is.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (is.gcount() != static_cast<std::streamsize>(raw.size()))
        throw SizeMismatch("payload shorter than header promises");
    if (is.peek() != std::char_traits<char>::eof())
        throw SizeMismatch("payload longer than header promises");

    img.pixels.resize(static_cast<std::size_t>(count));
    for (std::int64_t i = 0; i < count; ++i)
        img.pixels[i] = detail::get_f32_le(raw.data() + 4 * i);
    img.validate();
    return img;
}

/// 8-bit PGM preview with a dB stretch across the image's dynamic range.
inline void write_pgm_preview(const SarImage& img, const std::filesystem::path& path) {
    const Grid<float> db = decibels(img);
    float lo = db.data()[0], hi = db.data()[0];
    for (std::int64_t i = 0; i < db.size(); ++i) {
        lo = std::min(lo, db.data()[i]);
        hi = std::max(hi, db.data()[i]);
    }
    const float span = (hi > lo) ? (hi - lo) : 1.0f;
    std::ofstream os(path, std::ios::binary);
    if (!os) throw FormatError("cannot open '" + path.string() + "' for writing");
    os << "P5\n" << db.cols() << ' ' << db.rows() << "\n255\n";
    for (std::int64_t i = 0; i < db.size(); ++i) {
        const int v = static_cast<int>(255.0f * (db.data()[i] - lo) / span + 0.5f);
        os.put(static_cast<char>(std::clamp(v, 0, 255)));
    }
}

}  // namespace cfarkit

#endif  // CFARKIT_RASTER_HPP
