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

#ifndef CFARKIT_SIMULATOR_HPP
#define CFARKIT_SIMULATOR_HPP

#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cfarkit/error.hpp"
#include "cfarkit/grid.hpp"
#include "cfarkit/raster.hpp"
#include "cfarkit/rng.hpp"

namespace cfarkit {

// Scene generation via the multiplicative model Z = X * Y: backscatter X per
// background variant, unit-mean speckle Y ~ Gamma(n, n) in the power domain.
// Every pixel draws from its own coordinate-indexed substream, so output is
// identical for any parallel decomposition.

struct Homogeneous {
    double c = 1.0;  // constant backscatter, the average power of the region
};

struct Heterogeneous {
    double shape = 4.0;  // gamma backscatter
    double rate = 4.0;
};

struct ExtremelyHeterogeneous {
    double shape_g0 = 3.0;  // reciprocal-gamma backscatter
    double gamma_g0 = 2.0;
};

using Background = std::variant<Homogeneous, Heterogeneous, ExtremelyHeterogeneous>;

struct TargetSpec {
    int row = 0;
    int col = 0;
    int extent_rows = 1;
    int extent_cols = 1;
    double multiplier = 10.0;  // backscatter multiplier, > 1
};

struct SceneSpec {
    int width = 0;
    int height = 0;
    int looks = 1;
    Background background = Homogeneous{};
    std::vector<TargetSpec> targets;
    std::uint64_t seed = 0;

    void validate() const {
        if (width <= 0 || height <= 0) throw std::invalid_argument("scene dims must be positive");
        if (looks < 1) throw std::invalid_argument("look count must be >= 1");
        for (const auto& t : targets) {
            if (t.extent_rows < 1 || t.extent_cols < 1 || t.row < 0 || t.col < 0 ||
                t.row + t.extent_rows > height || t.col + t.extent_cols > width)
                throw std::invalid_argument("target footprint outside image bounds");
            if (!(t.multiplier > 1.0))
                throw std::invalid_argument("target multiplier must exceed 1");
        }
    }
};

struct TruthMask {
    Grid<std::uint8_t> mask;
};

namespace rng_streams {
inline constexpr std::uint64_t kSpeckle = 1;
inline constexpr std::uint64_t kBackscatter = 2;
}  // namespace rng_streams

/// iid unit-mean speckle field, Gamma(n, n) in the power domain; n = 1 is
/// exponential speckle.
inline Grid<double> gen_speckle(int looks, int height, int width, std::uint64_t seed) {
    if (looks < 1) throw std::invalid_argument("look count must be >= 1");
    Grid<double> out(height, width);
    for (int r = 0; r < height; ++r)
        for (int c = 0; c < width; ++c) {
            RngStream g(seed, rng_streams::kSpeckle,
                        static_cast<std::uint64_t>(r) * width + c);
            out(r, c) = looks == 1 ? sample_exponential(g)
                                   : sample_gamma(g, double(looks), double(looks));
        }
    return out;
}

/// Power-domain scene and its ground truth. Targets multiply the backscatter
/// so injected pixels still carry speckle.
inline std::pair<SarImage, TruthMask> gen_scene(const SceneSpec& spec) {
    spec.validate();
    const int H = spec.height, W = spec.width;

    Grid<double> backscatter(H, W);
    std::visit(
        [&](const auto& bg) {
            using T = std::decay_t<decltype(bg)>;
            if constexpr (std::is_same_v<T, Homogeneous>) {
                if (!(bg.c > 0)) throw std::invalid_argument("backscatter constant must be > 0");
                for (int r = 0; r < H; ++r)
                    for (int c = 0; c < W; ++c) backscatter(r, c) = bg.c;
            } else if constexpr (std::is_same_v<T, Heterogeneous>) {
                for (int r = 0; r < H; ++r)
                    for (int c = 0; c < W; ++c) {
                        RngStream g(spec.seed, rng_streams::kBackscatter,
                                    static_cast<std::uint64_t>(r) * W + c);
                        backscatter(r, c) = sample_gamma(g, bg.shape, bg.rate);
                    }
            } else {
                for (int r = 0; r < H; ++r)
                    for (int c = 0; c < W; ++c) {
                        RngStream g(spec.seed, rng_streams::kBackscatter,
                                    static_cast<std::uint64_t>(r) * W + c);
                        backscatter(r, c) = bg.gamma_g0 / sample_gamma(g, bg.shape_g0, 1.0);
                    }
            }
        },
        spec.background);

    TruthMask truth{Grid<std::uint8_t>(H, W, 0)};
    for (const auto& t : spec.targets)
        for (int r = t.row; r < t.row + t.extent_rows; ++r)
            for (int c = t.col; c < t.col + t.extent_cols; ++c) {
                backscatter(r, c) *= t.multiplier;
                truth.mask(r, c) = 1;
            }

    const Grid<double> speckle = gen_speckle(spec.looks, H, W, spec.seed);
    std::vector<float> px(static_cast<std::size_t>(H) * W);
    for (int r = 0; r < H; ++r)
        for (int c = 0; c < W; ++c)
            px[static_cast<std::size_t>(r) * W + c] =
                static_cast<float>(backscatter(r, c) * speckle(r, c));

    SarImage img = make_image(W, H, PixelDomain::Power, std::move(px), spec.looks);
    return {std::move(img), std::move(truth)};
}

struct Rates {
    double pfa = 0.0;
    double pd = 0.0;
    std::int64_t false_alarms = 0;
    std::int64_t clutter_pixels = 0;
    std::int64_t detected_target_pixels = 0;
    std::int64_t target_pixels = 0;
};

/// Empirical detection and false-alarm rates. PD counts detected truth
/// pixels; PFA counts detections outside the truth mask dilated by
/// guard_dilation (Chebyshev), restricted to the valid region.
inline Rates measure_rates(const Grid<std::uint8_t>& mask, const TruthMask& truth,
                           int guard_dilation, const Rect& valid) {
    if (!mask.same_shape(truth.mask)) throw DimMismatch("mask and truth dims differ");
    if (guard_dilation < 0) throw std::invalid_argument("guard_dilation must be >= 0");

    Grid<std::uint8_t> dilated(mask.rows(), mask.cols(), 0);
    for (int r = 0; r < mask.rows(); ++r)
        for (int c = 0; c < mask.cols(); ++c) {
            if (!truth.mask(r, c)) continue;
            for (int dr = -guard_dilation; dr <= guard_dilation; ++dr)
                for (int dc = -guard_dilation; dc <= guard_dilation; ++dc) {
                    const int rr = r + dr, cc = c + dc;
                    if (rr >= 0 && rr < mask.rows() && cc >= 0 && cc < mask.cols())
                        dilated(rr, cc) = 1;
                }
        }

    Rates out;
    for (int r = 0; r < mask.rows(); ++r)
        for (int c = 0; c < mask.cols(); ++c) {
            if (truth.mask(r, c)) {
                ++out.target_pixels;
                if (mask(r, c)) ++out.detected_target_pixels;
            }
            if (!valid.contains(r, c)) continue;
            if (!dilated(r, c)) {
                ++out.clutter_pixels;
                if (mask(r, c)) ++out.false_alarms;
            }
        }
    out.pd = out.target_pixels ? double(out.detected_target_pixels) / out.target_pixels : 0.0;
    out.pfa = out.clutter_pixels ? double(out.false_alarms) / out.clutter_pixels : 0.0;
    return out;
}

inline Rates measure_rates(const Grid<std::uint8_t>& mask, const TruthMask& truth,
                           int guard_dilation = 0) {
    return measure_rates(mask, truth, guard_dilation, Rect{0, 0, mask.rows(), mask.cols()});
}

// ---------------------------------------------------------------------------
// Key=value scene configuration, one pair per line, '#' comments.
// ---------------------------------------------------------------------------

inline Background parse_background_spec(const std::string& text) {
    const auto colon = text.find(':');
    const std::string name = text.substr(0, colon);
    std::map<std::string, double> kv;
    if (colon != std::string::npos) {
        std::istringstream rest(text.substr(colon + 1));
        std::string pair;
        while (std::getline(rest, pair, ',')) {
            const auto eq = pair.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("malformed background parameter '" + pair + "'");
            kv[pair.substr(0, eq)] = std::stod(pair.substr(eq + 1));
        }
    }
    auto get_or = [&](const std::string& k, double d) {
        auto it = kv.find(k);
        return it == kv.end() ? d : it->second;
    };
    if (name == "homog" || name == "homogeneous")
        return Homogeneous{get_or("c", 1.0)};
    if (name == "hetero" || name == "heterogeneous")
        return Heterogeneous{get_or("shape", 4.0), get_or("rate", 4.0)};
    if (name == "exthetero" || name == "extremely-heterogeneous")
        return ExtremelyHeterogeneous{get_or("shape", 3.0), get_or("gamma", 2.0)};
    throw std::invalid_argument("unknown background '" + name + "'");
}

}  // namespace cfarkit

#endif  // CFARKIT_SIMULATOR_HPP
